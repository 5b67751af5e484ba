"""Command-line pipeline: ingest -> embed -> model -> annotate -> aggregate.

Stage outputs are plain files in the project directory (see ``project.py``);
every tuning flag is recorded into project.json for provenance. Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import shutil
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import corpus, embed, evolve, preprocess, report, themes as themes_mod, topics as topics_mod
from .errors import PolicyTopicsError, TooFewTopics
from .project import Project
from .clustering import ClusterParams
from .reduction import ReduceParams


def _fail(exc: Exception) -> "click.ClickException":
    err = click.ClickException(f"{type(exc).__name__}: {exc}")
    err.exit_code = 1
    return err


@click.group()
@click.option(
    "--project",
    "-C",
    "project_dir",
    default=".",
    show_default=True,
    type=click.Path(file_okay=False),
    help="Project directory holding manifest.csv and stage outputs.",
)
@click.pass_context
def main(ctx, project_dir):
    """Topic clustering and theme analytics for policy document corpora."""
    ctx.obj = Project(project_dir)


@main.command()
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Manifest to copy into the project (default: existing manifest.csv).")
@click.option("--texts", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of <doc_id>.txt files (default: PROJECT/texts).")
@click.pass_obj
def ingest(project: Project, manifest, texts):
    """Split document texts into sentences.csv."""
    try:
        project.root.mkdir(parents=True, exist_ok=True)
        if manifest is not None:
            shutil.copyfile(manifest, project.manifest_path)
        docs = corpus.load_manifest(project.require(project.manifest_path, "ingest --manifest"))
        texts_dir = Path(texts) if texts is not None else project.texts_dir
        project.invalidate_downstream("ingest")
        total = 0
        for doc in docs:
            text_path = texts_dir / f"{doc.doc_id}.txt"
            if not text_path.exists():
                raise PolicyTopicsError(f"missing text file {text_path}")
            text = text_path.read_text(encoding="utf-8")
            sentences = corpus.ingest_document(doc, text, project.sentences_path)
            total += len(sentences)
        project.record_stage("ingest", {"documents": len(docs), "sentences": total})
        click.echo(f"ingested {len(docs)} documents, {total} sentences")
    except PolicyTopicsError as exc:
        raise _fail(exc)


@main.command(name="embed")
@click.option("--backend", type=click.Choice(["hashed", "external"]), default="hashed",
              show_default=True)
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False), default=None,
              help="EMB1 file to import when --backend external.")
@click.option("--seed", type=int, default=42, show_default=True)
@click.pass_obj
def embed_cmd(project: Project, backend, embeddings, seed):
    """Produce sentence vectors (embeddings.emb1)."""
    try:
        sentences = corpus.read_sentences(project.require(project.sentences_path, "ingest"))
        clean = preprocess.clean_corpus(sentences)
        project.invalidate_downstream("embed")
        if backend == "hashed":
            matrix = embed.embed_hashed(clean, seed=seed)
        else:
            if embeddings is None:
                raise click.UsageError("--backend external requires --embeddings PATH")
            matrix = embed.load_external_embeddings(embeddings, expected_n=len(sentences))
        embed.save_embeddings(matrix, project.embeddings_path)
        project.record_stage(
            "embed",
            {"backend": backend, "seed": seed if backend == "hashed" else None,
             "embeddings": str(embeddings) if embeddings else None,
             "n": matrix.n, "dim": matrix.dim},
        )
        click.echo(f"embedded {matrix.n} sentences into {matrix.dim} dimensions ({backend})")
    except PolicyTopicsError as exc:
        raise _fail(exc)


def _load_aligned(project: Project):
    sentences = corpus.read_sentences(project.require(project.sentences_path, "ingest"))
    matrix = embed.load_external_embeddings(
        project.require(project.embeddings_path, "embed"), expected_n=len(sentences)
    )
    return sentences, matrix


@main.command()
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--min-cluster-size", type=int, default=10, show_default=True)
@click.option("--n-neighbors", type=int, default=15, show_default=True)
@click.option("--min-topics", type=int, default=3, show_default=True)
@click.option("--top-n", type=int, default=10, show_default=True)
@click.option("--stopwords", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Custom stop-word list (default: shipped list).")
@click.pass_obj
def model(project: Project, seed, min_cluster_size, n_neighbors, min_topics, top_n, stopwords):
    """Extract topic clusters per document (topics.csv, representatives.csv)."""
    try:
        docs = corpus.load_manifest(project.require(project.manifest_path, "ingest"))
        sentences, matrix = _load_aligned(project)
        stop_set, stop_id = preprocess.load_stopwords(stopwords)
        clean = preprocess.clean_corpus(sentences)
        params = topics_mod.PipelineParams(
            reduce=ReduceParams(n_neighbors=n_neighbors, seed=seed),
            cluster=ClusterParams(min_cluster_size=min_cluster_size),
            top_n=top_n,
            min_topics=min_topics,
        )
        positions = {doc.doc_id: [] for doc in docs}
        for pos, s in enumerate(sentences):
            if s.doc_id in positions:
                positions[s.doc_id].append(pos)

        def run_one(doc):
            rows = positions[doc.doc_id]
            if not rows:
                raise PolicyTopicsError(f"document {doc.doc_id!r} has no sentences; re-run ingest")
            doc_clean = [clean[p] for p in rows]
            doc_matrix = matrix.values[np.asarray(rows)]
            try:
                used, doc_topics = topics_mod.ensure_min_topics(
                    doc_clean, doc_matrix, params, stop_set, stop_id
                )
            except TooFewTopics as exc:
                raise PolicyTopicsError(
                    f"document {doc.doc_id!r}: TooFewTopics: {exc}"
                ) from exc
            return doc, used, doc_topics

        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(run_one, docs))

        project.invalidate_downstream("model")
        all_topics = [t for _, _, doc_topics in results for t in doc_topics]
        topics_mod.write_topics_csv(all_topics, project.topics_path)
        topics_mod.write_representatives_csv(all_topics, project.representatives_path)
        project.record_stage(
            "model",
            {
                "seed": seed,
                "min_cluster_size": min_cluster_size,
                "n_neighbors": n_neighbors,
                "min_topics": min_topics,
                "top_n": top_n,
                "stopwords": str(stopwords) if stopwords else stop_id,
                "per_document": {
                    doc.doc_id: {
                        "topics": len(doc_topics),
                        "min_cluster_size": used.cluster.min_cluster_size,
                        "n_neighbors": used.reduce.n_neighbors,
                    }
                    for doc, used, doc_topics in results
                },
            },
        )
        for doc, _, doc_topics in results:
            click.echo(f"{doc.doc_id}: {len(doc_topics)} topics")
    except PolicyTopicsError as exc:
        raise _fail(exc)


@main.command(name="export-annotations")
@click.argument("out", type=click.Path(dir_okay=False))
@click.pass_obj
def export_annotations(project: Project, out):
    """Copy assignments.csv to OUT for external editing."""
    try:
        src = project.require(project.assignments_path, "import-annotations")
        shutil.copyfile(src, out)
        click.echo(f"exported {out}")
    except PolicyTopicsError as exc:
        raise _fail(exc)


@main.command(name="import-annotations")
@click.argument("src", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def import_annotations(project: Project, src):
    """Validate and install an assignments.csv."""
    try:
        assignments = themes_mod.read_assignments(src)
        known = _known_topics(project)
        if known is not None:
            for a in assignments:
                if (a.doc_id, a.topic_id) not in known:
                    raise PolicyTopicsError(
                        f"assignment references unknown topic {a.doc_id}/{a.topic_id}"
                    )
        project.invalidate_downstream("annotate")
        themes_mod.write_assignments(assignments, project.assignments_path)
        project.record_stage("annotate", {"assignments": len(assignments), "source": str(src)})
        click.echo(f"imported {len(assignments)} assignments")
    except PolicyTopicsError as exc:
        raise _fail(exc)


def _known_topics(project: Project):
    if not project.topics_path.exists():
        return None
    by_doc = topics_mod.read_topics_csv(project.topics_path)
    return {(t.doc_id, t.topic_id) for doc_topics in by_doc.values() for t in doc_topics}


@main.command(name="themes")
@click.option("--paper-fixture", is_flag=True, default=False,
              help="Summarize the shipped paper bookkeeping fixture instead of project data.")
@click.pass_obj
def themes_cmd(project: Project, paper_fixture):
    """Aggregate theme statistics (themes.csv) and print a summary table."""
    try:
        if paper_fixture:
            summaries = themes_mod.load_paper_fixture()
            _print_summaries(summaries)
            click.echo(
                f"total clusters: {sum(s.cluster_count for s in summaries)}; "
                f"distinct key themes: {themes_mod.distinct_fixture_themes(summaries)}"
            )
            return
        assignments = themes_mod.read_assignments(
            project.require(project.assignments_path, "import-annotations")
        )
        cat = themes_mod.catalog(assignments)
        counts = {}
        by_doc = topics_mod.read_topics_csv(project.require(project.topics_path, "model"))
        for doc_id, doc_topics in by_doc.items():
            counts[doc_id] = len(doc_topics)
        summaries = themes_mod.document_summary(assignments, counts)
        themes_mod.write_catalog_csv(cat, project.themes_path)
        project.record_stage("aggregate", {"themes": len(cat)})
        _print_summaries(summaries)
        click.echo(
            f"total clusters: {sum(s.cluster_count for s in summaries)}; "
            f"distinct themes: {len(cat)}; "
            f"incoherence rate: {themes_mod.incoherence_rate(assignments):.2f}"
        )
    except PolicyTopicsError as exc:
        raise _fail(exc)


def _print_summaries(summaries):
    click.echo(f"{'doc':<5} {'clusters':>8} {'themes':>7}  key themes")
    for s in summaries:
        shown = ", ".join(s.key_themes[:8])
        if len(s.key_themes) > 8:
            shown += ", ..."
        click.echo(f"{s.doc_id:<5} {s.cluster_count:>8} {s.theme_count:>7}  {shown}")


@main.command(name="evolve")
@click.pass_obj
def evolve_cmd(project: Project):
    """Compute per-theme yearly series (evolution.json)."""
    try:
        docs = corpus.load_manifest(project.require(project.manifest_path, "ingest"))
        assignments = themes_mod.read_assignments(
            project.require(project.assignments_path, "import-annotations")
        )
        series = evolve.theme_by_year(assignments, docs)
        evolve.write_evolution_json(series, project.evolution_path)
        click.echo(f"wrote {project.evolution_path} ({len(series)} series)")
    except PolicyTopicsError as exc:
        raise _fail(exc)


@main.command()
@click.option("--k", type=int, default=10, show_default=True,
              help="Stream graph series count (top and bottom).")
@click.pass_obj
def render(project: Project, k):
    """Emit SVG + JSON figures into renders/."""
    import json as _json

    try:
        docs = corpus.load_manifest(project.require(project.manifest_path, "ingest"))
        by_doc = topics_mod.read_topics_csv(project.require(project.topics_path, "model"))
        assignments = themes_mod.read_assignments(
            project.require(project.assignments_path, "import-annotations")
        )
        spec = report.RenderSpec()
        out = project.renders_dir
        out.mkdir(parents=True, exist_ok=True)

        def write(name: str, svg: str, payload) -> None:
            (out / f"{name}.svg").write_text(svg, encoding="utf-8")
            with open(out / f"{name}.json", "w", encoding="utf-8") as fh:
                _json.dump(payload, fh, indent=2, ensure_ascii=False)

        for doc_id, doc_topics in sorted(by_doc.items()):
            write(
                f"{doc_id}_topics",
                report.barchart_svg(doc_topics, 8, spec),
                report.barchart_json(doc_topics, 8),
            )
        cat_all = themes_mod.catalog(assignments)
        cat_pre, cat_post = evolve.split_by_era(assignments, docs)
        for name, cat in (("all", cat_all), ("pre", cat_pre), ("post", cat_post)):
            if len(cat) == 0:
                continue
            weighted = report.wordcloud_weights(cat, spec)
            write(
                f"themes_wordcloud_{name}",
                report.wordcloud_svg(weighted, spec),
                report.wordcloud_json(weighted),
            )
        series = evolve.theme_by_year(assignments, docs)
        for direction in ("top", "bottom"):
            chosen = evolve.select_series(series, k, direction)
            if not chosen:
                continue
            bands = evolve.stream_layout(chosen)
            write(
                f"themes_stream_{direction}{k}",
                report.streamgraph_svg(bands, spec),
                report.streamgraph_json(bands),
            )
        click.echo(f"wrote figures to {out}")
    except PolicyTopicsError as exc:
        raise _fail(exc)


@main.command()
@click.option("--addr", default="127.0.0.1:8787", show_default=True)
@click.option("--ui-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Built UI assets to host at /.")
@click.pass_obj
def serve(project: Project, addr, ui_dir):
    """Serve the annotation API (and optionally the UI) over HTTP."""
    import uvicorn

    from .service import create_app

    try:
        host, _, port = addr.rpartition(":")
        app = create_app(project.root, ui_dir=ui_dir)
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    except PolicyTopicsError as exc:
        raise _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
