"""HTTP API over a project directory, for the annotation UI and scripts.

Persistence is the same CSV files the CLI writes; no database. Writes are
serialized with a process-wide lock, and re-clustering runs as a single
background job per document. A completed rerun replaces the document's
topics and moves its previous assignments into assignments_stale.csv: they
stay on disk but no longer count toward catalogs or evolution.
"""

from __future__ import annotations

import threading
from pathlib import Path

import numpy as np
from fastapi import Body, FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from . import corpus, embed, evolve, preprocess, themes as themes_mod, topics as topics_mod
from .clustering import ClusterParams
from .errors import (
    InconsistentAssignment,
    NotFound,
    PolicyTopicsError,
    TooManyThemes,
)
from .project import Project
from .reduction import ReduceParams


class JobRunner:
    """One in-process rerun job per document at a time."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        self._counter = 0

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            return dict(job) if job else None

    def active_for(self, doc_id: str) -> bool:
        with self._lock:
            return any(
                j["doc_id"] == doc_id and j["status"] in ("queued", "running")
                for j in self._jobs.values()
            )

    def submit(self, doc_id: str, params: dict, work) -> dict:
        with self._lock:
            self._counter += 1
            job_id = f"job-{self._counter:04d}"
            job = {
                "job_id": job_id,
                "kind": "model_document",
                "doc_id": doc_id,
                "params": params,
                "status": "queued",
                "result": None,
                "error": None,
            }
            self._jobs[job_id] = job

        def run():
            with self._lock:
                self._jobs[job_id]["status"] = "running"
            try:
                result = work()
                with self._lock:
                    self._jobs[job_id]["status"] = "done"
                    self._jobs[job_id]["result"] = result
            except Exception as exc:  # surfaced via job status, not raised
                with self._lock:
                    self._jobs[job_id]["status"] = "failed"
                    self._jobs[job_id]["error"] = f"{type(exc).__name__}: {exc}"

        threading.Thread(target=run, daemon=True).start()
        return dict(job)


def create_app(project_dir, ui_dir=None) -> FastAPI:
    project = Project(project_dir)
    app = FastAPI(title="policytopics")
    write_lock = threading.Lock()
    jobs = JobRunner()

    def manifest() -> list[corpus.Document]:
        if not project.manifest_path.exists():
            return []
        return corpus.load_manifest(project.manifest_path)

    def doc_or_404(doc_id: str) -> corpus.Document:
        for doc in manifest():
            if doc.doc_id == doc_id:
                return doc
        raise HTTPException(status_code=404, detail=f"unknown document {doc_id!r}")

    def topics_by_doc() -> dict[str, list[topics_mod.TopicCluster]]:
        if not project.topics_path.exists():
            return {}
        return topics_mod.read_topics_csv(project.topics_path)

    def representatives_by_topic() -> dict[tuple[str, int], list[tuple[int, float]]]:
        out: dict[tuple[str, int], list[tuple[int, float]]] = {}
        if not project.representatives_path.exists():
            return out
        import csv

        with open(project.representatives_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader, None)
            for row in reader:
                if not row:
                    continue
                key = (row[0], int(row[1]))
                out.setdefault(key, []).append((int(row[2]), float(row[3])))
        return out

    def assignments() -> list[themes_mod.ThemeAssignment]:
        if not project.assignments_path.exists():
            return []
        return themes_mod.read_assignments(project.assignments_path)

    def known_topics() -> set[tuple[str, int]]:
        return {
            (t.doc_id, t.topic_id)
            for doc_topics in topics_by_doc().values()
            for t in doc_topics
        }

    @app.get("/api/documents")
    def get_documents():
        return [
            {
                "doc_id": d.doc_id,
                "title": d.title,
                "issuer": d.issuer,
                "doc_type": d.doc_type,
                "year": d.year,
                "era": d.era,
            }
            for d in manifest()
        ]

    @app.get("/api/documents/{doc_id}/topics")
    def get_document_topics(doc_id: str):
        doc_or_404(doc_id)
        doc_topics = topics_by_doc().get(doc_id)
        if not doc_topics:
            raise HTTPException(status_code=409, detail=f"document {doc_id!r} not yet modelled")
        sentences = {
            s.index: s.text
            for s in corpus.read_sentences(project.sentences_path)
            if s.doc_id == doc_id
        }
        reps = representatives_by_topic()
        current = {(a.doc_id, a.topic_id): a for a in assignments()}
        stale = set()
        if project.stale_assignments_path.exists():
            stale = {
                (a.doc_id, a.topic_id)
                for a in themes_mod.read_assignments(project.stale_assignments_path)
            }
        out = []
        for t in sorted(doc_topics, key=lambda t: t.topic_id):
            assignment = current.get((doc_id, t.topic_id))
            out.append(
                {
                    "doc_id": t.doc_id,
                    "topic_id": t.topic_id,
                    "size": t.size,
                    "top_terms": [{"term": term, "weight": w} for term, w in t.top_terms],
                    "representatives": [
                        {
                            "sentence_index": idx,
                            "similarity": sim,
                            "text": sentences.get(idx, ""),
                        }
                        for idx, sim in reps.get((doc_id, t.topic_id), [])
                    ],
                    "assignment": None
                    if assignment is None
                    else {
                        "themes": list(assignment.themes),
                        "coherent": assignment.coherent,
                        "annotator": assignment.annotator,
                    },
                    "stale_assignment": (doc_id, t.topic_id) in stale,
                }
            )
        return out

    @app.get("/api/assignments/{doc_id}")
    def get_assignments(doc_id: str):
        doc_or_404(doc_id)
        current = [a for a in assignments() if a.doc_id == doc_id]
        stale = []
        if project.stale_assignments_path.exists():
            stale = [
                a
                for a in themes_mod.read_assignments(project.stale_assignments_path)
                if a.doc_id == doc_id
            ]

        def encode(a: themes_mod.ThemeAssignment) -> dict:
            return {
                "doc_id": a.doc_id,
                "topic_id": a.topic_id,
                "coherent": a.coherent,
                "themes": list(a.themes),
                "annotator": a.annotator,
            }

        return {"current": [encode(a) for a in current], "stale": [encode(a) for a in stale]}

    @app.put("/api/assignments/{doc_id}/{topic_id}")
    def put_assignment(doc_id: str, topic_id: int, body: dict = Body(...)):
        doc_or_404(doc_id)
        themes = body.get("themes", [])
        coherent = body.get("coherent", True)
        annotator = body.get("annotator", "")
        if not isinstance(themes, list) or not annotator:
            raise HTTPException(status_code=422, detail="need themes list and annotator")
        with write_lock:
            store = (
                themes_mod.AnnotationStore.load(project.assignments_path)
                if project.assignments_path.exists()
                else themes_mod.AnnotationStore()
            )
            try:
                entry = store.assign(
                    doc_id, topic_id, themes, bool(coherent), annotator, known_topics()
                )
            except (TooManyThemes, InconsistentAssignment) as exc:
                raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}")
            except NotFound as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            store.save(project.assignments_path)
        return {
            "doc_id": entry.doc_id,
            "topic_id": entry.topic_id,
            "coherent": entry.coherent,
            "themes": list(entry.themes),
            "annotator": entry.annotator,
        }

    @app.post("/api/rerun")
    def post_rerun(body: dict = Body(...)):
        doc_id = body.get("doc_id")
        if not doc_id:
            raise HTTPException(status_code=422, detail="doc_id is required")
        doc_or_404(doc_id)
        if not project.sentences_path.exists() or not project.embeddings_path.exists():
            raise HTTPException(status_code=409, detail="project not ingested and embedded yet")
        if jobs.active_for(doc_id):
            raise HTTPException(status_code=409, detail=f"a job is already running for {doc_id!r}")
        overrides = {
            "min_cluster_size": body.get("min_cluster_size"),
            "n_neighbors": body.get("n_neighbors"),
        }

        def work():
            meta = project.load_meta()
            settings = meta.get("stages", {}).get("model", {}).get("settings", {})
            params = topics_mod.PipelineParams(
                reduce=ReduceParams(
                    n_neighbors=overrides["n_neighbors"] or settings.get("n_neighbors", 15),
                    seed=settings.get("seed", 42),
                ),
                cluster=ClusterParams(
                    min_cluster_size=overrides["min_cluster_size"]
                    or settings.get("min_cluster_size", 10)
                ),
                top_n=settings.get("top_n", 10),
                min_topics=settings.get("min_topics", 3),
            )
            all_sentences = corpus.read_sentences(project.sentences_path)
            matrix = embed.load_external_embeddings(
                project.embeddings_path, expected_n=len(all_sentences)
            )
            rows = [i for i, s in enumerate(all_sentences) if s.doc_id == doc_id]
            if not rows:
                raise PolicyTopicsError(f"document {doc_id!r} has no sentences")
            clean = preprocess.clean_corpus([all_sentences[i] for i in rows])
            used, doc_topics = topics_mod.ensure_min_topics(
                clean, matrix.values[np.asarray(rows)], params
            )
            with write_lock:
                merged = [
                    t
                    for doc_topics_old in topics_by_doc().values()
                    for t in doc_topics_old
                    if t.doc_id != doc_id
                ]
                # read_topics_csv drops representatives; recover them from file
                reps = representatives_by_topic()
                merged = [
                    topics_mod.TopicCluster(
                        t.doc_id,
                        t.topic_id,
                        t.size,
                        t.top_terms,
                        tuple(reps.get((t.doc_id, t.topic_id), ())),
                    )
                    for t in merged
                ]
                merged.extend(doc_topics)
                merged.sort(key=lambda t: (t.doc_id, t.topic_id))
                topics_mod.write_topics_csv(merged, project.topics_path)
                topics_mod.write_representatives_csv(merged, project.representatives_path)
                _mark_assignments_stale(project, doc_id)
            return {
                "doc_id": doc_id,
                "topics": len(doc_topics),
                "min_cluster_size": used.cluster.min_cluster_size,
                "n_neighbors": used.reduce.n_neighbors,
            }

        job = jobs.submit(doc_id, {k: v for k, v in overrides.items() if v}, work)
        return job

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return job

    @app.get("/api/themes")
    def get_themes():
        cat = themes_mod.catalog(assignments())
        return [{"theme": e.display, "count": e.count} for e in cat.entries]

    @app.get("/api/evolution")
    def get_evolution(k: int = 10, direction: str = "top"):
        docs = manifest()
        try:
            series = evolve.theme_by_year(assignments(), docs)
            chosen = evolve.select_series(series, k, direction) if series else []
        except PolicyTopicsError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return [
            {
                "theme": s.theme,
                "points": [{"year": y, "count": c} for y, c in s.points],
                "era": {"pre": s.era_totals[0], "post": s.era_totals[1]},
            }
            for s in chosen
        ]

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _mark_assignments_stale(project: Project, doc_id: str) -> None:
    """Move the document's current assignments into the stale file."""
    current = (
        themes_mod.read_assignments(project.assignments_path)
        if project.assignments_path.exists()
        else []
    )
    moving = [a for a in current if a.doc_id == doc_id]
    if not moving:
        return
    keeping = [a for a in current if a.doc_id != doc_id]
    stale = (
        themes_mod.read_assignments(project.stale_assignments_path)
        if project.stale_assignments_path.exists()
        else []
    )
    themes_mod.write_assignments(keeping, project.assignments_path)
    themes_mod.write_assignments(stale + moving, project.stale_assignments_path)
