"""Acceptance suite: one test per release criterion, each printing a PASS
line (run with ``pytest tests/test_acceptance.py -v -s``). Tolerances are
stated inline; oracles are independent of the implementation they check."""

import math
import time
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from click.testing import CliRunner
from sklearn.metrics import adjusted_rand_score

from policytopics.cli import main
from policytopics.clustering import ClusterParams, cluster_coordinates, mst
from policytopics.corpus import load_manifest, paper_manifest_path
from policytopics.errors import InconsistentAssignment, TooManyThemes
from policytopics.evolve import EvolutionSeries, select_series, split_by_era, stream_layout
from policytopics.preprocess import load_stopwords, normalize_sentence
from policytopics.reduction import (
    attractive_gradient,
    attractive_objective,
    build_fuzzy_graph,
    knn,
    repulsive_gradient,
    repulsive_objective,
    smooth_knn,
)
from policytopics.report import RenderSpec, wordcloud_svg, wordcloud_weights
from policytopics.themes import (
    catalog,
    document_summary,
    incoherence_rate,
    load_paper_fixture,
    make_assignment,
    read_assignments,
    write_assignments,
)
from policytopics.topics import class_tf_idf, read_topics_csv
from policytopics.preprocess import Vocabulary

from util import (
    build_project,
    central_difference,
    dense_class_tf_idf,
    gaussian_blobs,
    kruskal_total,
    pseudo_word,
)

STOPWORDS, _ = load_stopwords()


def _pass(message: str) -> None:
    print(f"\nACCEPTANCE PASS: {message}")


def test_preprocessing_rules():
    started = time.monotonic()
    assert normalize_sentence("The EU AI Act (2024) applies.") == [
        "the", "eu", "ai", "act", "applies",
    ]
    assert normalize_sentence("A 7 %") == []
    assert normalize_sentence("Risk-based approach") == ["risk", "based", "approach"]
    rng = np.random.default_rng(1234)
    alphabet = list("abcdefgXYZ0123456789 \t\n.,;:!?()[]{}%&$-_'\"üßéÖ")
    for _ in range(10_000):
        raw = "".join(rng.choice(alphabet) for _ in range(rng.integers(0, 40)))
        for token in normalize_sentence(raw):
            assert len(token) >= 2
            assert token == token.lower()
            assert any(c.isalpha() for c in token)
    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    _pass(f"preprocessing rules + 10,000-string property in {elapsed:.2f}s (< 5s)")


def test_class_tf_idf_oracle():
    vocab = Vocabulary(("ai", "data", "risk"), (1, 1, 1), "test")
    W = class_tf_idf([["risk", "risk", "ai"], ["data", "ai"]], vocab)
    assert abs(W[0, vocab.index["risk"]] - 2 * math.log(2.25)) <= 1e-9
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(100):
        n_classes = int(rng.integers(1, 11))
        n_terms = int(rng.integers(2, 51))
        words = []
        while len(words) < n_terms:
            w = pseudo_word(rng)
            if w not in words:
                words.append(w)
        classes = [
            [words[rng.integers(n_terms)] for _ in range(rng.integers(1, 60))]
            for _ in range(n_classes)
        ]
        vocab = Vocabulary(tuple(sorted(words)), tuple(1 for _ in words), "test")
        got = class_tf_idf(classes, vocab)
        want = dense_class_tf_idf(classes, vocab.terms)
        worst = max(worst, float(np.max(np.abs(got - want))))
    assert worst <= 1e-9
    _pass(f"class TF-IDF matches dense oracle on 100 corpora (worst |delta| = {worst:.2e})")


def test_mst_oracle():
    rng = np.random.default_rng(88)
    for _ in range(200):
        n = int(rng.integers(2, 65))
        A = rng.uniform(0.0, 10.0, size=(n, n))
        if rng.random() < 0.3:
            A = np.round(A)  # force weight ties
        W = (A + A.T) / 2.0
        np.fill_diagonal(W, 0.0)
        prim_weights = sorted(w for _, _, w in mst(W))
        assert math.fsum(prim_weights) == kruskal_total(W)
    _pass("Prim total weight equals Kruskal oracle exactly on 200 random matrices")


def test_clustering_sanity():
    started = time.monotonic()
    rng = np.random.default_rng(99)
    X, truth = gaussian_blobs(rng, [[0, 0, 0], [40, 0, 0], [0, 40, 0]], 100)
    result = cluster_coordinates(X, ClusterParams(min_cluster_size=10))
    ari = adjusted_rand_score(truth, result.labels)
    assert result.n_clusters == 3
    assert ari >= 0.95
    small = rng.normal(size=(7, 3))
    tiny = cluster_coordinates(small, ClusterParams(min_cluster_size=10))
    assert np.all(tiny.labels == -1)
    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    _pass(f"3 blobs -> 3 clusters (ARI {ari:.3f} >= 0.95), undersized input all noise, {elapsed:.2f}s (< 10s)")


def test_reduction_numerics():
    rng = np.random.default_rng(111)
    worst = 0.0
    for objective, gradient in (
        (attractive_objective, attractive_gradient),
        (repulsive_objective, repulsive_gradient),
    ):
        done = 0
        while done < 500:
            dim = int(rng.integers(2, 6))
            yi = rng.normal(scale=2.0, size=dim)
            yo = rng.normal(scale=2.0, size=dim)
            if float(np.sum((yi - yo) ** 2)) < 0.01:
                continue
            a = float(rng.uniform(0.3, 2.5))
            b = float(rng.uniform(0.6, 1.4))
            grad = gradient(yi, yo, a, b)
            fd = central_difference(lambda y: objective(y, yo, a, b), yi, h=1e-5)
            rel = float(np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-12))
            worst = max(worst, rel)
            done += 1
    assert worst <= 1e-4

    X = rng.normal(size=(120, 16))
    graph = build_fuzzy_graph(X, 12, "euclidean")
    assert np.all(graph.weights > 0.0)
    assert np.all(graph.weights <= 1.0 + 1e-12)

    _, dists = knn(X, 12, "euclidean")
    rho, sigma = smooth_knn(dists, 12)
    sums = np.exp(-np.maximum(0.0, dists - rho[:, None]) / sigma[:, None]).sum(axis=1)
    calib = float(np.abs(sums - math.log2(12)).max())
    assert calib <= 1e-3
    _pass(
        f"gradients within {worst:.2e} of finite differences over 1,000 configs; "
        f"fuzzy weights in (0,1]; calibration within {calib:.2e} of log2(k)"
    )


def test_min_topics_guarantee(tmp_path):
    started = time.monotonic()
    runner = CliRunner()
    root = build_project(
        tmp_path / "demo",
        cluster_plan=[3, 4, 5, 3, 4, 5, 3, 4],
        sentences_per_cluster=35,
        forbidden=STOPWORDS,
    )
    assert runner.invoke(main, ["-C", str(root), "ingest"]).exit_code == 0
    assert runner.invoke(main, ["-C", str(root), "embed", "--seed", "42"]).exit_code == 0
    result = runner.invoke(
        main, ["-C", str(root), "model", "--min-topics", "3", "--seed", "42"]
    )
    assert result.exit_code == 0, result.output
    first = (root / "topics.csv").read_bytes()
    by_doc = read_topics_csv(root / "topics.csv")
    assert len(by_doc) == 8
    for doc_id, doc_topics in by_doc.items():
        assert len(doc_topics) >= 3, doc_id

    result = runner.invoke(
        main, ["-C", str(root), "model", "--min-topics", "3", "--seed", "42"]
    )
    assert result.exit_code == 0
    assert (root / "topics.csv").read_bytes() == first

    tiny = tmp_path / "tiny"
    tiny.mkdir()
    (tiny / "manifest.csv").write_text(
        "doc_id,title,issuer,doc_type,year,era\n01,Tiny,EU HLEG,guideline,2019,pre_ai_act\n"
    )
    (tiny / "texts").mkdir()
    (tiny / "texts" / "01.txt").write_text(
        "Boka dilu mopa. Sefu rila novi. Gatu peli sodu. Vemi lora kipu. Zabu nore tilo."
    )
    assert runner.invoke(main, ["-C", str(tiny), "ingest"]).exit_code == 0
    assert runner.invoke(main, ["-C", str(tiny), "embed"]).exit_code == 0
    failed = runner.invoke(main, ["-C", str(tiny), "model"])
    assert failed.exit_code == 1
    assert "TooFewTopics" in failed.output

    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    _pass(
        f">= 3 topics on all 8 synthetic documents, byte-identical rerun, "
        f"TooFewTopics on 5-sentence document, {elapsed:.1f}s (< 60s)"
    )


def test_paper_fixture_bookkeeping():
    summaries = load_paper_fixture()
    clusters = [s.cluster_count for s in summaries]
    assert clusters == [26, 28, 14, 8, 70, 62, 7, 12]
    assert sum(clusters) == 227
    doc05 = next(s for s in summaries if s.doc_id == "05")
    assert doc05.theme_count == 47

    entries = [make_assignment("01", i, [], False, "a1") for i in range(14)]
    entries += [make_assignment("01", 100 + i, ["Risk"], True, "a1") for i in range(86)]
    assert incoherence_rate(entries) == 0.14

    live = document_summary(
        [make_assignment("01", 0, ["Risk"], True, "a1")], {"01": 26}
    )
    assert live[0].cluster_count == 26
    _pass("fixture reports (26, 28, 14, 8, 70, 62, 7, 12), sum 227, doc 05 -> 47 themes, rate(14/100) = 0.14")


def test_annotation_constraints(tmp_path):
    with pytest.raises(TooManyThemes):
        make_assignment("01", 0, ["a", "b", "c", "d"], True, "a1")
    with pytest.raises(InconsistentAssignment):
        make_assignment("01", 0, ["a"], False, "a1")
    entries = [
        make_assignment("01", 0, ["Risk", "Data governance", "Workers' rights"], True, "a1"),
        make_assignment("01", 1, [], False, "a2"),
        make_assignment("05", 3, ["Rule of law"], True, "joint"),
    ]
    path = tmp_path / "assignments.csv"
    write_assignments(entries, path)
    assert read_assignments(path) == entries
    path2 = tmp_path / "again.csv"
    write_assignments(read_assignments(path), path2)
    assert path2.read_bytes() == path.read_bytes()
    _pass("4-theme and incoherent-with-themes rejected; assignments CSV round trip lossless")


def test_evolution():
    manifest = load_manifest(paper_manifest_path())
    pre_ids = [d.doc_id for d in manifest if d.era == "pre_ai_act"]
    post_ids = [d.doc_id for d in manifest if d.era == "post_ai_act"]
    assert pre_ids == ["01", "02", "03", "04"]
    assert post_ids == ["05", "06", "07", "08"]
    entries = [
        make_assignment(doc_id, 0, [f"Theme {doc_id}"], True, "a1") for doc_id in pre_ids + post_ids
    ]
    pre_cat, post_cat = split_by_era(entries, manifest)
    assert {e.display for e in pre_cat.entries} == {f"Theme {d}" for d in pre_ids}
    assert {e.display for e in post_cat.entries} == {f"Theme {d}" for d in post_ids}

    tied = [
        EvolutionSeries("beta", ((2019, 2),), (2, 0)),
        EvolutionSeries("alpha", ((2020, 2),), (2, 0)),
        EvolutionSeries("gamma", ((2024, 1),), (0, 1)),
    ]
    for _ in range(5):
        assert [s.theme for s in select_series(tied, 2, "top")] == ["alpha", "beta"]
        assert [s.theme for s in select_series(tied, 2, "bottom")] == ["gamma", "alpha"]

    series = [
        EvolutionSeries("a", ((2019, 3), (2024, 1)), (3, 1)),
        EvolutionSeries("b", ((2019, 1), (2025, 6)), (1, 6)),
        EvolutionSeries("c", ((2024, 2),), (0, 2)),
    ]
    bands = stream_layout(series)
    expected = {}
    for s in series:
        for year, count in s.points:
            expected[year] = expected.get(year, 0) + count
    for year, total in expected.items():
        stacked = math.fsum(
            y1 - y0 for band in bands for yy, y0, y1 in band.spans if yy == year
        )
        assert stacked == total
    _pass("era split 01-04 pre / 05-08 post; tie-stable selection; stream totals conserved exactly")


def test_rendering():
    spec = RenderSpec(seed=21)
    entries = []
    for i, count in enumerate([1, 2, 2, 5, 8]):
        for j in range(count):
            entries.append(make_assignment("01", i * 20 + j, [f"Theme {i}"], True, "a1"))
    cat = catalog(entries)
    weighted = wordcloud_weights(cat, spec)
    by_theme = dict(weighted)
    counts = {e.display: e.count for e in cat.entries}
    ordered = sorted(counts, key=counts.get)
    fonts = [by_theme[t] for t in ordered]
    assert fonts == sorted(fonts)

    svg1 = wordcloud_svg(weighted, spec)
    svg2 = wordcloud_svg(weighted, spec)
    assert svg1 == svg2
    root = ET.fromstring(svg1)
    assert root.tag.endswith("svg")
    _pass("SVG parses as XML, word-cloud fonts monotone in counts, fixed-seed renders byte-identical")
