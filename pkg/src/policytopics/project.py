"""Project directory layout and provenance bookkeeping.

All pipeline state is plain files in one directory; ``project.json`` records
the flags each stage ran with. Re-running an earlier stage never deletes
downstream outputs: they are renamed with a ``.superseded-N`` suffix.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import PolicyTopicsError

STAGE_ORDER = ("ingest", "embed", "model", "annotate", "aggregate")


class Project:
    def __init__(self, root):
        self.root = Path(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.csv"

    @property
    def texts_dir(self) -> Path:
        return self.root / "texts"

    @property
    def sentences_path(self) -> Path:
        return self.root / "sentences.csv"

    @property
    def embeddings_path(self) -> Path:
        return self.root / "embeddings.emb1"

    @property
    def topics_path(self) -> Path:
        return self.root / "topics.csv"

    @property
    def representatives_path(self) -> Path:
        return self.root / "representatives.csv"

    @property
    def assignments_path(self) -> Path:
        return self.root / "assignments.csv"

    @property
    def stale_assignments_path(self) -> Path:
        return self.root / "assignments_stale.csv"

    @property
    def themes_path(self) -> Path:
        return self.root / "themes.csv"

    @property
    def evolution_path(self) -> Path:
        return self.root / "evolution.json"

    @property
    def renders_dir(self) -> Path:
        return self.root / "renders"

    @property
    def meta_path(self) -> Path:
        return self.root / "project.json"

    def text_path(self, doc_id: str) -> Path:
        return self.texts_dir / f"{doc_id}.txt"

    def load_meta(self) -> dict:
        if not self.meta_path.exists():
            return {"schema": 1, "stages": {}, "revision": 0}
        with open(self.meta_path, encoding="utf-8") as fh:
            return json.load(fh)

    def save_meta(self, meta: dict) -> None:
        with open(self.meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def record_stage(self, stage: str, settings: dict) -> None:
        meta = self.load_meta()
        meta["revision"] = meta.get("revision", 0) + 1
        meta.setdefault("stages", {})[stage] = {
            "settings": settings,
            "revision": meta["revision"],
        }
        self.save_meta(meta)

    def require(self, path: Path, producer: str) -> Path:
        if not path.exists():
            raise PolicyTopicsError(
                f"missing {path.name}; run `policytopics {producer}` first"
            )
        return path

    def _supersede(self, path: Path) -> None:
        if not path.exists():
            return
        n = 1
        while True:
            target = path.with_name(f"{path.name}.superseded-{n}")
            if not target.exists():
                break
            n += 1
        os.replace(path, target)

    def invalidate_downstream(self, stage: str) -> None:
        """Rename outputs of later stages out of the way."""
        downstream: list[Path] = []
        order = STAGE_ORDER.index(stage)
        if order < STAGE_ORDER.index("embed"):
            downstream.append(self.embeddings_path)
        if order < STAGE_ORDER.index("model"):
            downstream += [self.topics_path, self.representatives_path]
        if order < STAGE_ORDER.index("annotate"):
            downstream += [self.assignments_path, self.stale_assignments_path]
        if order < STAGE_ORDER.index("aggregate"):
            downstream += [self.themes_path, self.evolution_path, self.renders_dir]
        for path in downstream:
            self._supersede(path)
