"""Directory-of-JSON-documents store.

One subdirectory per document kind, one file per id, written atomically
(temp file + rename) so a crash mid-write never clobbers the committed
version. Deliberately not a database: single-operator workloads, and the
files stay inspectable.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import CorruptDocument, DocumentNotFound
from .serialize import pretty_json

STORE_SCHEMA_VERSION = 1

KINDS = ("screenplay", "session", "marks", "report", "transcript")


class DocumentStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, doc_id: str) -> Path:
        if kind not in KINDS:
            raise ValueError(f"unknown document kind: {kind!r}")
        return self.root / kind / f"{doc_id}.json"

    def put(self, kind: str, doc_id: str, payload: dict | list) -> Path:
        path = self._path(kind, doc_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        envelope = {
            "kind": kind,
            "id": doc_id,
            "version": STORE_SCHEMA_VERSION,
            "payload": payload,
        }
        # write-temp-then-rename: readers only ever see a committed version
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(pretty_json(envelope))
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp_name, path)
        finally:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
        return path

    def get(self, kind: str, doc_id: str) -> dict | list:
        path = self._path(kind, doc_id)
        if not path.exists():
            raise DocumentNotFound(f"{kind}/{doc_id}")
        try:
            envelope = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptDocument(f"{kind}/{doc_id}: {exc}") from exc
        if (
            not isinstance(envelope, dict)
            or envelope.get("kind") != kind
            or envelope.get("id") != doc_id
            or "payload" not in envelope
            or "version" not in envelope
        ):
            raise CorruptDocument(f"{kind}/{doc_id}: bad envelope")
        return envelope["payload"]

    def exists(self, kind: str, doc_id: str) -> bool:
        return self._path(kind, doc_id).exists()

    def list_ids(self, kind: str) -> list[str]:
        folder = self.root / kind
        if kind not in KINDS:
            raise ValueError(f"unknown document kind: {kind!r}")
        if not folder.exists():
            return []
        return sorted(p.stem for p in folder.glob("*.json"))
