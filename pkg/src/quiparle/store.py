"""File-backed store for documents, annotations and reports.

Layout: one directory per outlet, one JSON file per article, plus a single
index file. Every record is wrapped in a checksummed envelope; annotations
additionally remember the pipeline-config hash that produced them, so a
config change marks them stale instead of silently serving old output.
Writers take an exclusive lock on the store; readers go lock-free.
"""

from __future__ import annotations

import datetime
import fcntl
import hashlib
import json
import re
from contextlib import contextmanager
from pathlib import Path

from .annotate import ArticleAnnotation, annotation_to_dict, parse_annotation


class StoreError(RuntimeError):
    pass


class NotFoundError(StoreError):
    pass


class IntegrityError(StoreError):
    pass


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _slug(name: str) -> str:
    safe = re.sub(r"[^A-Za-z0-9_.-]+", "-", name).strip("-") or "x"
    digest = hashlib.sha1(name.encode("utf-8")).hexdigest()[:8]
    return f"{safe[:60]}-{digest}"


class Store:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "documents").mkdir(exist_ok=True)
        (self.root / "annotations").mkdir(exist_ok=True)
        self._index_path = self.root / "index.json"
        if not self._index_path.exists():
            self._index_path.write_text("{}", encoding="utf-8")

    @contextmanager
    def _write_lock(self):
        lock_path = self.root / ".lock"
        with open(lock_path, "w") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def _index(self) -> dict:
        return json.loads(self._index_path.read_text(encoding="utf-8"))

    def _save_index(self, index: dict):
        self._index_path.write_text(
            json.dumps(index, ensure_ascii=False, indent=1, sort_keys=True),
            encoding="utf-8")

    def _write_envelope(self, path: Path, payload: dict, extra=None) -> str:
        envelope = {"checksum": _checksum(payload), "payload": payload}
        if extra:
            envelope.update(extra)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(envelope, ensure_ascii=False),
                        encoding="utf-8")
        return envelope["checksum"]

    def _read_envelope(self, path: Path) -> dict:
        if not path.exists():
            raise NotFoundError(str(path))
        try:
            envelope = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise IntegrityError(f"{path}: not valid JSON ({exc})") from exc
        payload = envelope.get("payload")
        if payload is None or _checksum(payload) != envelope.get("checksum"):
            raise IntegrityError(f"{path}: checksum mismatch")
        return envelope

    def put_document(self, doc: dict) -> bool:
        """Store an interchange document; identical content is a no-op."""
        doc_id = doc["doc_id"]
        path = (self.root / "documents" / _slug(doc.get("outlet", "unknown"))
                / f"{_slug(doc_id)}.json")
        with self._write_lock():
            if path.exists():
                existing = self._read_envelope(path)
                if existing["checksum"] == _checksum(doc):
                    return False
            self._write_envelope(path, doc)
            index = self._index()
            entry = index.get(doc_id, {})
            entry.update({
                "outlet": doc.get("outlet", "unknown"),
                "published_at": doc.get("published_at", ""),
                "document": str(path.relative_to(self.root)),
            })
            index[doc_id] = entry
            self._save_index(index)
        return True

    def get_document(self, doc_id: str) -> dict:
        index = self._index()
        if doc_id not in index or "document" not in index[doc_id]:
            raise NotFoundError(f"no document {doc_id!r}")
        return self._read_envelope(self.root / index[doc_id]["document"])["payload"]

    def put_annotation(self, annotation: ArticleAnnotation,
                       config_hash: str) -> bool:
        payload = annotation_to_dict(annotation)
        path = (self.root / "annotations" / _slug(annotation.outlet)
                / f"{_slug(annotation.doc_id)}.json")
        with self._write_lock():
            if path.exists():
                existing = self._read_envelope(path)
                if existing["checksum"] == _checksum(payload) \
                        and existing.get("config_hash") == config_hash:
                    return False
            self._write_envelope(path, payload, {"config_hash": config_hash})
            index = self._index()
            entry = index.get(annotation.doc_id, {})
            entry.update({
                "outlet": annotation.outlet,
                "published_at": annotation.published_at.isoformat(),
                "annotation": str(path.relative_to(self.root)),
                "config_hash": config_hash,
            })
            index[annotation.doc_id] = entry
            self._save_index(index)
        return True

    def get_annotation(self, doc_id: str):
        """(annotation, config_hash) for one article."""
        index = self._index()
        if doc_id not in index or "annotation" not in index[doc_id]:
            raise NotFoundError(f"no annotation for {doc_id!r}")
        envelope = self._read_envelope(self.root / index[doc_id]["annotation"])
        return parse_annotation(envelope["payload"]), envelope.get("config_hash")

    def list(self, window=None, outlet=None, current_config_hash=None) -> list:
        """Index entries, optionally filtered, with staleness flags."""
        out = []
        for doc_id, entry in sorted(self._index().items()):
            if outlet is not None and entry.get("outlet") != outlet:
                continue
            date = entry.get("published_at") or None
            published = datetime.date.fromisoformat(date) if date else None
            if window is not None and published is not None:
                start, end = window
                if start is not None and published < start:
                    continue
                if end is not None and published > end:
                    continue
            record = {
                "doc_id": doc_id,
                "outlet": entry.get("outlet"),
                "published_at": published,
                "has_document": "document" in entry,
                "has_annotation": "annotation" in entry,
                "config_hash": entry.get("config_hash"),
            }
            if current_config_hash is not None:
                record["stale"] = (
                    "annotation" not in entry
                    or entry.get("config_hash") != current_config_hash
                )
            out.append(record)
        return out
