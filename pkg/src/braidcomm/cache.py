"""
On-disk cache for coset tables.

Tables are stored twice over: ``tables/<digest>.json`` holds the table itself
(so serialized transvection elements can refer to their domain by digest),
and ``keys/<key>.json`` maps a build recipe to a digest. A recipe key is the
sha256 of (schema, n, kind, params). All writes go to a temporary file in the
same directory followed by ``os.replace``, so readers never see partial files.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Callable, Optional

from .fpgroups import TABLE_SCHEMA, CosetTable, SchemaError

KEY_SCHEMA = "braidcomm-cache-v1"


class CacheCorruptionError(RuntimeError):
    """A cached file exists but cannot be read back."""


def recipe_key(n: int, kind: str, params: dict) -> str:
    payload = json.dumps(
        {"schema": KEY_SCHEMA, "table_schema": TABLE_SCHEMA, "n": n, "kind": kind, "params": params},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def atomic_write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, separators=(",", ":"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CacheCorruptionError(f"{path}: {exc}") from None


class TableCache:
    """Memory-backed table store, optionally persisted under ``root``."""

    def __init__(self, root: Optional[os.PathLike] = None):
        self.root = Path(root) if root is not None else None
        self._by_digest: dict[str, CosetTable] = {}
        self._by_key: dict[str, str] = {}

    def put(self, table: CosetTable) -> str:
        digest = table.digest
        self._by_digest[digest] = table
        if self.root is not None:
            path = self.root / "tables" / f"{digest}.json"
            if not path.exists():
                atomic_write_json(path, table.to_json())
        return digest

    def get(self, digest: str) -> CosetTable:
        if digest in self._by_digest:
            return self._by_digest[digest]
        if self.root is None:
            raise KeyError(f"unknown table {digest}")
        path = self.root / "tables" / f"{digest}.json"
        if not path.exists():
            raise KeyError(f"unknown table {digest}")
        try:
            table = CosetTable.from_json(_read_json(path))
        except (SchemaError, ValueError, KeyError) as exc:
            raise CacheCorruptionError(f"{path}: {exc}") from None
        if table.digest != digest:
            raise CacheCorruptionError(f"{path}: content digest is {table.digest}")
        self._by_digest[digest] = table
        return table

    def build(self, n: int, kind: str, params: dict, make: Callable[[], CosetTable]) -> CosetTable:
        """Return the table for a recipe, running ``make`` only on a miss."""
        key = recipe_key(n, kind, params)
        digest = self._by_key.get(key)
        if digest is None and self.root is not None:
            path = self.root / "keys" / f"{key}.json"
            if path.exists():
                doc = _read_json(path)
                if doc.get("schema") != KEY_SCHEMA:
                    raise CacheCorruptionError(f"{path}: schema {doc.get('schema')!r}")
                digest = doc["digest"]
        if digest is not None:
            try:
                table = self.get(digest)
            except KeyError:
                raise CacheCorruptionError(f"recipe {kind} points at missing table {digest}") from None
            self._by_key[key] = digest
            return table
        table = make()
        digest = self.put(table)
        self._by_key[key] = digest
        if self.root is not None:
            atomic_write_json(
                self.root / "keys" / f"{key}.json",
                {"schema": KEY_SCHEMA, "n": n, "kind": kind, "params": params, "digest": digest},
            )
        return table
