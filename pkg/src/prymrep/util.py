"""Canonical serialization and content hashing shared across modules."""

from __future__ import annotations

import hashlib
import json


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, no whitespace, ints only."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def matrix_to_lists(M) -> list:
    return [[int(x) for x in row] for row in M]


def vector_to_list(v) -> list:
    return [int(x) for x in v]
