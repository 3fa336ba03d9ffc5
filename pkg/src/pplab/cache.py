"""On-disk persistence for series and bivariate tables.

A cache file is one JSON header line followed by the table body.  The
header records the format version, the table type and kind, the body
length in bytes and its sha256 digest; loading checks all of them.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .series import BigIntSeries, BivariateTable

FORMAT_NAME = "pplab-table"
FORMAT_VERSION = 1


class CacheError(Exception):
    pass


def _body(table) -> tuple[str, str]:
    if isinstance(table, BigIntSeries):
        return "BigIntSeries", table.to_json()
    if isinstance(table, BivariateTable):
        return "BivariateTable", table.to_json()
    raise TypeError(f"cannot cache {type(table).__name__}")


def cache_store(path, table) -> Path:
    path = Path(path)
    ttype, body = _body(table)
    data = body.encode()
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "type": ttype,
        "kind": table.kind,
        "length": len(data),
        "sha256": hashlib.sha256(data).hexdigest(),
    }
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n" + data)
    os.replace(tmp, path)
    return path


def _decode(ttype: str, body: dict):
    if ttype == "BigIntSeries":
        coeffs = [int(v) for _, v in sorted((int(n), v) for n, v in body["rows"])]
        if len(coeffs) != body["order"] + 1:
            raise CacheError("series rows do not cover the stated order")
        return BigIntSeries(tuple(coeffs), body["kind"])
    conv = int if body["exact"] else float
    entries = {(int(n), int(t)): conv(v) for n, t, v in body["rows"]}
    return BivariateTable(entries, body["order"], body["kind"], body["exact"], body["params"])


def cache_load(path, kind: str | None = None, type_: str | None = None):
    """Load a table; ``kind`` and ``type_`` (when given) must match the header."""
    raw = Path(path).read_bytes()
    head, sep, data = raw.partition(b"\n")
    if not sep:
        raise CacheError("partial file: missing header terminator")
    try:
        header = json.loads(head)
    except ValueError as exc:
        raise CacheError(f"unreadable header: {exc}") from None
    if header.get("format") != FORMAT_NAME:
        raise CacheError("not a table cache file")
    if header.get("version") != FORMAT_VERSION:
        raise CacheError(f"format version {header.get('version')} != {FORMAT_VERSION}")
    if len(data) != header.get("length"):
        raise CacheError(f"partial file: {len(data)} of {header.get('length')} bytes")
    if hashlib.sha256(data).hexdigest() != header.get("sha256"):
        raise CacheError("checksum mismatch")
    if kind is not None and header["kind"] != kind:
        raise CacheError(f"kind mismatch: file holds {header['kind']!r}, expected {kind!r}")
    if type_ is not None and header["type"] != type_:
        raise CacheError(f"type mismatch: file holds {header['type']}, expected {type_}")
    return _decode(header["type"], json.loads(data))
