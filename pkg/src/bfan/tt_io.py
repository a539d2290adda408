"""Truth-table files: ASCII ``TT1`` and packed binary ``TTB``."""

from __future__ import annotations

import os

import numpy as np

from .config import HARD_MAX_N, max_n
from .cube import BooleanFunction
from .errors import DimensionTooLarge, ParseError

TTB_MAGIC = b"BFANTTB1"


def _check_cap(n: int, line=None):
    if n > max_n():
        raise DimensionTooLarge(f"n={n} exceeds the dimension cap {max_n()} (hard max {HARD_MAX_N})")


def format_tt1(f: BooleanFunction) -> str:
    row = np.where(f.table, ord("1"), ord("0")).astype(np.uint8).tobytes().decode("ascii")
    return f"tt1 n={f.n}\n{row}\n"


def parse_tt1(text: str) -> BooleanFunction:
    lines = text.split("\n")
    header = lines[0].strip()
    parts = header.split()
    if len(parts) != 2 or parts[0] != "tt1" or not parts[1].startswith("n="):
        raise ParseError(f"bad header {header!r}, expected 'tt1 n=<n>'", line=1)
    try:
        n = int(parts[1][2:])
    except ValueError:
        raise ParseError(f"bad dimension in header {header!r}", line=1) from None
    if n < 1:
        raise ParseError("dimension must be at least 1", line=1)
    _check_cap(n)
    body = lines[1] if len(lines) > 1 else ""
    rest = [ln for ln in lines[2:] if ln.strip()]
    if rest:
        raise ParseError("unexpected content after the truth table row", line=3)
    body = body.rstrip("\r")
    if len(body) != 1 << n:
        raise ParseError(f"expected {1 << n} table characters, found {len(body)}", line=2)
    raw = np.frombuffer(body.encode("ascii", errors="replace"), dtype=np.uint8)
    bad = np.flatnonzero((raw != ord("0")) & (raw != ord("1")))
    if bad.size:
        raise ParseError(f"invalid character at column {int(bad[0]) + 1}", line=2)
    return BooleanFunction(n, raw == ord("1"))


def format_ttb(f: BooleanFunction) -> bytes:
    packed = np.packbits(f.table, bitorder="little")
    return TTB_MAGIC + bytes([f.n]) + packed.tobytes()


def parse_ttb(data: bytes) -> BooleanFunction:
    if data[:8] != TTB_MAGIC:
        raise ParseError("missing BFANTTB1 magic")
    if len(data) < 9:
        raise ParseError("truncated header")
    n = data[8]
    if n < 1:
        raise ParseError("dimension must be at least 1")
    _check_cap(n)
    nbytes = ((1 << n) + 7) // 8
    payload = data[9:]
    if len(payload) != nbytes:
        raise ParseError(f"expected {nbytes} payload bytes, found {len(payload)}")
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    return BooleanFunction(n, bits[: 1 << n].astype(bool))


def read_function(path: str | os.PathLike) -> BooleanFunction:
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(TTB_MAGIC):
        return parse_ttb(data)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise ParseError("file is neither TT1 text nor TTB binary", line=1) from None
    return parse_tt1(text)


def write_function(f: BooleanFunction, path: str | os.PathLike, binary: bool = False) -> None:
    if binary:
        with open(path, "wb") as fh:
            fh.write(format_ttb(f))
    else:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(format_tt1(f))
