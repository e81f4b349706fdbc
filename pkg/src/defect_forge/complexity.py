"""Integer complexity tables.

``build_table`` fills a dense ``uint8`` array of ||n|| (least number of ones
needed to write n with + and *) by dynamic programming. ``oracle_complexity``
is an independent forward closure used to check it.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from math import isqrt
from pathlib import Path

import numpy as np
from numba import njit

from .errors import ArgumentError, RangeError, ResourceError, TableFormatError

MAGIC = b"ICT1"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sBQ")  # magic, version, limit

# uint8 entries hold ||n|| <= 3 log2 n < 255 for n < 2**85.
MAX_LIMIT = 2**40
ORACLE_GUARD = 10**4


def selfridge_E(k: int) -> int:
    """Largest integer writable with k ones."""
    if k < 1:
        raise ArgumentError(f"k must be positive, got {k}")
    if k == 1:
        return 1
    j, rem = divmod(k, 3)
    if rem == 0:
        return 3**j
    if rem == 1:
        return 4 * 3 ** (j - 1)
    return 2 * 3**j


def _E_array(cap: int) -> np.ndarray:
    # E(0) is taken as 0: nothing is writable with zero ones.
    out = np.zeros(256, dtype=np.int64)
    for k in range(1, 256):
        out[k] = min(selfridge_E(k), cap)
    return out


@njit(cache=True)
def _fill(limit, E, paranoid):
    c = np.zeros(limit + 1, dtype=np.uint8)
    mult = np.full(limit + 1, 255, dtype=np.uint8)
    c[1] = 1
    for n in range(2, limit + 1):
        u = np.int64(c[n - 1]) + 1
        if mult[n] < u:
            u = np.int64(mult[n])
        half = n // 2
        a = 1
        if paranoid:
            while a <= half:
                v = np.int64(c[a]) + np.int64(c[n - a])
                if v < u:
                    u = v
                a += 1
        else:
            # Some optimal split has a summand of complexity <= ||n||/2,
            # hence value <= E(||n||/2) <= E(u/2); u only shrinks.
            while a <= half and a <= E[u // 2]:
                v = np.int64(c[a]) + np.int64(c[n - a])
                if v < u:
                    u = v
                a += 1
        c[n] = u
        d = 2
        while d <= n and d * n <= limit:
            v = np.int64(c[d]) + u
            if v < mult[d * n]:
                mult[d * n] = v
            d += 1
    return c


@dataclass(frozen=True, eq=False)
class ComplexityTable:
    """Dense table of ||n|| for 1 <= n <= limit.

    ``entries`` has length ``limit + 1``; index 0 is unused and holds 0.
    """

    limit: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)

    def __getitem__(self, n: int) -> int:
        return complexity(self, n)

    def __eq__(self, other):
        if not isinstance(other, ComplexityTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.entries, other.entries)

    def check_range(self, n: int, low: int = 1) -> None:
        if not low <= n <= self.limit:
            raise RangeError(f"n={n} outside [{low}, {self.limit}]")

    def prefix(self, limit: int) -> "ComplexityTable":
        """The table ``build_table(limit)`` would produce, sliced out of this one."""
        self.check_range(limit)
        return ComplexityTable(limit, self.entries[: limit + 1])

    def to_bytes(self) -> bytes:
        return HEADER.pack(MAGIC, FORMAT_VERSION, self.limit) + self.entries[1:].tobytes()

    def checksum(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())


def build_table(limit: int, paranoid: bool = False) -> ComplexityTable:
    """Compute ||n|| for every n <= limit.

    With ``paranoid`` the additive pass scans every split a + b = n instead of
    only summands a <= E(u // 2); this is quadratic and meant for audits.
    """
    if not isinstance(limit, (int, np.integer)) or isinstance(limit, bool):
        raise ArgumentError(f"limit must be an integer, got {limit!r}")
    limit = int(limit)
    if limit < 1:
        raise ArgumentError(f"limit must be >= 1, got {limit}")
    if limit > MAX_LIMIT:
        raise ResourceError(f"limit {limit} exceeds supported maximum {MAX_LIMIT}")
    try:
        entries = _fill(limit, _E_array(limit), bool(paranoid))
    except MemoryError as exc:
        raise ResourceError(f"cannot allocate table of {limit} entries") from exc
    return ComplexityTable(limit, entries)


def complexity(table: ComplexityTable, n: int) -> int:
    table.check_range(n)
    return int(table.entries[n])


def table_from_bytes(data: bytes) -> ComplexityTable:
    if len(data) < HEADER.size:
        raise TableFormatError("file shorter than header")
    magic, version, limit = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TableFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise TableFormatError(f"unsupported format version {version}")
    if len(data) != HEADER.size + limit:
        raise TableFormatError(
            f"length mismatch: header says {limit} entries, file has {len(data) - HEADER.size}"
        )
    if limit < 1:
        raise TableFormatError("empty table")
    entries = np.zeros(limit + 1, dtype=np.uint8)
    entries[1:] = np.frombuffer(data, dtype=np.uint8, offset=HEADER.size)
    for n, expected in ((1, 1), (2, 2), (3, 3)):
        if n <= limit and entries[n] != expected:
            raise TableFormatError(f"spot check failed: entry {n} is {entries[n]}, expected {expected}")
    return ComplexityTable(limit, entries)


def load_table(path) -> ComplexityTable:
    return table_from_bytes(Path(path).read_bytes())


def oracle_complexity(bound: int) -> dict[int, int]:
    """Brute-force ||n|| for n <= bound by closing {1} under + and *.

    Level k holds the numbers of complexity exactly k; a minimal expression
    for n splits into minimal subexpressions whose values never exceed n.
    """
    if bound < 1:
        raise ArgumentError(f"bound must be >= 1, got {bound}")
    if bound > ORACLE_GUARD:
        raise ArgumentError(f"oracle bound {bound} above guard {ORACLE_GUARD}")
    found = np.zeros(bound + 1, dtype=bool)
    found[1] = True
    levels: dict[int, np.ndarray] = {1: np.array([1], dtype=np.int64)}
    result = {1: 1}
    k = 1
    while len(result) < bound:
        k += 1
        new = []
        for i in range(1, k // 2 + 1):
            a, b = levels[i], levels[k - i]
            if not len(a) or not len(b):
                continue
            s = np.add.outer(a, b).ravel()
            p = np.multiply.outer(a, b).ravel()
            both = np.concatenate([s, p])
            new.append(both[both <= bound])
        vals = np.unique(np.concatenate(new)) if new else np.array([], dtype=np.int64)
        vals = vals[~found[vals]]
        found[vals] = True
        levels[k] = vals
        for v in vals.tolist():
            result[v] = k
    return result


def E_from_table(table: ComplexityTable, k: int) -> int:
    """max{n <= limit : ||n|| <= k}, read off the table."""
    if k < 1:
        raise ArgumentError(f"k must be positive, got {k}")
    if selfridge_E(k) > table.limit:
        raise RangeError(f"E({k}) = {selfridge_E(k)} exceeds table limit {table.limit}")
    hits = np.flatnonzero(table.entries[1:] <= k)
    return int(hits[-1]) + 1


def good_addition_splits(table: ComplexityTable, n: int) -> list[tuple[int, int]]:
    table.check_range(n, low=2)
    e = table.entries
    a = np.arange(1, n // 2 + 1)
    ok = e[a].astype(np.int32) + e[n - a] == e[n]
    return [(int(x), n - int(x)) for x in a[ok]]


def good_factorizations(table: ComplexityTable, n: int) -> list[tuple[int, int]]:
    table.check_range(n, low=2)
    e = table.entries
    target = int(e[n])
    return [
        (d, n // d)
        for d in range(2, isqrt(n) + 1)
        if n % d == 0 and int(e[d]) + int(e[n // d]) == target
    ]

