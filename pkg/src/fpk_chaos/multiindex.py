"""Finite multi-index sets and Ornstein-Uhlenbeck eigenvalues."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigError, SizingError

SCHEMES = ("tensor", "total")
DEFAULT_CARDINALITY_CAP = 20000


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Hermite degree per retained mode."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if any(e < 0 for e in entries):
            raise ValueError(f"negative entry in multi-index {entries}")
        object.__setattr__(self, "entries", entries)

    @property
    def degree(self) -> int:
        return sum(self.entries)

    @property
    def M(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __add__(self, other: MultiIndex) -> MultiIndex:
        if len(other) != len(self):
            raise ValueError("multi-index lengths differ")
        return MultiIndex(tuple(a + b for a, b in zip(self, other)))

    @classmethod
    def zero(cls, M: int) -> MultiIndex:
        return cls((0,) * M)

    @classmethod
    def unit(cls, M: int, k: int, times: int = 1) -> MultiIndex:
        """``times`` copies of the unit vector in mode ``k`` (0-based)."""
        e = [0] * M
        e[k] = times
        return cls(tuple(e))


@dataclass(frozen=True)
class IndexSet:
    """An ordered, duplicate-free collection of multi-indices of common length M."""

    indices: tuple[MultiIndex, ...]
    scheme: str
    M: int
    N: int
    _positions: dict = field(init=False, repr=False, compare=False)
    _array: np.ndarray = field(init=False, repr=False, compare=False)
    _hash: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        positions = {}
        for p, idx in enumerate(self.indices):
            if len(idx) != self.M:
                raise ValueError(f"index {idx.entries} does not have length {self.M}")
            if idx in positions:
                raise ValueError(f"duplicate index {idx.entries}")
            positions[idx] = p
        arr = np.array([idx.entries for idx in self.indices], dtype=np.int64).reshape(-1, self.M)
        arr.setflags(write=False)
        object.__setattr__(self, "_positions", positions)
        object.__setattr__(self, "_array", arr)
        object.__setattr__(self, "_hash", _build_hash(arr))

    def __len__(self):
        return len(self.indices)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.indices)

    def __getitem__(self, p: int) -> MultiIndex:
        return self.indices[p]

    def __contains__(self, idx) -> bool:
        return _as_index(idx) in self._positions

    def position(self, idx) -> int:
        """Row of ``idx`` in the ordering; raises KeyError when absent."""
        return self._positions[_as_index(idx)]

    @property
    def array(self) -> np.ndarray:
        """Read-only ``(len, M)`` integer array of the entries."""
        return self._array

    @property
    def degrees(self) -> np.ndarray:
        return self._array.sum(axis=1)

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Positions of each row of an ``(n, M)`` integer array; -1 where absent."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.M)
        mult, order, sorted_h = self._hash
        h = _row_hash(rows, mult)
        loc = np.searchsorted(sorted_h, h)
        loc = np.minimum(loc, len(sorted_h) - 1)
        pos = order[loc]
        found = (sorted_h[loc] == h) & np.all(self._array[pos] == rows, axis=1)
        return np.where(found, pos, -1)

    def first_chaos(self) -> list[int]:
        """Positions of the unit indices, ordered by mode."""
        return [self.position(MultiIndex.unit(self.M, k)) for k in range(self.M)
                if MultiIndex.unit(self.M, k) in self]


def _row_hash(rows: np.ndarray, mult: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return (rows.astype(np.uint64) * mult).sum(axis=1, dtype=np.uint64)


def _build_hash(arr: np.ndarray):
    # multiplicative hash; membership is confirmed by comparing entries
    rng = np.random.default_rng(20240611)
    mult = rng.integers(1, 2 ** 63, size=arr.shape[1], dtype=np.uint64) | np.uint64(1)
    h = _row_hash(arr, mult)
    order = np.argsort(h, kind="stable")
    return mult, order, h[order]


def _as_index(idx) -> MultiIndex:
    return idx if isinstance(idx, MultiIndex) else MultiIndex(tuple(idx))


def cardinality(M: int, N: int, scheme: str) -> int:
    if scheme == "tensor":
        return (N + 1) ** M
    if scheme == "total":
        return math.comb(M + N, N)
    raise ConfigError(f"unknown index scheme {scheme!r}; expected one of {SCHEMES}")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` non-negative ints summing to ``total``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_indices(M: int, N: int, scheme: str = "total",
                      cap: int = DEFAULT_CARDINALITY_CAP) -> IndexSet:
    """Enumerate the tensor (``max <= N``) or total-degree (``sum <= N``) set.

    Indices come out in graded-lexicographic order, so the zero index is
    always at position 0.
    """
    if M < 1:
        raise ConfigError(f"mode count M must be >= 1, got {M}")
    if N < 0:
        raise ConfigError(f"degree cap N must be >= 0, got {N}")
    size = cardinality(M, N, scheme)
    if size > cap:
        raise SizingError(f"index set ({scheme}, M={M}, N={N}) has {size} elements, cap is {cap}")

    max_degree = N if scheme == "total" else N * M
    out = []
    for d in range(max_degree + 1):
        for entries in _compositions(d, M):
            if scheme == "tensor" and max(entries) > N:
                continue
            out.append(MultiIndex(entries))
    return IndexSet(tuple(out), scheme, M, N)


def ou_eigenvalue(n, spectrum: Sequence[float]) -> float:
    """``sum_k n_k * spectrum[k]``, the OU eigenvalue of the Hermite functional ``H_n``."""
    entries = n.entries if isinstance(n, MultiIndex) else tuple(n)
    if len(spectrum) < len(entries):
        raise ValueError(f"spectrum has {len(spectrum)} modes, index needs {len(entries)}")
    return float(sum(e * lam for e, lam in zip(entries, spectrum) if e))


def ou_eigenvalues(index_set: IndexSet, spectrum: Sequence[float]) -> np.ndarray:
    """Vectorized :func:`ou_eigenvalue` over a whole index set."""
    lam = np.asarray(spectrum, dtype=float)[: index_set.M]
    if lam.size < index_set.M:
        raise ValueError(f"spectrum has {lam.size} modes, index set needs {index_set.M}")
    return index_set.array @ lam


def embed(index_set: IndexSet, M: int) -> list[MultiIndex]:
    """Zero-pad every index of ``index_set`` to length ``M``."""
    if M < index_set.M:
        raise ValueError("cannot embed into fewer modes")
    pad = (0,) * (M - index_set.M)
    return [MultiIndex(idx.entries + pad) for idx in index_set]
