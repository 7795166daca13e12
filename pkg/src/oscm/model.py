"""Instance representation and PACE 2024 OCM file I/O.

Free-layer vertices are stored 0-based everywhere inside the package; the
PACE label ``n0 + 1 + index`` only appears when reading or writing files.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """Raised for malformed PACE input. ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class HeaderError(ParseError):
    pass


class VertexRangeError(ParseError):
    pass


class EdgeCountError(ParseError):
    pass


class DuplicateEdgeError(ParseError):
    pass


class InvalidOrdering(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    """Bipartite graph with fixed layer ``A = 1..n0`` and free layer of size ``n1``.

    ``adjacency[b]`` is the strictly ascending tuple of A-positions adjacent to
    free vertex ``b``.
    """

    n0: int
    n1: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n0 < 0 or self.n1 < 0:
            raise ValueError("layer sizes must be nonnegative")
        if len(self.adjacency) != self.n1:
            raise ValueError(f"expected {self.n1} adjacency lists, got {len(self.adjacency)}")
        for b, nbrs in enumerate(self.adjacency):
            prev = 0
            for a in nbrs:
                if not prev < a <= self.n0:
                    raise ValueError(f"adjacency of free vertex {b} is not strictly ascending in [1, n0]")
                prev = a

    @classmethod
    def from_lists(cls, n0: int, adjacency: Iterable[Iterable[int]]) -> "Instance":
        adj = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
        return cls(n0, len(adj), adj)

    @property
    def m(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency)

    def degree(self, b: int) -> int:
        return len(self.adjacency[b])

    def label(self, b: int) -> int:
        return self.n0 + 1 + b

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    @cached_property
    def incidence(self) -> np.ndarray:
        """Dense 0/1 matrix of shape (n1, n0); column ``a - 1`` is A-position ``a``."""
        inc = np.zeros((self.n1, self.n0), dtype=np.int64)
        for b, nbrs in enumerate(self.adjacency):
            if nbrs:
                inc[b, np.asarray(nbrs) - 1] = 1
        return inc

    def subinstance(self, vertices: Sequence[int]) -> "Instance":
        """Instance induced by the given free vertices, keeping A-positions as is."""
        return Instance(self.n0, len(vertices), tuple(self.adjacency[b] for b in vertices))


@dataclass(frozen=True)
class Solution:
    ordering: tuple[int, ...]
    crossings: int


def check_permutation(perm: Sequence[int], n: int) -> None:
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise InvalidOrdering(f"not a permutation of 0..{n - 1}: {list(perm)[:20]}")


def parse_instance(text: str | Iterable[str]) -> Instance:
    """Parse a PACE OCM file given as a string or an iterable of lines."""
    lines = text.splitlines() if isinstance(text, str) else (ln.rstrip("\n") for ln in text)
    header = None
    adjacency: list[set[int]] = []
    n0 = n1 = m = 0
    edges = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 5 or fields[0] != "p" or fields[1] != "ocr":
                raise HeaderError(lineno, f"expected 'p ocr <n0> <n1> <m>', got {line!r}")
            try:
                n0, n1, m = (int(f) for f in fields[2:])
            except ValueError:
                raise HeaderError(lineno, f"non-integer header field in {line!r}") from None
            if min(n0, n1, m) < 0:
                raise HeaderError(lineno, "negative count in header")
            header = lineno
            adjacency = [set() for _ in range(n1)]
            continue
        if fields[0] == "p":
            raise HeaderError(lineno, "second header line")
        if len(fields) != 2:
            raise ParseError(lineno, f"expected an edge '<a> <b>', got {line!r}")
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex label in {line!r}") from None
        if not (1 <= a <= n0 and n0 < b <= n0 + n1):
            raise VertexRangeError(lineno, f"edge {a} {b} out of range for n0={n0}, n1={n1}")
        edges += 1
        if edges > m:
            raise EdgeCountError(lineno, f"more than the declared {m} edges")
        nbrs = adjacency[b - n0 - 1]
        if a in nbrs:
            raise DuplicateEdgeError(lineno, f"duplicate edge {a} {b}")
        nbrs.add(a)
    if header is None:
        raise HeaderError(0, "missing 'p ocr' header")
    if edges != m:
        raise EdgeCountError(header, f"header declares {m} edges, found {edges}")
    return Instance(n0, n1, tuple(tuple(sorted(nbrs)) for nbrs in adjacency))


def read_instance(path) -> Instance:
    with open(path) as fh:
        return parse_instance(fh)


def format_instance(instance: Instance) -> str:
    out = [f"p ocr {instance.n0} {instance.n1} {instance.m}"]
    for b, nbrs in enumerate(instance.adjacency):
        label = instance.label(b)
        out.extend(f"{a} {label}" for a in nbrs)
    return "\n".join(out) + "\n"


def write_solution(instance: Instance, ordering: Sequence[int]) -> str:
    check_permutation(ordering, instance.n1)
    return "".join(f"{instance.label(b)}\n" for b in ordering)


def parse_solution(instance: Instance, text: str) -> list[int]:
    """Read an ordering file back into 0-based indices.

    Labels are translated but not validated as a permutation; callers use
    :func:`check_permutation` for that.
    """
    perm = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            label = int(line)
        except ValueError:
            raise ParseError(lineno, f"expected a vertex label, got {line!r}") from None
        perm.append(label - instance.n0 - 1)
    return perm
