"""Simplicial complexes with a full codimension-1 skeleton.

Vertices are 0-based internally; all file formats and CLI output use
1-based labels. Faces of dimension d are sorted (d+1)-tuples of vertex
ids, indexed by their colexicographic rank.
"""

from __future__ import annotations

import json
import math
import random
from typing import Iterable, Iterator, Sequence


# ---------------------------------------------------------------------------
# colexicographic face indexing


def rank_face(face: Sequence[int]) -> int:
    """Colex rank of a strictly increasing vertex tuple.

    rank((v0,..,vk)) = sum_i C(v_i, i+1); a bijection from k-subsets of
    [0, n) onto [0, C(n, k+1)) for every n > max(face).
    """
    return sum(math.comb(v, i + 1) for i, v in enumerate(face))


def unrank_face(r: int, k: int) -> tuple[int, ...]:
    """Inverse of rank_face for k-element faces."""
    if r < 0:
        raise ValueError(f"rank must be nonnegative, got {r}")
    face = [0] * k
    for i in range(k - 1, -1, -1):
        v = i  # smallest admissible id at position i
        while math.comb(v + 1, i + 1) <= r:
            v += 1
        face[i] = v
        r -= math.comb(v, i + 1)
    if r != 0:
        raise ValueError("rank does not correspond to a valid face")
    return tuple(face)


def _validate_face(face: Sequence[int], n: int, d: int) -> tuple[int, ...]:
    t = tuple(face)
    if len(t) != d + 1:
        raise ValueError(f"face {t} must have {d + 1} vertices")
    for i, v in enumerate(t):
        if not isinstance(v, int):
            raise ValueError(f"vertex ids must be ints, got {v!r}")
        if v < 0 or v >= n:
            raise ValueError(f"vertex {v} out of range [0, {n})")
        if i > 0 and t[i - 1] >= v:
            raise ValueError(f"face {t} must be strictly increasing")
    return t


def rank_triple(t: Sequence[int], n: int) -> int:
    """Colex rank of a triple among all C(n,3) triples: C(v2,3)+C(v1,2)+C(v0,1)."""
    return rank_face(_validate_face(t, n, 2))


def unrank_triple(r: int, n: int) -> tuple[int, int, int]:
    if not 0 <= r < math.comb(n, 3):
        raise ValueError(f"rank {r} out of range [0, C({n},3))")
    return unrank_face(r, 3)  # type: ignore[return-value]


def triples_colex(n: int) -> Iterator[tuple[int, int, int]]:
    """All triples of [0, n) in colex order, i.e. by increasing rank_face."""
    for c in range(2, n):
        for b in range(1, c):
            for a in range(b):
                yield (a, b, c)


def rank_edge(e: Sequence[int]) -> int:
    a, b = e
    return math.comb(b, 2) + a


def unrank_edge(r: int) -> tuple[int, int]:
    b = 1
    while math.comb(b + 1, 2) <= r:
        b += 1
    return (r - math.comb(b, 2), b)


def edges_colex(n: int) -> Iterator[tuple[int, int]]:
    for b in range(1, n):
        for a in range(b):
            yield (a, b)


def face_edges(face: Sequence[int]) -> list[tuple[int, int]]:
    """The three edges of a triangle (or all 2-subsets of a larger face)."""
    k = len(face)
    return [(face[i], face[j]) for i in range(k) for j in range(i + 1, k)]


def iterated_log(x: float, i: int) -> float:
    """Natural logarithm applied i times; raises if an intermediate value is <= 0."""
    if i < 0:
        raise ValueError("iteration count must be nonnegative")
    v = float(x)
    for _ in range(i):
        if v <= 0.0:
            raise ValueError(f"iterated log undefined: intermediate value {v} <= 0")
        v = math.log(v)
    return v


# ---------------------------------------------------------------------------
# the complex


class Complex:
    """An n-vertex complex with full (dim-1)-skeleton and an explicit face set.

    Lower-dimensional faces are implicit: every edge (and vertex) exists.
    For dim=2 a per-edge count of incident triangles is maintained
    incrementally, indexed by colex edge rank.
    """

    __slots__ = ("n", "dim", "faces", "edge_cover_count")

    def __init__(self, n: int, dim: int = 2, faces: Iterable[Sequence[int]] = ()):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        if dim < 1:
            raise ValueError(f"need dim >= 1, got {dim}")
        self.n = n
        self.dim = dim
        self.faces: set[tuple[int, ...]] = set()
        self.edge_cover_count: list[int] | None = (
            [0] * math.comb(n, 2) if dim == 2 else None
        )
        for f in faces:
            self.add_face(f)

    def add_face(self, face: Sequence[int]) -> bool:
        """Insert a face; returns False if it was already present."""
        t = _validate_face(face, self.n, self.dim)
        if t in self.faces:
            return False
        self.faces.add(t)
        if self.edge_cover_count is not None:
            for e in face_edges(t):
                self.edge_cover_count[rank_edge(e)] += 1
        return True

    def has_face(self, face: Sequence[int]) -> bool:
        return tuple(face) in self.faces

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def total_possible_faces(self) -> int:
        return math.comb(self.n, self.dim + 1)

    def faces_sorted(self) -> list[tuple[int, ...]]:
        """Faces in colex order (deterministic column order for boundary maps)."""
        return sorted(self.faces, key=rank_face)

    def copy(self) -> "Complex":
        other = Complex.__new__(Complex)
        other.n = self.n
        other.dim = self.dim
        other.faces = set(self.faces)
        other.edge_cover_count = (
            list(self.edge_cover_count) if self.edge_cover_count is not None else None
        )
        return other

    @classmethod
    def full(cls, n: int, dim: int = 2) -> "Complex":
        from itertools import combinations

        return cls(n, dim, combinations(range(n), dim + 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return (self.n, self.dim, self.faces) == (other.n, other.dim, other.faces)

    def __repr__(self) -> str:
        return f"Complex(n={self.n}, dim={self.dim}, faces={len(self.faces)})"


def min_edge_degree(Y: Complex) -> int:
    """Smallest number of triangles covering any edge (delta)."""
    _require_dim2(Y)
    assert Y.edge_cover_count is not None
    return min(Y.edge_cover_count)


def uncovered_edges(Y: Complex) -> list[tuple[int, int]]:
    """Edges contained in no triangle; empty iff min_edge_degree > 0."""
    _require_dim2(Y)
    assert Y.edge_cover_count is not None
    return [unrank_edge(r) for r, c in enumerate(Y.edge_cover_count) if c == 0]


def _require_dim2(Y: Complex) -> None:
    if Y.dim != 2:
        raise ValueError(f"operation requires a 2-dimensional complex, got dim={Y.dim}")


# ---------------------------------------------------------------------------
# vertex links


class LinkGraph:
    """The link of a vertex restricted to a vertex set W: edge xy iff xyv is a face."""

    __slots__ = ("vertices", "adjacency")

    def __init__(self, vertices: Iterable[int]):
        self.vertices: frozenset[int] = frozenset(vertices)
        self.adjacency: dict[int, set[int]] = {w: set() for w in self.vertices}

    def add_edge(self, x: int, y: int) -> None:
        self.adjacency[x].add(y)
        self.adjacency[y].add(x)

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.adjacency.values()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(x, y) for x in self.adjacency for y in self.adjacency[x] if x < y]

    def connected_components(self) -> list[set[int]]:
        """BFS components, largest first; singletons included."""
        seen: set[int] = set()
        comps: list[set[int]] = []
        for start in sorted(self.vertices):
            if start in seen:
                continue
            comp = {start}
            frontier = [start]
            while frontier:
                x = frontier.pop()
                for y in self.adjacency[x]:
                    if y not in comp:
                        comp.add(y)
                        frontier.append(y)
            seen |= comp
            comps.append(comp)
        comps.sort(key=len, reverse=True)
        return comps


def link_subgraph(Y: Complex, v: int, W: Iterable[int]) -> LinkGraph:
    """Graph on W with an edge xy whenever {x,y,v} is a face of Y."""
    _require_dim2(Y)
    Wset = frozenset(W)
    if v in Wset:
        raise ValueError(f"apex vertex {v} must not lie in W")
    if not 0 <= v < Y.n:
        raise ValueError(f"vertex {v} out of range")
    for w in Wset:
        if not 0 <= w < Y.n:
            raise ValueError(f"vertex {w} out of range")
    g = LinkGraph(Wset)
    for f in Y.faces:
        if v in f:
            x, y = (u for u in f if u != v)
            if x in Wset and y in Wset:
                g.add_edge(x, y)
    return g


# ---------------------------------------------------------------------------
# random models


class ProcessStream:
    """All C(n, dim+1) faces in a uniformly random order, emitted lazily.

    A seeded Fisher-Yates shuffle over face ranks, materialized only as far
    as the stream has been consumed, so early hitting times touch a prefix.
    Identical seed gives an identical order.
    """

    __slots__ = ("n", "dim", "seed", "total", "_rng", "_swap", "_pos")

    def __init__(self, n: int, seed: int, dim: int = 2):
        if n < dim + 1:
            raise ValueError(f"need n >= {dim + 1} for dimension {dim}, got n={n}")
        self.n = n
        self.dim = dim
        self.seed = seed
        self.total = math.comb(n, dim + 1)
        self._rng = random.Random(seed)
        self._swap: dict[int, int] = {}
        self._pos = 0

    @property
    def position(self) -> int:
        """Number of faces emitted so far."""
        return self._pos

    def __iter__(self) -> "ProcessStream":
        return self

    def __next__(self) -> tuple[int, ...]:
        i = self._pos
        if i >= self.total:
            raise StopIteration
        j = self._rng.randrange(i, self.total)
        emitted = self._swap.pop(j, j)
        if j != i:
            self._swap[j] = self._swap.pop(i, i)
        self._pos = i + 1
        return unrank_face(emitted, self.dim + 1)

    def take(self, m: int) -> list[tuple[int, ...]]:
        return [next(self) for _ in range(min(m, self.total - self._pos))]


def sample_process(n: int, seed: int) -> ProcessStream:
    """The random triangle process: a uniform ordering of all C(n,3) triples."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return ProcessStream(n, seed, dim=2)


def sample_fixed_size(n: int, M: int, seed: int, dim: int = 2) -> Complex:
    """The fixed-size model: the first M faces of the seeded process."""
    stream = ProcessStream(n, seed, dim=dim)
    if not 0 <= M <= stream.total:
        raise ValueError(f"M={M} out of range [0, {stream.total}]")
    return Complex(n, dim, stream.take(M))


def sample_binomial(n: int, p: float, seed: int, dim: int = 2) -> Complex:
    """The binomial model: each face included independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p={p} outside [0, 1]")
    if n < dim + 1:
        raise ValueError(f"need n >= {dim + 1}, got n={n}")
    rng = random.Random(seed)
    Y = Complex(n, dim)
    if p == 0.0:
        return Y
    from itertools import combinations

    for f in combinations(range(n), dim + 1):
        if p == 1.0 or rng.random() < p:
            Y.add_face(f)
    return Y


# ---------------------------------------------------------------------------
# serialization (1-based vertex labels)


def complex_to_json(Y: Complex) -> str:
    doc = {
        "n": Y.n,
        "dim": Y.dim,
        "faces": [[v + 1 for v in f] for f in Y.faces_sorted()],
    }
    return json.dumps(doc)


def complex_from_json(text: str) -> Complex:
    doc = json.loads(text)
    for key in ("n", "dim", "faces"):
        if key not in doc:
            raise ValueError(f"complex JSON missing field {key!r}")
    n, dim = doc["n"], doc["dim"]
    Y = Complex(n, dim)
    for raw in doc["faces"]:
        Y.add_face(_shift_to_internal(raw, n))
    return Y


def complex_to_text(Y: Complex) -> str:
    lines = [f"# n={Y.n} dim={Y.dim}"]
    lines.extend(" ".join(str(v + 1) for v in f) for f in Y.faces_sorted())
    return "\n".join(lines) + "\n"


def complex_from_text(text: str) -> Complex:
    n = dim = None
    face_rows: list[tuple[int, list[int]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            for token in stripped[1:].split():
                if token.startswith("n="):
                    n = int(token[2:])
                elif token.startswith("dim="):
                    dim = int(token[4:])
            continue
        try:
            ids = [int(tok) for tok in stripped.split()]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        face_rows.append((lineno, ids))
    if not face_rows and n is None:
        raise ValueError("empty complex file without an '# n=.. dim=..' header")
    if dim is None:
        dim = len(face_rows[0][1]) - 1 if face_rows else 2
    if n is None:
        n = max(max(ids) for _, ids in face_rows)
    Y = Complex(n, dim)
    for lineno, ids in face_rows:
        try:
            Y.add_face(_shift_to_internal(ids, n))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return Y


def _shift_to_internal(ids: Sequence[int], n: int) -> tuple[int, ...]:
    shifted = []
    for v in ids:
        if not 1 <= v <= n:
            raise ValueError(f"vertex label {v} outside [1, {n}]")
        shifted.append(v - 1)
    return tuple(sorted(shifted))


def save_complex(Y: Complex, path: str, fmt: str | None = None) -> None:
    fmt = fmt or ("json" if str(path).endswith(".json") else "text")
    text = complex_to_json(Y) + "\n" if fmt == "json" else complex_to_text(Y)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def load_complex(path: str, fmt: str | None = None) -> Complex:
    with open(path) as fh:
        text = fh.read()
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "text"
    return complex_from_json(text) if fmt == "json" else complex_from_text(text)
