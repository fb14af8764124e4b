"""Recursive-cycle graphs and their binary-label point sets.

The family is parameterized by a half-cycle length k >= 2 and a recursion
depth n >= 1. Depth 1 is a single cycle of length 2k with two distinguished
antipodal vertices ("left" and "right"); every deeper level replaces each
edge with a fresh cycle of length 2k whose distinguished vertices are
identified with the edge's endpoints. We treat the whole structure as the
n-fold refinement of a single virtual root edge (left, right), which gives
every vertex a canonical address: the edge path of the cycle that created
it plus its position along that cycle.

Each vertex carries a bit vector of length k**n, stored sparsely as
disjoint ones-intervals. Adjacent vertices differ in exactly one bit, and
the two ends of any level-l cycle diameter differ in exactly k**(n-l+1)
bits. The set of all labels is the point set consumed by the certifier.

Edges are labeled by coordinate tuples in [2k]**n (outermost level first)
and oriented toward the local right vertex: on a cycle refining the
oriented edge (tail, head), edge b in 1..k runs up the top path and edge
b+k runs along the bottom path toward the head. All types are immutable
after construction and all operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Reject parameters whose edge count would leave the exact 64-bit range.
MAX_EDGE_CAPACITY = 2**48
# Largest graph build_graph will materialize; label queries work far beyond.
MAX_MATERIALIZED_EDGES = 2**22


class CapacityError(ValueError):
    """Requested size exceeds a capacity bound."""


class FormatError(ValueError):
    """A text payload does not conform to the expected file format."""


@dataclass(frozen=True)
class GraphParams:
    """Half-cycle length k >= 2 and recursion depth n >= 1."""

    k: int
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or not isinstance(self.n, int):
            raise TypeError("k and n must be integers")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if (2 * self.k) ** self.n > MAX_EDGE_CAPACITY:
            raise CapacityError(
                f"(2k)^n = {(2 * self.k) ** self.n} exceeds capacity 2^48"
            )

    @property
    def cycle_length(self) -> int:
        return 2 * self.k

    @property
    def label_length(self) -> int:
        return self.k**self.n


@dataclass(frozen=True)
class VertexAddress:
    """Canonical vertex identity.

    kind is "L" or "R" for the two root-edge endpoints, or "inner" for a
    vertex created when the cycle refining edge `path` was inserted;
    `position` is its place along that cycle (1..2k-1, excluding k, since
    positions 0 and k are the refined edge's endpoints).
    """

    kind: str
    path: tuple[int, ...] = ()
    position: int = 0

    def __str__(self) -> str:
        if self.kind == "L":
            return "L"
        if self.kind == "R":
            return "R"
        return ".".join(str(c) for c in self.path) + f"/{self.position}"

    @property
    def level(self) -> int:
        """Creation level: 0 for the root endpoints, len(path)+1 otherwise."""
        return 0 if self.kind != "inner" else len(self.path) + 1


ROOT_LEFT = VertexAddress("L")
ROOT_RIGHT = VertexAddress("R")


def parse_address(text: str, params: GraphParams) -> VertexAddress:
    """Parse an address string ("L", "R", or "e1.e2/<pos>") and validate it."""
    if text == "L":
        return ROOT_LEFT
    if text == "R":
        return ROOT_RIGHT
    if "/" not in text:
        raise FormatError(f"bad vertex address {text!r}")
    head, _, tail = text.rpartition("/")
    try:
        path = tuple(int(c) for c in head.split(".")) if head else ()
        position = int(tail)
    except ValueError as exc:
        raise FormatError(f"bad vertex address {text!r}") from exc
    cyc = params.cycle_length
    if len(path) >= params.n or any(not 1 <= c <= cyc for c in path):
        raise FormatError(f"edge path out of range in address {text!r}")
    if not 1 <= position <= cyc - 1 or position == params.k:
        raise FormatError(f"position out of range in address {text!r}")
    return VertexAddress("inner", path, position)


@dataclass(frozen=True)
class IntervalLabel:
    """A bit vector in {0,1}**length stored as sorted disjoint ones-intervals.

    Intervals are half-open [a, b) and kept maximal (no two adjacent), so
    equality of labels is equality of the interval tuples.
    """

    length: int
    intervals: tuple[tuple[int, int], ...]

    @staticmethod
    def make(length: int, raw: "list[tuple[int, int]] | tuple") -> "IntervalLabel":
        """Normalize raw intervals: sort, merge overlaps/adjacency, validate."""
        ivs = sorted((int(a), int(b)) for a, b in raw)
        merged: list[tuple[int, int]] = []
        for a, b in ivs:
            if not 0 <= a < b <= length:
                raise ValueError(f"interval [{a},{b}) out of range [0,{length})")
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return IntervalLabel(length, tuple(merged))

    @cached_property
    def measure(self) -> int:
        """Number of one bits."""
        return sum(b - a for a, b in self.intervals)

    def to_dense(self) -> np.ndarray:
        """Materialize the bit vector as a float array."""
        if self.length > 2**24:
            raise CapacityError(f"label of length {self.length} too large to densify")
        out = np.zeros(self.length)
        for a, b in self.intervals:
            out[a:b] = 1.0
        return out


@dataclass(frozen=True, eq=False)
class RecursiveCycleGraph:
    """The built graph: canonical vertex list and oriented labeled edges.

    `vertices` is in export order (creation level, then lexicographic edge
    path, then position). `edges` maps every full-depth coordinate tuple to
    its oriented (tail, head) pair. `flip_bottom` records the debug hook
    that reverses the orientation of bottom-path edges; it exists so the
    self test can demonstrate that the identity-embedding equality check
    pins the orientation convention.
    """

    params: GraphParams
    vertices: tuple[VertexAddress, ...]
    edges: dict[tuple[int, ...], tuple[VertexAddress, VertexAddress]]
    flip_bottom: bool = False

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)


def vertex_count(params: GraphParams) -> int:
    """Closed-form vertex count; always an exact integer."""
    k, n = params.k, params.n
    num = (2 * k - 2) * (2 * k) ** n + 2 * k
    count, rem = divmod(num, 2 * k - 1)
    assert rem == 0, "vertex-count closed form must be integral"
    return count


def _cycle_vertex(params: GraphParams, path: tuple[int, ...], q: int) -> VertexAddress:
    """Address of cycle position q (0..2k-1) on the cycle refining `path`.

    Positions 0 and k are the refined edge's own endpoints, which keep
    their older addresses.
    """
    if q == 0:
        return _edge_endpoints_raw(params, path)[0]
    if q == params.k:
        return _edge_endpoints_raw(params, path)[1]
    return VertexAddress("inner", tuple(path), q)


def _edge_endpoints_raw(
    params: GraphParams, prefix: tuple[int, ...]
) -> tuple[VertexAddress, VertexAddress]:
    """Oriented endpoints of the level-len(prefix) edge, canonical convention."""
    if not prefix:
        return ROOT_LEFT, ROOT_RIGHT
    parent, b = tuple(prefix[:-1]), prefix[-1]
    k = params.k
    if 1 <= b <= k:
        # Top-path edge b: runs from cycle position b-1 to b.
        return _cycle_vertex(params, parent, b - 1), _cycle_vertex(params, parent, b)
    if k < b <= 2 * k:
        # Bottom-path edge: oriented toward the right vertex, which walks
        # against the cycle direction (positions b -> b-1, with wraparound).
        tail_pos = 0 if b == 2 * k else b
        head_pos = k if b == k + 1 else b - 1
        return (
            _cycle_vertex(params, parent, tail_pos),
            _cycle_vertex(params, parent, head_pos),
        )
    raise ValueError(f"edge coordinate {b} out of range 1..{2 * k}")


def _validate_prefix(params: GraphParams, prefix: tuple[int, ...]) -> tuple[int, ...]:
    prefix = tuple(int(c) for c in prefix)
    if len(prefix) > params.n:
        raise ValueError(f"prefix longer than depth n={params.n}: {prefix}")
    for c in prefix:
        if not 1 <= c <= params.cycle_length:
            raise ValueError(f"edge coordinate {c} out of range 1..{params.cycle_length}")
    return prefix


def edge_endpoints(
    graph: RecursiveCycleGraph, prefix: tuple[int, ...]
) -> tuple[VertexAddress, VertexAddress]:
    """Oriented (tail, head) of the level-l edge named by a coordinate prefix.

    The empty prefix names the root edge (L, R). The head is the endpoint
    geometrically closer to the right vertex along its own path.
    """
    prefix = _validate_prefix(graph.params, prefix)
    tail, head = _edge_endpoints_raw(graph.params, prefix)
    if graph.flip_bottom and prefix and prefix[-1] > graph.params.k:
        tail, head = head, tail
    return tail, head


def edge_coordinate_block(
    params: GraphParams, prefix: tuple[int, ...]
) -> tuple[int, int]:
    """(start, length) of the label coordinates on which the edge's endpoints differ.

    A level-l edge controls a block of k**(n-l) coordinates; the tail is
    all zeros there and the head all ones.
    """
    prefix = _validate_prefix(params, prefix)
    k, n = params.k, params.n
    start = 0
    for depth, b in enumerate(prefix, start=1):
        m = b if b <= k else b - k
        start += (k - m) * k ** (n - depth)
    return start, k ** (n - len(prefix))


def _label_of(params: GraphParams, addr: VertexAddress) -> IntervalLabel:
    total = params.label_length
    if addr.kind == "L":
        return IntervalLabel(total, ())
    if addr.kind == "R":
        return IntervalLabel(total, ((0, total),))
    k = params.k
    q = addr.position
    if not (1 <= q <= 2 * k - 1 and q != k):
        raise ValueError(f"invalid cycle position {q} for k={k}")
    tail, _ = _edge_endpoints_raw(params, addr.path)
    base = _label_of(params, tail)
    start, block = edge_coordinate_block(params, addr.path)
    sub = block // k
    if q < k:
        # Top position q: ones on the last q sub-blocks of the edge's block.
        ones = (start + (k - q) * sub, start + block)
    else:
        # Bottom position q is the (2k-q)-th bottom vertex: ones on the
        # first 2k-q sub-blocks.
        ones = (start, start + (2 * k - q) * sub)
    return IntervalLabel.make(total, list(base.intervals) + [ones])


def vertex_label(graph: RecursiveCycleGraph, v: VertexAddress) -> IntervalLabel:
    """Label of a vertex as a sparse ones-interval bit vector of length k**n."""
    if v not in graph.vertex_set:
        raise ValueError(f"unknown vertex {v}")
    return _label_of(graph.params, v)


def build_graph(params: GraphParams, *, flip_bottom: bool = False) -> RecursiveCycleGraph:
    """Construct the depth-n recursive cycle graph with labeled oriented edges.

    flip_bottom reverses the orientation of every bottom-path edge; it is a
    debug hook only (see RecursiveCycleGraph).
    """
    cyc = params.cycle_length
    edge_total = cyc**params.n
    if edge_total > MAX_MATERIALIZED_EDGES:
        raise CapacityError(
            f"{edge_total} edges is too large to materialize "
            f"(limit {MAX_MATERIALIZED_EDGES}); use label queries instead"
        )
    inner_positions = [q for q in range(1, cyc) if q != params.k]
    vertices: list[VertexAddress] = [ROOT_LEFT, ROOT_RIGHT]
    for level in range(1, params.n + 1):
        for path in itertools.product(range(1, cyc + 1), repeat=level - 1):
            for q in inner_positions:
                vertices.append(VertexAddress("inner", path, q))
    edges: dict[tuple[int, ...], tuple[VertexAddress, VertexAddress]] = {}
    for coords in itertools.product(range(1, cyc + 1), repeat=params.n):
        tail, head = _edge_endpoints_raw(params, coords)
        if flip_bottom and coords[-1] > params.k:
            tail, head = head, tail
        edges[coords] = (tail, head)
    graph = RecursiveCycleGraph(params, tuple(vertices), edges, flip_bottom)
    assert len(vertices) == vertex_count(params)
    return graph


def antipodal_pairs(
    graph: RecursiveCycleGraph, level: int
) -> list[tuple[VertexAddress, VertexAddress]]:
    """All diameter pairs of every level-`level` cycle.

    Each cycle contributes k pairs (positions q and q+k); their labels are
    at distance k**(n-level+1). Pair order is deterministic: cycles in
    lexicographic path order, q ascending.
    """
    params = graph.params
    if not 1 <= level <= params.n:
        raise ValueError(f"level must be in 1..{params.n}, got {level}")
    cyc = params.cycle_length
    pairs = []
    for path in itertools.product(range(1, cyc + 1), repeat=level - 1):
        for q in range(params.k):
            pairs.append(
                (_cycle_vertex(params, path, q), _cycle_vertex(params, path, q + params.k))
            )
    return pairs


@dataclass(frozen=True, eq=False)
class PointSet:
    """The labels of a built graph, in export order, with fast distance access."""

    graph: RecursiveCycleGraph
    labels: dict[VertexAddress, IntervalLabel]

    @property
    def addresses(self) -> tuple[VertexAddress, ...]:
        return self.graph.vertices

    @property
    def params(self) -> GraphParams:
        return self.graph.params

    @property
    def dimension(self) -> int:
        return self.params.label_length

    def __len__(self) -> int:
        return len(self.graph.vertices)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """Exact pairwise label distances in export order (int64)."""
        from .l1metric import l1_interval_distance

        n = len(self)
        labs = [self.labels[a] for a in self.addresses]
        out = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                d = l1_interval_distance(labs[i], labs[j])
                out[i, j] = d
                out[j, i] = d
        return out


def point_set(graph: RecursiveCycleGraph) -> PointSet:
    """Compute every vertex label once, sharing work along the recursion."""
    params = graph.params
    memo: dict[VertexAddress, IntervalLabel] = {}

    def label(addr: VertexAddress) -> IntervalLabel:
        got = memo.get(addr)
        if got is None:
            if addr.kind == "inner":
                # _label_of recurses through the tail; warm that entry first
                # so deep chains stay cheap.
                tail, _ = _edge_endpoints_raw(params, addr.path)
                label(tail)
            got = _label_of(params, addr)
            memo[addr] = got
        return got

    return PointSet(graph, {v: label(v) for v in graph.vertices})


def _format_intervals(label: IntervalLabel) -> str:
    return ",".join(f"{a}-{b}" for a, b in label.intervals) or "-"


def _parse_intervals(text: str, length: int) -> IntervalLabel:
    if text == "-":
        return IntervalLabel(length, ())
    parts = []
    for chunk in text.split(","):
        a, sep, b = chunk.partition("-")
        if not sep:
            raise FormatError(f"bad interval {chunk!r}")
        try:
            parts.append((int(a), int(b)))
        except ValueError as exc:
            raise FormatError(f"bad interval {chunk!r}") from exc
    try:
        label = IntervalLabel.make(length, parts)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if label.intervals != tuple(parts):
        raise FormatError(f"intervals not sorted/disjoint/maximal: {text!r}")
    return label


def pointset_to_text(ps: PointSet) -> str:
    """Serialize in the P1 text format (header plus one vertex per line)."""
    p = ps.params
    lines = [f"P1 k={p.k} n={p.n} N={len(ps)} dim={p.label_length}"]
    for addr in ps.addresses:
        lines.append(f"{addr} {_format_intervals(ps.labels[addr])}")
    return "\n".join(lines) + "\n"


def _parse_header(line: str, magic: str, keys: tuple[str, ...]) -> dict[str, int]:
    tokens = line.split()
    if len(tokens) != len(keys) + 1 or tokens[0] != magic:
        raise FormatError(f"bad {magic} header: {line!r}")
    out = {}
    for token, key in zip(tokens[1:], keys):
        name, sep, value = token.partition("=")
        if name != key or not sep:
            raise FormatError(f"bad {magic} header field {token!r} (expected {key}=)")
        try:
            out[key] = int(value)
        except ValueError as exc:
            raise FormatError(f"bad {magic} header field {token!r}") from exc
    return out


def pointset_from_text(text: str) -> PointSet:
    """Parse a P1 file, rebuilding and verifying against the canonical construction.

    The returned point set is the in-memory construction; any divergence of
    the file from it (order, addresses, labels, counts) is a FormatError.
    """
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty point-set file")
    head = _parse_header(lines[0], "P1", ("k", "n", "N", "dim"))
    try:
        params = GraphParams(head["k"], head["n"])
    except ValueError as exc:
        raise FormatError(f"bad parameters in header: {exc}") from exc
    if head["N"] != vertex_count(params) or head["dim"] != params.label_length:
        raise FormatError("header N/dim inconsistent with k and n")
    if len(lines) != head["N"] + 1:
        raise FormatError(f"expected {head['N']} vertex lines, found {len(lines) - 1}")
    ps = point_set(build_graph(params))
    for lineno, (addr, line) in enumerate(zip(ps.addresses, lines[1:]), start=2):
        tokens = line.split(" ")
        if len(tokens) != 2:
            raise FormatError(f"line {lineno}: expected '<address> <intervals>'")
        if parse_address(tokens[0], params) != addr:
            raise FormatError(f"line {lineno}: address {tokens[0]!r} out of canonical order")
        if _parse_intervals(tokens[1], params.label_length) != ps.labels[addr]:
            raise FormatError(f"line {lineno}: label does not match the construction")
    return ps
