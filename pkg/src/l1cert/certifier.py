"""Certify embeddings of recursive-cycle point sets and bound the dimension.

Pipeline: normalize the embedding so nothing expands, form the edge
difference map f (one vector per oriented full-depth edge), evaluate the
per-level separation constraints on prefix averages of f, measure the
worst slack epsilon, and convert it into a lower bound on the embedding
dimension. A consistent certificate (actual dimension >= bound) is
guaranteed for every valid embedding; inconsistency signals a bug.

The separation constraint for a level l, a prefix of l-1 edge coordinates,
and a split point r in [k-1] is

    (1/2k) * || sum_{b<=r} (avg(prefix,b) + avg(prefix,b+k))
             - sum_{b>r}  (avg(prefix,b) + avg(prefix,b+k)) ||_1  >= 1 - eps

where avg is the uniform average of f over all completions of the prefix.
For the identity embedding every left-hand side is exactly 1, which pins
the edge-orientation convention.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .infotheory import ProbVector, binary_entropy
from .l1metric import (
    DegenerateEmbeddingError,
    DistortionReport,
    Embedding,
    distortion,
    scale_embedding,
)
from .pointset import PointSet, RecursiveCycleGraph, edge_endpoints

LIFT_NORM_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class EdgeVectorMap:
    """The difference F(head) - F(tail) for every full-depth edge label."""

    dimension: int
    table: dict[tuple[int, ...], np.ndarray]


@dataclass(frozen=True)
class ConstraintEntry:
    level: int
    prefix: tuple[int, ...]
    r: int
    lhs: float


@dataclass(frozen=True)
class ConstraintReport:
    """Every separation constraint value, with the worst slack epsilon."""

    entries: tuple[ConstraintEntry, ...]
    min_lhs: float
    epsilon: float


@dataclass(frozen=True)
class BoundResult:
    """The dimension lower bound derived from a measured epsilon.

    delta = (k-1)*eps/2; the bound applies only when delta < 1/2, i.e.
    eps < 1/(k-1). Outside that regime the result is flagged vacuous with
    raw_bound 0 and min_dimension 1.
    """

    delta: float
    per_level_term: float
    raw_bound: float
    min_dimension: int
    applicable: bool


@dataclass(frozen=True)
class CertificateReport:
    distortion: DistortionReport
    epsilon: float
    bound: BoundResult
    embedding_dimension: int
    consistent: bool
    constraints: ConstraintReport


def edge_difference_map(graph: RecursiveCycleGraph, emb: Embedding) -> EdgeVectorMap:
    """Map each full-depth edge to F(head) - F(tail).

    The embedding must already be 1-Lipschitz: every edge difference must
    have L1 norm at most 1 (up to slack); otherwise the call is rejected.
    """
    table: dict[tuple[int, ...], np.ndarray] = {}
    worst = 0.0
    for coords, (tail, head) in graph.edges.items():
        vec = emb.vectors[head] - emb.vectors[tail]
        worst = max(worst, float(np.abs(vec).sum()))
        table[coords] = vec
    if worst > 1.0 + LIFT_NORM_SLACK:
        raise ValueError(
            f"edge difference norm {worst} exceeds 1; "
            "apply normalize_lipschitz to the embedding first"
        )
    return EdgeVectorMap(emb.dimension, table)


def average_edge_vector(
    graph: RecursiveCycleGraph, emb: Embedding, prefix: tuple[int, ...]
) -> np.ndarray:
    """Uniform average of the edge difference map over completions of `prefix`.

    Telescoping collapses the average to the closed form
    (F(head) - F(tail)) / k**(n - len(prefix)) for the level-len(prefix)
    edge named by the prefix; the brute-force enumeration lives in the
    oracle module as the correctness reference.
    """
    tail, head = edge_endpoints(graph, tuple(prefix))
    scale = graph.params.k ** (graph.params.n - len(prefix))
    return (emb.vectors[head] - emb.vectors[tail]) / scale


def constraint_lhs(
    graph: RecursiveCycleGraph, emb: Embedding, prefix: tuple[int, ...], r: int
) -> float:
    """One separation-constraint left-hand side (see module docstring)."""
    k = graph.params.k
    prefix = tuple(prefix)
    level = len(prefix) + 1
    if level > graph.params.n:
        raise ValueError(f"prefix of length {len(prefix)} has no level-{level} edges")
    if not 1 <= r <= k - 1:
        raise ValueError(f"split point r={r} outside 1..{k - 1}")
    paired = [
        average_edge_vector(graph, emb, prefix + (b,))
        + average_edge_vector(graph, emb, prefix + (b + k,))
        for b in range(1, k + 1)
    ]
    expr = sum(paired[:r]) - sum(paired[r:])
    return float(np.abs(expr).sum()) / (2 * k)


def constraint_report(graph: RecursiveCycleGraph, emb: Embedding) -> ConstraintReport:
    """Evaluate every (level, prefix, r) constraint and extract epsilon."""
    params = graph.params
    k, cyc = params.k, params.cycle_length
    entries = []
    for level in range(1, params.n + 1):
        for prefix in itertools.product(range(1, cyc + 1), repeat=level - 1):
            paired = [
                average_edge_vector(graph, emb, prefix + (b,))
                + average_edge_vector(graph, emb, prefix + (b + k,))
                for b in range(1, k + 1)
            ]
            total = sum(paired)
            partial = np.zeros_like(total)
            for r in range(1, k):
                partial = partial + paired[r - 1]
                lhs = float(np.abs(2 * partial - total).sum()) / (2 * k)
                entries.append(ConstraintEntry(level, prefix, r, lhs))
    min_lhs = min(e.lhs for e in entries)
    return ConstraintReport(tuple(entries), min_lhs, max(0.0, 1.0 - min_lhs))


def nonneg_lift(vec) -> ProbVector:
    """Lift a vector of L1 norm at most 1 to a probability vector on [2d+1].

    Concatenates the positive part, the negative part, and the leftover
    mass 1 - ||v||_1. Tiny norm overshoot (float dust) is clamped to 1.
    """
    arr = np.asarray(vec, dtype=float)
    norm = float(np.abs(arr).sum())
    if norm > 1.0 + LIFT_NORM_SLACK:
        raise ValueError(f"vector has L1 norm {norm} > 1; cannot lift")
    pos = np.maximum(arr, 0.0)
    neg = np.maximum(-arr, 0.0)
    if norm > 1.0:
        pos /= norm
        neg /= norm
        norm = 1.0
    return ProbVector(np.concatenate([pos, neg, [1.0 - norm]]))


def lift_recover(y) -> np.ndarray:
    """Undo the lift: y in R**(2d+1) maps to (y_j - y_{j+d}) in R**d.

    Never increases the L1 norm, and recovers the original vector exactly
    on lifted inputs.
    """
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1 or arr.size < 3 or arr.size % 2 == 0:
        raise ValueError(f"lifted vector must have odd length >= 3, got {arr.size}")
    d = (arr.size - 1) // 2
    return arr[:d] - arr[d : 2 * d]


def dimension_bound(k: int, n: int, eps: float) -> BoundResult:
    """Dimension lower bound for a depth-n instance with measured slack eps.

    With delta = (k-1)*eps/2 < 1/2, any conforming edge map needs

        d >= 2**((log2 k - delta*log2(k-1) - H(delta))*n - 1) - 1/2.

    min_dimension rounds up (minus a 1e-9 guard against float overshoot)
    since dimensions are integers.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    if eps < 0:
        raise ValueError(f"epsilon must be nonnegative, got {eps}")
    delta = (k - 1) * eps / 2.0
    if delta >= 0.5:
        return BoundResult(delta, 0.0, 0.0, 1, False)
    log_km1 = 0.0 if k == 2 else math.log2(k - 1)
    per_level = math.log2(k) - delta * log_km1 - binary_entropy(delta)
    raw = 2.0 ** (per_level * n - 1.0) - 0.5
    min_dim = max(1, math.ceil(raw - 1e-9))
    return BoundResult(delta, per_level, raw, min_dim, True)


def bound_for_distortion(k: int, n: int, dist: float) -> BoundResult:
    """Dimension bound implied by a distortion-`dist` embedding (eps = 1 - 1/D)."""
    if dist < 1.0:
        raise ValueError(f"distortion must be >= 1, got {dist}")
    return dimension_bound(k, n, 1.0 - 1.0 / dist)


def choose_k(eps: float) -> int:
    """Half-cycle length giving near-optimal bounds at low distortion slack.

    Rounds 1/(eps*log2(1/eps)) down, floored at 2; the target is only an
    approximation, so sweep neighbors when it matters.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must be in (0, 1/2), got {eps}")
    return max(2, math.floor(1.0 / (eps * math.log2(1.0 / eps))))


def predictor_success(distributions) -> tuple[np.ndarray, float]:
    """Best symbol-wise predictor of which of k distributions produced a sample.

    Returns (predictor, success) where predictor[j] is the 0-based index of
    the distribution maximizing the weight of symbol j (ties to the
    smallest index) and success is its probability of being right under a
    uniformly random source: (1/k) * || max(Q_1..Q_k) ||_1.
    """
    qs = [q if isinstance(q, ProbVector) else ProbVector(q) for q in distributions]
    if len(qs) < 2:
        raise ValueError("need at least two distributions")
    sizes = {len(q) for q in qs}
    if len(sizes) != 1:
        raise ValueError(f"alphabet mismatch among distributions: {sorted(sizes)}")
    stacked = np.stack([q.weights for q in qs])
    predictor = stacked.argmax(axis=0)
    success = float(stacked.max(axis=0).sum()) / len(qs)
    return predictor, success


def certify(ps: PointSet, emb: Embedding) -> CertificateReport:
    """Full pipeline: distortion, normalization, constraints, dimension bound.

    Raises DegenerateEmbeddingError when two distinct points share a
    vector (the certificate would be meaningless). `consistent` must come
    back True for every valid embedding.
    """
    report = distortion(ps, emb)
    if math.isinf(report.contraction):
        raise DegenerateEmbeddingError(
            "embedding maps two distinct points to the same vector"
        )
    normalized = scale_embedding(emb, 1.0 / report.expansion)
    constraints = constraint_report(ps.graph, normalized)
    params = ps.params
    bound = dimension_bound(params.k, params.n, constraints.epsilon)
    return CertificateReport(
        distortion=report,
        epsilon=constraints.epsilon,
        bound=bound,
        embedding_dimension=emb.dimension,
        consistent=emb.dimension >= bound.min_dimension,
        constraints=constraints,
    )


def certificate_to_text(cert: CertificateReport) -> str:
    """Key=value report, one line per field."""
    b = cert.bound
    lines = [
        f"epsilon={cert.epsilon!r}",
        f"delta={b.delta!r}",
        f"per_level_term={b.per_level_term!r}",
        f"raw_bound={b.raw_bound!r}",
        f"min_dimension={b.min_dimension}",
        f"embedding_dimension={cert.embedding_dimension}",
        f"distortion={cert.distortion.distortion!r}",
        f"applicable={'true' if b.applicable else 'false'}",
        f"consistent={'true' if cert.consistent else 'false'}",
    ]
    return "\n".join(lines) + "\n"


def constraint_table_csv(report: ConstraintReport) -> str:
    """Per-constraint CSV: level,prefix,r,lhs (prefix dotted, empty for level 1)."""
    lines = ["level,prefix,r,lhs"]
    for e in report.entries:
        prefix = ".".join(str(c) for c in e.prefix)
        lines.append(f"{e.level},{prefix},{e.r},{e.lhs!r}")
    return "\n".join(lines) + "\n"
