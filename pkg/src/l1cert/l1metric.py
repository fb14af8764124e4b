"""L1 distances, embeddings of a point set, and distortion reports.

Label distances are exact integers; embedded distances are floats.
Distortion is the scale-invariant product of the worst expansion ratio
and the worst contraction ratio over all vertex pairs, so distortion 1
means an isometry up to scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pointset import FormatError, IntervalLabel, PointSet, VertexAddress, parse_address


class DegenerateEmbeddingError(ValueError):
    """Two distinct points share an embedded vector (or all points do)."""


def l1_interval_distance(a: IntervalLabel, b: IntervalLabel) -> int:
    """Exact L1 distance between two bit-vector labels.

    Equals the measure of the symmetric difference of the ones-sets,
    computed by a linear merge of the two interval lists.
    """
    if a.length != b.length:
        raise ValueError(f"label length mismatch: {a.length} != {b.length}")
    inter = 0
    i = j = 0
    ia, ib = a.intervals, b.intervals
    while i < len(ia) and j < len(ib):
        lo = max(ia[i][0], ib[j][0])
        hi = min(ia[i][1], ib[j][1])
        if lo < hi:
            inter += hi - lo
        if ia[i][1] <= ib[j][1]:
            i += 1
        else:
            j += 1
    return a.measure + b.measure - 2 * inter


def l1_distance(u, v) -> float:
    """Sum of coordinate-wise absolute differences of two real vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"vector length mismatch: {u.shape} != {v.shape}")
    if not (np.isfinite(u).all() and np.isfinite(v).all()):
        raise ValueError("non-finite vector entries")
    return float(np.abs(u - v).sum())


@dataclass(frozen=True, eq=False)
class Embedding:
    """A map from vertex addresses to vectors in R**dimension."""

    dimension: int
    vectors: dict[VertexAddress, np.ndarray]


def make_embedding(vectors) -> Embedding:
    """Validate and freeze a mapping address -> vector."""
    cleaned: dict[VertexAddress, np.ndarray] = {}
    dim = None
    for addr, vec in vectors.items():
        arr = np.array(vec, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError(f"vector for {addr} must be one-dimensional and non-empty")
        if not np.isfinite(arr).all():
            raise ValueError(f"non-finite entries in vector for {addr}")
        if dim is None:
            dim = arr.size
        elif arr.size != dim:
            raise ValueError("embedding vectors have inconsistent lengths")
        arr.flags.writeable = False
        cleaned[addr] = arr
    if dim is None:
        raise ValueError("embedding must cover at least one vertex")
    return Embedding(dim, cleaned)


def identity_embedding(ps: PointSet) -> Embedding:
    """Labels themselves as vectors in R**(k**n); an isometry by construction."""
    return make_embedding({a: ps.labels[a].to_dense() for a in ps.addresses})


def scale_embedding(emb: Embedding, factor: float) -> Embedding:
    return make_embedding({a: v * factor for a, v in emb.vectors.items()})


def embedding_matrix(ps: PointSet, emb: Embedding) -> np.ndarray:
    """Vectors stacked in point-set export order; requires full coverage."""
    missing = [a for a in ps.addresses if a not in emb.vectors]
    if missing:
        raise ValueError(f"embedding does not cover {len(missing)} vertices, e.g. {missing[0]}")
    return np.stack([emb.vectors[a] for a in ps.addresses])


def pairwise_l1(points: np.ndarray) -> np.ndarray:
    """All pairwise L1 distances of the rows of `points`, chunked to bound memory."""
    n, d = points.shape
    out = np.zeros((n, n))
    step = max(1, 2**22 // max(1, n * d))
    for i0 in range(0, n, step):
        blk = points[i0 : i0 + step]
        out[i0 : i0 + step] = np.abs(blk[:, None, :] - points[None, :, :]).sum(axis=-1)
    return out


@dataclass(frozen=True)
class DistortionReport:
    """Worst expansion, worst contraction, and their product.

    expansion  = max over pairs of embedded/original distance,
    contraction = max over pairs of original/embedded distance
    (infinite when two distinct points coincide in the embedding).
    """

    expansion: float
    contraction: float
    distortion: float


def _ratio_report(embedded: np.ndarray, original: np.ndarray) -> DistortionReport:
    n = embedded.shape[0]
    iu = np.triu_indices(n, 1)
    de = embedded[iu]
    do = original[iu].astype(float)
    expansion = float(np.max(de / do))
    if np.any(de == 0.0):
        return DistortionReport(expansion, math.inf, math.inf)
    contraction = float(np.max(do / de))
    return DistortionReport(expansion, contraction, expansion * contraction)


def distortion(ps: PointSet, emb: Embedding) -> DistortionReport:
    """Distortion of an embedding relative to the exact label metric."""
    if len(ps) < 2:
        raise ValueError("need at least two points")
    de = pairwise_l1(embedding_matrix(ps, emb))
    return _ratio_report(de, ps.distance_matrix)


def normalize_lipschitz(ps: PointSet, emb: Embedding) -> Embedding:
    """Rescale so no pairwise distance expands (worst expansion becomes 1)."""
    report = distortion(ps, emb)
    if report.expansion <= 0.0:
        raise DegenerateEmbeddingError("all-constant embedding cannot be normalized")
    return scale_embedding(emb, 1.0 / report.expansion)


def embedding_to_text(ps: PointSet, emb: Embedding) -> str:
    """Serialize in the L1EMB v1 text format, one vertex per line in export order."""
    p = ps.params
    lines = [f"L1EMB v1 d={emb.dimension} N={len(ps)} k={p.k} n={p.n}"]
    for addr in ps.addresses:
        vec = emb.vectors[addr]
        lines.append(str(addr) + " " + " ".join(repr(float(x)) for x in vec))
    return "\n".join(lines) + "\n"


def embedding_from_text(text: str, ps: PointSet) -> Embedding:
    """Parse an L1EMB v1 file against a point set.

    Rejects mismatched N/k/n, unknown or out-of-order addresses, wrong
    vector lengths, and non-finite entries.
    """
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty embedding file")
    tokens = lines[0].split()
    if len(tokens) != 6 or tokens[0] != "L1EMB" or tokens[1] != "v1":
        raise FormatError(f"bad L1EMB header: {lines[0]!r}")
    head = {}
    for token, key in zip(tokens[2:], ("d", "N", "k", "n")):
        name, sep, value = token.partition("=")
        if name != key or not sep:
            raise FormatError(f"bad header field {token!r} (expected {key}=)")
        try:
            head[key] = int(value)
        except ValueError as exc:
            raise FormatError(f"bad header field {token!r}") from exc
    p = ps.params
    if head["k"] != p.k or head["n"] != p.n:
        raise FormatError(
            f"embedding is for k={head['k']} n={head['n']}, point set has k={p.k} n={p.n}"
        )
    if head["N"] != len(ps):
        raise FormatError(f"embedding N={head['N']} but point set has {len(ps)} points")
    if head["d"] < 1:
        raise FormatError("embedding dimension must be >= 1")
    if len(lines) != head["N"] + 1:
        raise FormatError(f"expected {head['N']} vector lines, found {len(lines) - 1}")
    vectors: dict[VertexAddress, np.ndarray] = {}
    for lineno, (addr, line) in enumerate(zip(ps.addresses, lines[1:]), start=2):
        parts = line.split()
        if len(parts) != head["d"] + 1:
            raise FormatError(f"line {lineno}: expected address plus {head['d']} coordinates")
        if parse_address(parts[0], p) != addr:
            raise FormatError(f"line {lineno}: address {parts[0]!r} out of canonical order")
        try:
            vec = np.array([float(x) for x in parts[1:]])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: bad coordinate") from exc
        if not np.isfinite(vec).all():
            raise FormatError(f"line {lineno}: non-finite coordinate")
        vectors[addr] = vec
    return make_embedding(vectors)
