"""Dynamical maps on density matrices.

A map ``rho -> rho'`` with ``rho'[r, s] = sum_{r', s'} B[(r, r'), (s, s')] rho[r', s']``
is stored through its N^2 x N^2 dynamical matrix ``B`` (row index ``r*N + r'``,
column index ``s*N + s'``). ``B`` is Hermitian exactly when the map preserves
Hermiticity, its eigendecomposition gives the canonical operator-sum form
``rho -> sum_a w_a L_a rho L_a^dagger`` with real weights and Hilbert-Schmidt
orthonormal operators, and the map is completely positive exactly when all
weights are nonnegative.

Weights and operators are kept separate (``w_a`` real, ``L_a`` normalized to
unit Hilbert-Schmidt norm) so maps that are *not* completely positive stay
representable with negative weights.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass, field

import numpy as np

from .errors import BadRank, DimensionMismatch, ValidationError
from .linalg import DEFAULT_TOL, dagger, hermitian_eig, max_abs

# Relative cutoff below which decomposition eigenvalues count as zero rank.
TRUNCATION_TOL = 1e-12


def _square_complex(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValidationError(f"{name} contains non-finite entries")
    return m


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A valid quantum state: Hermitian, unit trace, positive semidefinite."""

    mat: np.ndarray
    tol: InitVar[float] = DEFAULT_TOL

    def __post_init__(self, tol):
        mat = _square_complex(self.mat, "density matrix")
        object.__setattr__(self, "mat", mat)
        if max_abs(mat - dagger(mat)) > tol:
            raise ValidationError(
                f"density matrix must be Hermitian (deviation {max_abs(mat - dagger(mat)):.3e})"
            )
        tr = np.trace(mat)
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"density matrix must have unit trace (trace {tr:.6g})")
        min_eig = float(np.linalg.eigvalsh((mat + dagger(mat)) / 2).min())
        if min_eig < -tol:
            raise ValidationError(
                f"density matrix must be positive semidefinite (min eigenvalue {min_eig:.3e})"
            )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class DynamicalMap:
    """Hermitian dynamical matrix of a linear map on N x N density matrices."""

    bmat: np.ndarray = field(repr=False)
    tol: InitVar[float] = DEFAULT_TOL

    def __post_init__(self, tol):
        bmat = _square_complex(self.bmat, "dynamical matrix")
        object.__setattr__(self, "bmat", bmat)
        side = bmat.shape[0]
        dim = math.isqrt(side)
        if dim * dim != side:
            raise DimensionMismatch(f"dynamical matrix side {side} is not a perfect square")
        herm = max_abs(bmat - dagger(bmat))
        if herm > tol:
            raise ValidationError(
                "dynamical matrix must be Hermitian, i.e. the map must preserve "
                f"Hermiticity (deviation {herm:.3e}, tol {tol:.1e})"
            )

    @property
    def dim(self) -> int:
        return math.isqrt(self.bmat.shape[0])


@dataclass(frozen=True, eq=False)
class KrausTerm:
    """One canonical term: a real weight and a unit-HS-norm operator."""

    weight: float
    op: np.ndarray

    def __post_init__(self):
        op = _square_complex(self.op, "eigen-operator")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "weight", float(self.weight))
        hs = float(np.linalg.norm(op))
        if abs(hs - 1.0) > DEFAULT_TOL:
            raise ValidationError(f"eigen-operator must have unit HS norm, got {hs:.12g}")


@dataclass(frozen=True, eq=False)
class CanonicalDecomposition:
    """Eigen-expansion of a dynamical map, terms sorted by descending weight."""

    dim: int
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        if len(terms) > self.dim**2:
            raise ValidationError(
                f"{len(terms)} terms exceed the dim^2 = {self.dim ** 2} bound"
            )
        for t in terms:
            if t.op.shape != (self.dim, self.dim):
                raise DimensionMismatch(
                    f"eigen-operator shape {t.op.shape} does not match dim {self.dim}"
                )
        for a in range(len(terms)):
            for b in range(a + 1, len(terms)):
                overlap = abs(np.trace(dagger(terms[a].op) @ terms[b].op))
                if overlap > 1e-9:
                    raise ValidationError(
                        f"eigen-operators {a} and {b} are not HS-orthogonal ({overlap:.3e})"
                    )

    @property
    def rank(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class MapProperties:
    """Diagnostic flags and residuals for a dynamical map."""

    hermiticity_preserving: bool
    trace_preserving: bool
    completely_positive: bool
    min_eigenvalue: float
    trace_defect: float


def map_from_kraus(terms, dim: int) -> DynamicalMap:
    """Build the dynamical matrix of ``rho -> sum_a w_a K_a rho K_a^dagger``.

    ``terms`` is a sequence of ``(weight, op)`` pairs with real weights and
    dim x dim operators; operators need not be normalized here. The result is
    ``sum_a w_a vec(K_a) vec(K_a)^dagger`` with row-major ``vec``, Hermitian
    by construction.
    """
    bmat = np.zeros((dim * dim, dim * dim), dtype=complex)
    for weight, op in terms:
        w = float(weight)
        op = np.asarray(op, dtype=complex)
        if op.shape != (dim, dim):
            raise DimensionMismatch(
                f"Kraus operator shape {op.shape} does not match dim {dim}"
            )
        v = op.reshape(-1)
        bmat += w * np.outer(v, v.conj())
    return DynamicalMap(bmat)


def _state_matrix(rho) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def apply_map(dmap: DynamicalMap, rho) -> np.ndarray:
    """Apply a dynamical map directly: ``out[r, s] = B[(r,r'),(s,s')] rho[r',s']``.

    The output is a plain matrix; it has unit trace only if the map is
    trace-preserving.
    """
    mat = _state_matrix(rho)
    n = dmap.dim
    if mat.shape != (n, n):
        raise DimensionMismatch(f"state shape {mat.shape} does not match map dim {n}")
    b4 = dmap.bmat.reshape(n, n, n, n)
    return np.einsum("rpsq,pq->rs", b4, mat)


def canonical_decompose(
    dmap: DynamicalMap, trunc_tol: float = TRUNCATION_TOL
) -> CanonicalDecomposition:
    """Eigendecompose the dynamical matrix into weighted eigen-operators.

    Eigenvalues with ``|w| <= trunc_tol * max|w|`` are dropped; each kept
    eigenvector is reshaped row-major into its operator. The number of terms
    never exceeds dim^2.
    """
    n = dmap.dim
    vals, vecs = hermitian_eig(dmap.bmat, tol=1e-8)
    scale = float(np.max(np.abs(vals))) if len(vals) else 0.0
    terms = []
    for w, v in zip(vals, vecs.T):
        if scale == 0.0 or abs(w) <= trunc_tol * scale:
            continue
        terms.append(KrausTerm(float(w), v.reshape(n, n)))
    return CanonicalDecomposition(dim=n, terms=tuple(terms))


def check_properties(dmap: DynamicalMap, tol: float = DEFAULT_TOL) -> MapProperties:
    """Report Hermiticity preservation, trace preservation and complete positivity.

    Reports only, never raises on unphysical maps: non-CP and non-TP maps are
    legitimate inputs elsewhere.
    """
    n = dmap.dim
    herm_defect = max_abs(dmap.bmat - dagger(dmap.bmat))
    b4 = dmap.bmat.reshape(n, n, n, n)
    tmat = np.einsum("rprq->pq", b4)
    trace_defect = max_abs(tmat - np.eye(n))
    min_eig = float(np.linalg.eigvalsh((dmap.bmat + dagger(dmap.bmat)) / 2).min())
    return MapProperties(
        hermiticity_preserving=herm_defect <= tol,
        trace_preserving=trace_defect <= tol,
        completely_positive=min_eig >= -tol,
        min_eigenvalue=min_eig,
        trace_defect=float(trace_defect),
    )


def povm_effect(dmap: DynamicalMap) -> np.ndarray:
    """Total measurement effect ``E = sum_a w_a K_a^dagger K_a`` of a map.

    Computed directly from the dynamical matrix, so it is exact for any
    operator-sum realization; ``trace(apply_map(m, rho)) == trace(E @ rho)``.
    """
    n = dmap.dim
    b4 = dmap.bmat.reshape(n, n, n, n)
    return np.einsum("rprq->pq", b4).conj()


def random_cptp(dim: int, kraus_rank: int, seed) -> DynamicalMap:
    """Seeded random CPTP map with the given Kraus rank.

    Orthonormalizes Gaussian columns into a (dim*kraus_rank) x dim isometry
    and slices it into ``kraus_rank`` blocks K_j; completeness
    ``sum_j K_j^dagger K_j = I`` holds by construction.
    """
    if not 1 <= kraus_rank <= dim * dim:
        raise BadRank(f"kraus_rank must be in [1, {dim * dim}], got {kraus_rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim * kraus_rank, dim)) + 1j * rng.standard_normal(
        (dim * kraus_rank, dim)
    )
    q, _ = np.linalg.qr(g)
    terms = [(1.0, q[j * dim : (j + 1) * dim, :]) for j in range(kraus_rank)]
    return map_from_kraus(terms, dim)


def random_density(dim: int, seed) -> DensityMatrix:
    """Seeded random full-rank density matrix (Hilbert-Schmidt measure)."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = x @ dagger(x)
    m = (m + dagger(m)) / 2
    return DensityMatrix(m / np.trace(m).real)
