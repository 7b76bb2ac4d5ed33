"""Realize a CPTP map as a unitary on system + ancilla plus a partial trace.

From the canonical decomposition ``rho -> sum_a w_a L_a rho L_a^dagger`` the
isometry ``|r'>|0> -> sum_{r,a} sqrt(w_a) L_a[r, r'] |r>|a>`` is built on an
ancilla of dimension nu (the decomposition rank, at most N^2), completed to a
unitary U, and the map is recovered as ``partial_trace(U (rho (x) |0><0|)
U^dagger)`` over the ancilla. The completion columns are arbitrary by
construction; the reduced output never depends on them.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass

import numpy as np

from .channel import (
    CanonicalDecomposition,
    DensityMatrix,
    DynamicalMap,
    apply_map,
    canonical_decompose,
    random_density,
)
from .errors import (
    DimensionMismatch,
    NotCompletelyPositive,
    NotIsometry,
    NotTracePreserving,
    ValidationError,
)
from .linalg import (
    DEFAULT_TOL,
    CompositeIndexConvention,
    complete_to_unitary,
    dagger,
    kron,
    max_abs,
    partial_trace_ancilla,
)

# Eigen-solver noise on genuinely CP maps: weights this far below zero are
# treated as zero before taking square roots.
WEIGHT_CLAMP = 1e-12

# Trace-preservation residual above which the isometry columns cannot be
# orthonormal and construction fails early.
TP_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DilationUnitary:
    """Unitary on system (x) ancilla whose first-ancilla-slot columns encode a map."""

    sys_dim: int
    anc_dim: int
    u: np.ndarray
    conv: CompositeIndexConvention
    iso_cols: int
    tol: InitVar[float] = DEFAULT_TOL

    def __post_init__(self, tol):
        u = np.asarray(self.u, dtype=complex)
        object.__setattr__(self, "u", u)
        size = self.sys_dim * self.anc_dim
        if u.shape != (size, size):
            raise DimensionMismatch(
                f"unitary shape {u.shape} does not match sys_dim*anc_dim = {size}"
            )
        if (self.conv.dim_sys, self.conv.dim_anc) != (self.sys_dim, self.anc_dim):
            raise DimensionMismatch("index convention does not match declared dims")
        if self.anc_dim > self.sys_dim**2:
            raise ValidationError(
                f"ancilla dim {self.anc_dim} exceeds sys_dim^2 = {self.sys_dim ** 2}"
            )
        residual = max_abs(dagger(u) @ u - np.eye(size))
        if residual > tol:
            raise NotIsometry(f"unitarity residual {residual:.3e} exceeds {tol:.1e}")


def _sqrt_weights(dec: CanonicalDecomposition, clamp: float) -> list:
    """Square roots of the weights, clamping eigen-noise negatives to zero."""
    roots = []
    for t in dec.terms:
        if t.weight < -clamp:
            raise NotCompletelyPositive(
                f"negative weight {t.weight:.6g} has no real square root; "
                "the map is not completely positive"
            )
        roots.append(math.sqrt(max(t.weight, 0.0)))
    return roots


def build_dilation_isometry(dec: CanonicalDecomposition) -> np.ndarray:
    """The (N*nu) x N isometry with sqrt(w_a) L_a[r, r'] at composite row (r, a).

    Column r' is the image of |r'>|0>. Columns are orthonormal exactly when
    the decomposed map is trace-preserving, so a trace-preservation residual
    above TP_RESIDUAL_TOL fails early with the physical reason.
    """
    n = dec.dim
    nu = dec.rank
    roots = _sqrt_weights(dec, WEIGHT_CLAMP)
    effect = sum(
        (t.weight * (dagger(t.op) @ t.op) for t in dec.terms),
        start=np.zeros((n, n), dtype=complex),
    )
    tp_residual = max_abs(effect - np.eye(n))
    if tp_residual > TP_RESIDUAL_TOL:
        raise NotTracePreserving(
            f"sum of weighted L^dagger L deviates from identity by {tp_residual:.3e}; "
            "the isometry columns would not be orthonormal"
        )
    iso = np.zeros((n * nu, n), dtype=complex)
    for alpha, (root, term) in enumerate(zip(roots, dec.terms)):
        # Rows (r, alpha) for fixed alpha sit at flat indices alpha, alpha+nu, ...
        iso[alpha::nu, :] = root * term.op
    return iso


def _assemble_unitary(iso: np.ndarray, conv: CompositeIndexConvention, rng=None) -> np.ndarray:
    """Complete isometry columns to a unitary, anchored at composite columns (r', 0).

    The remaining columns (r', a != 0) take the completion vectors in order;
    their content is irrelevant to the reduced dynamics.
    """
    u0 = complete_to_unitary(iso, tol=TP_RESIDUAL_TOL, rng=rng)
    size = conv.size
    n = conv.dim_sys
    anchor = [conv.flat(rp, 0) for rp in range(n)]
    rest = [c for c in range(size) if c not in set(anchor)]
    u = np.empty((size, size), dtype=complex)
    u[:, anchor] = u0[:, :n]
    u[:, rest] = u0[:, n:]
    return u


def build_dilation_unitary(dec: CanonicalDecomposition, rng=None) -> DilationUnitary:
    """Complete the dilation isometry to a full unitary on system (x) ancilla.

    With ``rng`` None the completion scans standard basis vectors, giving a
    deterministic unitary; passing a seeded generator draws Gaussian candidate
    vectors instead, exercising the freedom in the unfixed columns.
    """
    iso = build_dilation_isometry(dec)
    conv = CompositeIndexConvention(dim_sys=dec.dim, dim_anc=dec.rank)
    u = _assemble_unitary(iso, conv, rng=rng)
    return DilationUnitary(
        sys_dim=dec.dim, anc_dim=dec.rank, u=u, conv=conv, iso_cols=dec.dim
    )


def simulate_via_dilation(du: DilationUnitary, rho) -> tuple:
    """Evolve rho (x) |0><0| by the unitary and trace out the ancilla.

    Returns ``(joint, reduced)``: the full post-evolution state and its
    system reduction.
    """
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = du.sys_dim
    if mat.shape != (n, n):
        raise DimensionMismatch(f"state shape {mat.shape} does not match sys_dim {n}")
    anc0 = np.zeros((du.anc_dim, du.anc_dim), dtype=complex)
    anc0[0, 0] = 1.0
    joint = du.u @ kron(mat, anc0) @ dagger(du.u)
    reduced = partial_trace_ancilla(joint, du.conv)
    return joint, reduced


@dataclass(frozen=True)
class VerificationReport:
    """Worst-case deviation between dilated and direct evolution."""

    trials: int
    max_error: float


def verify_dilation(dmap: DynamicalMap, trials: int, seed) -> VerificationReport:
    """Compare the dilation route against direct application on random states.

    Per-trial states are drawn from generators derived from (seed, trial
    index), so results are reproducible and order-independent.
    """
    dec = canonical_decompose(dmap)
    du = build_dilation_unitary(dec)
    streams = np.random.SeedSequence(seed).spawn(trials)
    worst = 0.0
    for stream in streams:
        rho = random_density(dmap.dim, np.random.default_rng(stream))
        _, reduced = simulate_via_dilation(du, rho)
        direct = apply_map(dmap, rho)
        worst = max(worst, max_abs(reduced - direct))
    return VerificationReport(trials=trials, max_error=float(worst))
