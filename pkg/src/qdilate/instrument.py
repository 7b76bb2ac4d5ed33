"""Sets of CP maps as generalized measurements, realized by one joint unitary.

An instrument assigns one CP map per outcome; outcome i occurs with
probability ``trace(map_i rho)`` and leaves the normalized state
``map_i rho / trace(map_i rho)``. A complete instrument (total effect equal to
the identity) is realized on a single ancilla whose basis is laid out in
sectors, one per outcome: the joint unitary sends ``|r'>|0>`` to
``sum sqrt(w) L[r, r'] |r>|sector slot>``, and a projective readout of the
ancilla sector reproduces the statistics. Incomplete sets are completed by
appending a discard map carrying the leftover effect.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field

import numpy as np

from .channel import (
    DensityMatrix,
    DynamicalMap,
    apply_map,
    canonical_decompose,
    map_from_kraus,
    povm_effect,
)
from .dilation import _assemble_unitary, _sqrt_weights
from .errors import (
    DimensionMismatch,
    Incomplete,
    NotCompletelyPositive,
    NotIsometry,
    OverComplete,
    ValidationError,
)
from .linalg import (
    DEFAULT_TOL,
    CompositeIndexConvention,
    dagger,
    kron,
    max_abs,
    psd_sqrt,
)

# Member maps may dip this far below CP from eigen-solver noise.
MEMBER_CP_TOL = 1e-10

# Total-effect deviation from identity below which a set counts as complete.
COMPLETENESS_TOL = 1e-8

# Defect eigenvalues below this signal total probability above 1.
PAD_PSD_TOL = 1e-9

# Outcomes with probability at or below this get no normalized post state.
POST_STATE_THRESHOLD = 1e-12


def _normalized_maps(maps) -> tuple:
    out = []
    for label, dmap in maps:
        if not isinstance(dmap, DynamicalMap):
            raise ValidationError(f"outcome {label!r} does not hold a dynamical map")
        out.append((str(label), dmap))
    return tuple(out)


def _total_effect(maps, dim: int) -> np.ndarray:
    total = np.zeros((dim, dim), dtype=complex)
    for _, dmap in maps:
        total += povm_effect(dmap)
    return total


@dataclass(frozen=True, eq=False)
class Instrument:
    """Ordered labeled CP maps, one per measurement outcome."""

    dim: int
    maps: tuple
    padded_index: int = None
    complete: bool = field(init=False)

    def __post_init__(self):
        maps = _normalized_maps(self.maps)
        object.__setattr__(self, "maps", maps)
        if not maps:
            raise ValidationError("instrument needs at least one outcome map")
        labels = [label for label, _ in maps]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"outcome labels must be unique, got {labels}")
        for label, dmap in maps:
            if dmap.dim != self.dim:
                raise DimensionMismatch(
                    f"outcome {label!r} has dim {dmap.dim}, instrument has dim {self.dim}"
                )
            min_eig = float(
                np.linalg.eigvalsh((dmap.bmat + dagger(dmap.bmat)) / 2).min()
            )
            if min_eig < -MEMBER_CP_TOL:
                raise NotCompletelyPositive(
                    f"outcome {label!r} is not completely positive "
                    f"(min eigenvalue {min_eig:.3e})"
                )
        if self.padded_index is not None and not 0 <= self.padded_index < len(maps):
            raise ValidationError(f"padded_index {self.padded_index} out of range")
        defect = np.eye(self.dim) - _total_effect(maps, self.dim)
        object.__setattr__(self, "complete", bool(max_abs(defect) <= COMPLETENESS_TOL))

    @property
    def num_outcomes(self) -> int:
        return len(self.maps)

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.maps)


@dataclass(frozen=True)
class Sector:
    """Half-open ancilla index range [start, stop) owned by one outcome."""

    label: str
    start: int
    stop: int

    @property
    def size(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True, eq=False)
class InstrumentDilation:
    """Joint unitary plus the ancilla sector layout of its outcomes."""

    sys_dim: int
    anc_dim: int
    u: np.ndarray
    sectors: tuple
    conv: CompositeIndexConvention
    tol: InitVar[float] = DEFAULT_TOL

    def __post_init__(self, tol):
        u = np.asarray(self.u, dtype=complex)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "sectors", tuple(self.sectors))
        size = self.sys_dim * self.anc_dim
        if u.shape != (size, size):
            raise DimensionMismatch(
                f"unitary shape {u.shape} does not match sys_dim*anc_dim = {size}"
            )
        if (self.conv.dim_sys, self.conv.dim_anc) != (self.sys_dim, self.anc_dim):
            raise DimensionMismatch("index convention does not match declared dims")
        cursor = 0
        for sector in self.sectors:
            if sector.start != cursor or sector.stop < sector.start:
                raise ValidationError("sectors must partition the ancilla range in order")
            cursor = sector.stop
        if cursor != self.anc_dim:
            raise ValidationError(
                f"sectors cover [0, {cursor}) but the ancilla has dim {self.anc_dim}"
            )
        bound = len(self.sectors) * self.sys_dim**2
        if self.anc_dim > bound:
            raise ValidationError(
                f"ancilla dim {self.anc_dim} exceeds num_outcomes*sys_dim^2 = {bound}"
            )
        residual = max_abs(dagger(u) @ u - np.eye(size))
        if residual > tol:
            raise NotIsometry(f"unitarity residual {residual:.3e} exceeds {tol:.1e}")


@dataclass(frozen=True, eq=False)
class OutcomeResult:
    """One outcome: its probability, raw weighted state, and normalized post state."""

    label: str
    probability: float
    post_state: DensityMatrix
    raw_unnormalized: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.raw_unnormalized, dtype=complex)
        object.__setattr__(self, "raw_unnormalized", raw)
        p = float(self.probability)
        object.__setattr__(self, "probability", p)
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"outcome probability {p} outside [0, 1]")
        if abs(p - np.trace(raw).real) > DEFAULT_TOL:
            raise ValidationError(
                f"probability {p} does not match trace of the unnormalized state"
            )


def _make_outcome(label: str, raw: np.ndarray, threshold: float) -> OutcomeResult:
    p = float(np.trace(raw).real)
    if p < -DEFAULT_TOL or p > 1.0 + DEFAULT_TOL:
        raise ValidationError(f"outcome {label!r} has probability {p} outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    post = None
    if p > threshold:
        # Dividing by a small probability amplifies additive noise; scale the
        # validation tolerance accordingly.
        post = DensityMatrix(raw / p, tol=max(DEFAULT_TOL, 1e-13 / p))
    return OutcomeResult(label=label, probability=p, post_state=post, raw_unnormalized=raw)


def check_completeness(inst: Instrument, tol: float = COMPLETENESS_TOL) -> tuple:
    """Return (complete, defect) with defect = identity minus the total effect."""
    defect = np.eye(inst.dim) - _total_effect(inst.maps, inst.dim)
    return bool(max_abs(defect) <= tol), defect


def pad_to_complete(inst: Instrument) -> Instrument:
    """Append a discard map carrying the leftover effect of an incomplete set.

    The discard map has the single Kraus operator sqrt(defect), the minimal
    realization of the missing effect. A defect with an eigenvalue below
    -PAD_PSD_TOL means the existing outcomes already overshoot probability 1,
    which no padding can fix.
    """
    if inst.complete:
        return inst
    _, defect = check_completeness(inst)
    defect = (defect + dagger(defect)) / 2
    min_eig = float(np.linalg.eigvalsh(defect).min())
    if min_eig < -PAD_PSD_TOL:
        raise OverComplete(
            f"total effect exceeds identity (defect eigenvalue {min_eig:.3e}); "
            "outcome probabilities would sum above 1"
        )
    kraus = psd_sqrt(defect, tol=PAD_PSD_TOL)
    label = "discard"
    suffix = 1
    while label in inst.labels:
        suffix += 1
        label = f"discard_{suffix}"
    discard = map_from_kraus([(1.0, kraus)], inst.dim)
    return Instrument(
        dim=inst.dim,
        maps=inst.maps + ((label, discard),),
        padded_index=inst.num_outcomes,
    )


def build_instrument_dilation(inst: Instrument, rng=None) -> InstrumentDilation:
    """Combine all outcome maps into one unitary with sector-labeled ancilla.

    Each outcome map is eigen-decomposed; outcome i owns an ancilla sector of
    its decomposition rank, so anc_dim never exceeds num_outcomes*dim^2. The
    isometry column r' carries sqrt(w) L[r, r'] at composite row (r, slot) for
    every term of every outcome, and is orthonormal exactly because the total
    effect is the identity.
    """
    complete, defect = check_completeness(inst)
    if not complete:
        raise Incomplete(
            f"total effect deviates from identity by {max_abs(defect):.3e}; "
            "pad the instrument before building its dilation"
        )
    n = inst.dim
    decs = [canonical_decompose(dmap) for _, dmap in inst.maps]
    sectors = []
    cursor = 0
    for (label, _), dec in zip(inst.maps, decs):
        sectors.append(Sector(label=label, start=cursor, stop=cursor + dec.rank))
        cursor += dec.rank
    anc_dim = cursor
    iso = np.zeros((n * anc_dim, n), dtype=complex)
    for sector, dec in zip(sectors, decs):
        roots = _sqrt_weights(dec, MEMBER_CP_TOL)
        for alpha, (root, term) in enumerate(zip(roots, dec.terms)):
            slot = sector.start + alpha
            iso[slot::anc_dim, :] = root * term.op
    conv = CompositeIndexConvention(dim_sys=n, dim_anc=anc_dim)
    u = _assemble_unitary(iso, conv, rng=rng)
    return InstrumentDilation(
        sys_dim=n, anc_dim=anc_dim, u=u, sectors=tuple(sectors), conv=conv
    )


def measure_via_dilation(
    dil: InstrumentDilation, rho, threshold: float = POST_STATE_THRESHOLD
) -> tuple:
    """Evolve rho (x) |0><0| jointly, then project the ancilla sector by sector.

    For each outcome the ancilla is projected onto its sector and traced out,
    giving the weighted system state whose trace is the outcome probability.
    """
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = dil.sys_dim
    if mat.shape != (n, n):
        raise DimensionMismatch(f"state shape {mat.shape} does not match sys_dim {n}")
    anc0 = np.zeros((dil.anc_dim, dil.anc_dim), dtype=complex)
    anc0[0, 0] = 1.0
    joint = dil.u @ kron(mat, anc0) @ dagger(dil.u)
    j4 = joint.reshape(n, dil.anc_dim, n, dil.anc_dim)
    results = []
    for sector in dil.sectors:
        block = j4[:, sector.start : sector.stop, :, sector.start : sector.stop]
        raw = np.einsum("rasa->rs", block)
        results.append(_make_outcome(sector.label, raw, threshold))
    return tuple(results)


def outcome_statistics(
    inst: Instrument, rho, threshold: float = POST_STATE_THRESHOLD
) -> tuple:
    """Apply each outcome map directly; the reference for measure_via_dilation."""
    results = []
    for label, dmap in inst.maps:
        raw = apply_map(dmap, rho)
        results.append(_make_outcome(label, raw, threshold))
    return tuple(results)


def sample_outcomes(dil: InstrumentDilation, rho, shots: int, seed) -> dict:
    """Draw outcome counts from the dilation statistics by inverse CDF.

    Counts always sum to shots and are identical for identical seeds. Zero
    count outcomes are included in the histogram.
    """
    if shots < 1:
        raise ValidationError(f"shots must be at least 1, got {shots}")
    outcomes = measure_via_dilation(dil, rho)
    probs = np.clip([o.probability for o in outcomes], 0.0, None)
    cdf = np.cumsum(probs)
    total = cdf[-1]
    if total <= 0.0:
        raise ValidationError("all outcome probabilities vanish; nothing to sample")
    draws = np.random.default_rng(seed).random(shots) * total
    idx = np.searchsorted(cdf, draws, side="right")
    idx = np.clip(idx, 0, len(outcomes) - 1)
    counts = np.bincount(idx, minlength=len(outcomes))
    return {o.label: int(c) for o, c in zip(outcomes, counts)}
