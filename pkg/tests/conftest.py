"""Shared fixtures: paths to shipped spec files and random instrument builders."""

from pathlib import Path

import numpy as np
import pytest

import qdilate as q

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


def channel_path(name: str) -> Path:
    return FIXTURES / "channels" / name


def instrument_path(name: str) -> Path:
    return FIXTURES / "instruments" / name


def state_path(name: str) -> Path:
    return FIXTURES / "states" / name


def make_split_instrument(dim: int, mu: int, seed) -> q.Instrument:
    """Random complete instrument: a random CPTP map cut into mu pieces.

    The union of all pieces is the original channel, so the total effect is
    the identity up to the channel's own construction noise.
    """
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(mu, dim * dim + 1))
    dec = q.canonical_decompose(q.random_cptp(dim, rank, rng))
    assert dec.rank >= mu
    groups = [[] for _ in range(mu)]
    for j, term in enumerate(dec.terms):
        groups[j % mu].append((term.weight, term.op))
    maps = tuple((f"o{i}", q.map_from_kraus(g, dim)) for i, g in enumerate(groups))
    return q.Instrument(dim=dim, maps=maps)


def make_projective_instrument(dim: int, mu: int, seed) -> q.Instrument:
    """Random complete instrument from a Haar-random orthonormal basis.

    Basis vectors are grouped into mu rank-deficient projectors summing to
    the identity; requires mu <= dim.
    """
    assert mu <= dim
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    basis, _ = np.linalg.qr(g)
    groups = [[] for _ in range(mu)]
    for k in range(dim):
        groups[k % mu].append(basis[:, k])
    maps = []
    for i, cols in enumerate(groups):
        proj = sum(np.outer(c, c.conj()) for c in cols)
        maps.append((f"o{i}", q.map_from_kraus([(1.0, proj)], dim)))
    return q.Instrument(dim=dim, maps=tuple(maps))


@pytest.fixture
def plus_state() -> q.DensityMatrix:
    return q.DensityMatrix(np.full((2, 2), 0.5, dtype=complex))


@pytest.fixture
def excited_state() -> q.DensityMatrix:
    return q.DensityMatrix(P1)
