import numpy as np
import pytest

from cstomo import DensityMatrix, SettingsPlan, dephased_ghz, enumerate_settings

# dephasing strength calibrated so the surrogate matches the reported
# figures of merit: F(GHZ) = 0.855, purity ~= 0.607
SURROGATE_LAMBDA = 0.53795
PAPER_SHOTS = 650


@pytest.fixture(scope="session")
def surrogate_state():
    return dephased_ghz(4, SURROGATE_LAMBDA)


@pytest.fixture(scope="session")
def full_plan_4q():
    return SettingsPlan(enumerate_settings(4), PAPER_SHOTS)


def random_state(rng, d, rank=None):
    """Haar-ish random density matrix of the given dimension and rank."""
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = g @ g.conj().T
    return DensityMatrix(mat / mat.trace().real)


def random_pure_state(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))
