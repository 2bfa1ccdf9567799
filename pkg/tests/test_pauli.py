import numpy as np
import pytest

from cstomo import (
    HermitianMatrix,
    SettingsPlan,
    apply_sensing,
    apply_sensing_adjoint,
    born_probabilities,
    eigenprojectors,
    enumerate_settings,
    ghz_state,
    maximally_mixed,
)
from cstomo.exceptions import DimensionMismatchError, InvalidArgumentError
from cstomo.pauli import herm_to_vec, sensing_matrix, vec_to_herm
from conftest import random_state


def basis_proj(*bits):
    d = 2 ** len(bits)
    idx = int("".join(str(b) for b in bits), 2)
    mat = np.zeros((d, d), dtype=complex)
    mat[idx, idx] = 1.0
    return mat


class TestEigenprojectors:
    def test_zz_projectors(self):
        ps = eigenprojectors("ZZ")
        for k, bits in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
            np.testing.assert_allclose(ps.projectors[k], basis_proj(*bits), atol=1e-12)

    def test_x_single_qubit(self):
        ps = eigenprojectors("X")
        plus = np.full((2, 2), 0.5, dtype=complex)
        minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
        np.testing.assert_allclose(ps.projectors[0], plus, atol=1e-12)
        np.testing.assert_allclose(ps.projectors[1], minus, atol=1e-12)

    @pytest.mark.parametrize("word", ["X", "ZZ", "XYZ", "YYXX"])
    def test_completeness(self, word):
        total = eigenprojectors(word).projectors.sum(axis=0)
        np.testing.assert_allclose(total, np.eye(2 ** len(word)), atol=1e-10)

    @pytest.mark.parametrize("word", ["Z", "XY", "ZXY", "YZX"])
    def test_rank_one_idempotent_orthogonal(self, word):
        projs = eigenprojectors(word).projectors
        d = projs.shape[0]
        for k in range(d):
            p = projs[k]
            assert abs(np.trace(p).real - 1.0) < 1e-10
            assert np.abs(p @ p - p).max() < 1e-10
            for l in range(k + 1, d):
                assert np.abs(p @ projs[l]).max() < 1e-10

    def test_invalid_word(self):
        with pytest.raises(InvalidArgumentError):
            eigenprojectors("XQZ")
        with pytest.raises(InvalidArgumentError):
            eigenprojectors("")


class TestEnumerateSettings:
    def test_counts(self):
        assert len(enumerate_settings(4)) == 81
        assert enumerate_settings(1) == ["X", "Y", "Z"]

    def test_lexicographic(self):
        words = enumerate_settings(2)
        assert len(words) == 9
        assert words[0] == "XX"
        assert words[-1] == "ZZ"
        assert words == sorted(words)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            enumerate_settings(0)


class TestBornProbabilities:
    def test_ghz_zzzz(self):
        p = born_probabilities(ghz_state(4), "ZZZZ")
        expected = np.zeros(16)
        expected[0] = expected[15] = 0.5
        np.testing.assert_allclose(p, expected, atol=1e-12)

    def test_maximally_mixed_uniform(self):
        for word in ["XX", "YZ", "ZX"]:
            np.testing.assert_allclose(
                born_probabilities(maximally_mixed(2), word), np.full(4, 0.25), atol=1e-12
            )

    def test_ghz_xxxx_parity_oracle(self):
        # oracle: direct tr(Pi_k rho) with explicit 16x16 matrices
        rho = ghz_state(4)
        projs = eigenprojectors("XXXX").projectors
        oracle = np.array([np.trace(projs[k] @ rho.entries).real for k in range(16)])
        p = born_probabilities(rho, "XXXX")
        np.testing.assert_allclose(p, oracle, atol=1e-10)
        for k in range(16):
            parity = bin(k).count("1") % 2
            assert p[k] == pytest.approx(0.0 if parity else 1 / 8, abs=1e-10)

    def test_sum_one_and_range(self):
        rng = np.random.default_rng(8)
        for word in ["XY", "ZZ", "YX"]:
            p = born_probabilities(random_state(rng, 4), word)
            assert p.sum() == pytest.approx(1.0, abs=1e-15)
            assert np.all(p >= 0) and np.all(p <= 1)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            born_probabilities(ghz_state(2), "ZZZ")


class TestApplySensing:
    def test_mixed_state_uniform(self):
        plan = SettingsPlan(enumerate_settings(2), 100)
        out = apply_sensing(maximally_mixed(2), plan)
        np.testing.assert_allclose(out, np.full((9, 4), 25.0), atol=1e-10)

    def test_linearity(self):
        rng = np.random.default_rng(4)
        plan = SettingsPlan(enumerate_settings(2), 7)
        r1, r2 = random_state(rng, 4), random_state(rng, 4)
        a, b = 0.3, -1.2
        combo = HermitianMatrix(a * r1.entries + b * r2.entries)
        lhs = apply_sensing(combo, plan)
        rhs = a * apply_sensing(r1, plan) + b * apply_sensing(r2, plan)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_ghz_all_settings_row(self):
        plan = SettingsPlan(enumerate_settings(4), 650)
        out = apply_sensing(ghz_state(4), plan)
        j = plan.words.index("ZZZZ")
        expected = 650 * born_probabilities(ghz_state(4), "ZZZZ")
        np.testing.assert_allclose(out[j], expected, atol=1e-9)
        assert out[j][0] == pytest.approx(325.0)
        assert out[j][15] == pytest.approx(325.0)


class TestAdjoint:
    def test_adjoint_identity(self):
        rng = np.random.default_rng(12)
        plan = SettingsPlan(enumerate_settings(2), 3)
        for _ in range(100):
            g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            h = HermitianMatrix((g + g.conj().T) / 2)
            y = rng.standard_normal((9, 4))
            lhs = float(np.sum(apply_sensing(h, plan) * y))
            adj = apply_sensing_adjoint(y, plan)
            rhs = float(np.trace(h.entries @ adj.entries).real)
            assert lhs == pytest.approx(rhs, abs=1e-10 * max(1, abs(lhs)))

    def test_zero_data(self):
        plan = SettingsPlan(["ZZ"], 1)
        out = apply_sensing_adjoint(np.zeros((1, 4)), plan)
        assert np.abs(out.entries).max() == 0.0

    def test_single_projector(self):
        plan = SettingsPlan(["ZZ"], 1)
        out = apply_sensing_adjoint(np.array([[1.0, 0, 0, 0]]), plan)
        np.testing.assert_allclose(out.entries, basis_proj(0, 0), atol=1e-12)

    def test_shape_mismatch(self):
        plan = SettingsPlan(["ZZ"], 1)
        with pytest.raises(DimensionMismatchError):
            apply_sensing_adjoint(np.zeros((2, 4)), plan)


class TestTomographicCompleteness:
    def test_full_rank_at_n2(self):
        plan = SettingsPlan(enumerate_settings(2), 1)
        mat = sensing_matrix(plan)
        assert np.linalg.matrix_rank(mat, tol=1e-10) == 16

    def test_least_squares_inversion_recovers(self):
        rng = np.random.default_rng(19)
        plan = SettingsPlan(enumerate_settings(2), 1)
        A = sensing_matrix(plan)
        for _ in range(5):
            rho = random_state(rng, 4)
            y = A @ herm_to_vec(rho.entries)
            sol, *_ = np.linalg.lstsq(A, y, rcond=None)
            rec = vec_to_herm(sol, 4)
            assert np.linalg.norm(rec - rho.entries) < 1e-8


class TestSettingsPlan:
    def test_duplicate_words_rejected(self):
        with pytest.raises(InvalidArgumentError):
            SettingsPlan(["ZZ", "ZZ"], 5)

    def test_bad_shots(self):
        with pytest.raises(InvalidArgumentError):
            SettingsPlan(["ZZ"], 0)

    def test_json_round_trip(self):
        plan = SettingsPlan(["ZZ", "XY"], [650, 100])
        back = SettingsPlan.from_json_dict(plan.to_json_dict())
        assert back == plan
