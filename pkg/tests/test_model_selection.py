import numpy as np
import pytest

from cstomo import (
    Dataset,
    RandomSource,
    SettingsPlan,
    cross_validate,
    dephased_ghz,
    enumerate_settings,
    epsilon_hat,
    expected_noise,
    ghz_state,
    maximally_mixed,
    prediction_error,
    restrict_dataset,
    sample_counts,
)
from cstomo.data import expected_counts
from cstomo.exceptions import InvalidArgumentError
from conftest import random_pure_state


class TestEpsilonHat:
    def test_uniform_counts_closed_form(self):
        # oracle: m records of N uniform counts give m * N * (1 - 1/d)
        n, shots = 2, 400
        words = enumerate_settings(n)
        ds = Dataset(n, [(w, [shots // 4] * 4) for w in words])
        assert epsilon_hat(ds) == pytest.approx(9 * shots * (1 - 0.25), abs=1e-9)

    def test_concentrated_counts_zero(self):
        ds = Dataset(2, [("ZZ", [500, 0, 0, 0])])
        assert epsilon_hat(ds) == pytest.approx(0.0, abs=1e-12)

    def test_additive_over_records(self):
        rho = dephased_ghz(2, 0.3)
        plan = SettingsPlan(enumerate_settings(2), 650)
        ds = sample_counts(rho, plan, RandomSource(4))
        parts = [restrict_dataset(ds, [w]) for w in ds.words]
        assert epsilon_hat(ds) == pytest.approx(
            sum(epsilon_hat(p) for p in parts), rel=1e-12
        )

    def test_noiseless_data_matches_expected(self):
        rho = dephased_ghz(2, 0.4)
        plan = SettingsPlan(enumerate_settings(2), 650)
        ds = expected_counts(rho, plan)
        assert epsilon_hat(ds) == pytest.approx(expected_noise(rho, plan), rel=1e-10)

    def test_monte_carlo_mean(self):
        # mean of the plug-in estimate approaches the exact noise power
        rho = dephased_ghz(2, 0.5)
        plan = SettingsPlan(enumerate_settings(2), 650)
        rng = RandomSource(55)
        vals = [
            epsilon_hat(sample_counts(rho, plan, rng.substream(i))) for i in range(300)
        ]
        assert np.mean(vals) == pytest.approx(expected_noise(rho, plan), rel=0.02)


class TestExpectedNoise:
    def test_ghz_zz(self):
        # p = (1/2, 0, 0, 1/2): noise power N * 2 * (1/2)(1/2) = N/2
        plan = SettingsPlan(["ZZ"], 100)
        assert expected_noise(ghz_state(2), plan) == pytest.approx(50.0)

    def test_maximally_mixed(self):
        plan = SettingsPlan(enumerate_settings(2), 100)
        assert expected_noise(maximally_mixed(2), plan) == pytest.approx(
            9 * 100 * (1 - 0.25)
        )

    def test_pure_eigenstate_zero(self):
        from cstomo import DensityMatrix

        mat = np.zeros((4, 4), dtype=complex)
        mat[0, 0] = 1.0
        plan = SettingsPlan(["ZZ"], 650)
        assert expected_noise(DensityMatrix(mat), plan) == pytest.approx(0.0, abs=1e-10)


class TestPredictionError:
    def _split(self, seed=9):
        rho = dephased_ghz(2, 0.2)
        plan = SettingsPlan(enumerate_settings(2), 650)
        ds = sample_counts(rho, plan, RandomSource(seed))
        return restrict_dataset(ds, ds.words[:6]), restrict_dataset(ds, ds.words[6:])

    def test_shared_words_rejected(self):
        train, _ = self._split()
        with pytest.raises(InvalidArgumentError):
            prediction_error(train, train, 100.0)

    def test_qubit_mismatch_rejected(self):
        train, _ = self._split()
        other = Dataset(1, [("Z", [3, 7])])
        with pytest.raises(InvalidArgumentError):
            prediction_error(train, other, 100.0)

    def test_noiseless_reconstruction_predicts_well(self):
        rng = np.random.default_rng(17)
        truth = random_pure_state(rng, 4)
        plan = SettingsPlan(enumerate_settings(2), 650)
        ds = expected_counts(truth, plan)
        train = restrict_dataset(ds, ds.words[:6])
        test = restrict_dataset(ds, ds.words[6:])
        err = prediction_error(train, test, 1e-4)
        assert err < 1.0

    def test_infeasible_falls_back_to_test_norm(self):
        train, test = self._split()
        err = prediction_error(train, test, 1e-12)
        assert err == pytest.approx(
            float(np.linalg.norm(test.counts_matrix().ravel()))
        )


@pytest.fixture(scope="module")
def dataset():
    rho = dephased_ghz(2, 0.3)
    plan = SettingsPlan(enumerate_settings(2), 650)
    return sample_counts(rho, plan, RandomSource(70))


@pytest.fixture(scope="module")
def report(dataset):
    return cross_validate(
        dataset,
        m_values=(6, 9),
        epsilon_multipliers=(0.25, 1.0, 3.0),
        folds=3,
        repetitions=2,
        rng=RandomSource(71),
    )


class TestCrossValidate:
    def test_grid_shape(self, report):
        assert len(report.grid) == 6
        keys = {(c.m, c.epsilon_multiplier) for c in report.grid}
        assert keys == {(m, e) for m in (6, 9) for e in (0.25, 1.0, 3.0)}

    def test_cells_finite(self, report):
        for c in report.grid:
            assert c.error is None
            assert np.isfinite(c.mean_error)
            assert c.std_error >= 0.0
            assert 0.0 <= c.infeasible_fraction <= 1.0

    def test_infeasible_fraction_nonincreasing(self, report):
        # the fit ball only grows with epsilon, on identical draws
        for m in (6, 9):
            fracs = [report.cell(m, e).infeasible_fraction for e in (0.25, 1.0, 3.0)]
            assert all(a >= b for a, b in zip(fracs, fracs[1:]))

    def test_deterministic(self, dataset, report):
        again = cross_validate(
            dataset,
            m_values=(6, 9),
            epsilon_multipliers=(0.25, 1.0, 3.0),
            folds=3,
            repetitions=2,
            rng=RandomSource(71),
        )
        assert again.to_json() == report.to_json()

    def test_requires_rng(self, dataset):
        with pytest.raises(InvalidArgumentError):
            cross_validate(dataset, m_values=(6,), repetitions=1)

    def test_csv_header(self, report):
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "m,epsilon_multiplier,mean_error,std_error,infeasible_fraction"
        assert len(lines) == 1 + len(report.grid)
