import numpy as np
import pytest

from elliptic.family import FCoeffs
from numeric.oracle import (
    IDENTITIES,
    ClosedForms,
    EvalPoint,
    check_engine_agreement,
    check_identity,
    oracle_suite,
    relative_error,
    theta_num,
    theta_tilde_at,
    z_shift_factor,
)
from geometry.model import P2, P11
from series.lattice import Monomial

POINTS = 6


@pytest.fixture(scope="module")
def theta_forms():
    return ClosedForms(FCoeffs.from_preset("theta"))


@pytest.fixture(scope="module")
def minimal_forms():
    return ClosedForms(FCoeffs.from_preset("minimal"))


class TestThetaFunctions:
    def test_vanishes_at_one(self):
        assert abs(theta_num(1.0, 0.1)) < 1e-15

    def test_odd_under_inversion(self):
        x = 1.3 + 0.4j
        assert abs(theta_num(1 / x, 0.2) + theta_num(x, 0.2)) < 1e-12

    def test_sum_form_matches_product(self):
        pt = EvalPoint.sample(np.random.default_rng(1), 4, qmag=0.2)
        arg = Monomial.of(a=1)
        m = np.arange(-30, 31)[:, None]
        t = m + 0.5
        series = (np.where(m % 2 == 0, 1.0, -1.0) * np.exp(t * t / 2 * pt.logs[0] + t * pt.logs[1])).sum(axis=0)
        assert np.max(np.abs(series - theta_tilde_at(pt, arg))) < 1e-10

    def test_sample_modulus(self):
        pt = EvalPoint.sample(np.random.default_rng(0), 5, qmag=0.3)
        assert len(pt) == 5
        assert np.allclose(np.abs(pt.q), 0.3)

    def test_relative_error(self):
        error = relative_error([np.ones(2)], [np.array([1.0, 0.5])], 2)
        assert error[0] == 0
        assert error[1] == pytest.approx(0.5 / 1.5)

    def test_relative_error_beyond_a_bound(self):
        error = relative_error([np.ones(2)], [np.array([1.25, 3.0])], 2, bound=0.5)
        assert error[0] == 0
        assert error[1] == pytest.approx(1.5 / 4.0)


class TestIdentities:
    @pytest.mark.parametrize("name", sorted(IDENTITIES))
    def test_theta_preset(self, theta_forms, name):
        report = check_identity(theta_forms, name, points=POINTS)
        assert report.passed, report.residual_sample
        assert report.detail["max_error"] < 1e-9

    @pytest.mark.parametrize(
        "name",
        ["duality", "qdiff-z", "point-swap", "bar-relation", "qdiff-a", "qdiff-v", "z-periodicity", "k-limit-normalization"],
    )
    def test_minimal_preset(self, minimal_forms, name):
        report = check_identity(minimal_forms, name, points=POINTS)
        assert report.passed, report.residual_sample

    def test_odd_class_breaks_duality(self):
        forms = ClosedForms(FCoeffs.from_preset("broken-odd"))
        assert check_identity(forms, "duality", points=POINTS).failed

    def test_seed_is_reproducible(self, theta_forms):
        first = check_identity(theta_forms, "duality", points=POINTS, seed=7)
        second = check_identity(theta_forms, "duality", points=POINTS, seed=7)
        assert first.detail == second.detail
        assert first.status == second.status

    def test_negative_seed(self, theta_forms):
        with pytest.raises(ValueError):
            check_identity(theta_forms, "jtp", seed=-1)


class TestEngineAgreement:
    def test_truncated_series_within_bound(self):
        report = check_engine_agreement(FCoeffs.from_preset("minimal"), order=2, points=POINTS)
        assert report.passed, report.residual_sample
        assert report.detail["fitted_constant"] <= 100.0

    def test_suite(self):
        reports = oracle_suite(FCoeffs.from_preset("theta"), names=("jtp", "engine"), points=POINTS)
        assert [r.check for r in reports] == ["jtp", "engine"]

    def test_unknown_identity(self):
        with pytest.raises(ValueError):
            oracle_suite(FCoeffs.from_preset("theta"), names=("nope",))


def _labels(forms, name):
    pt = EvalPoint.sample(np.random.default_rng(3), 3, qmag=0.1, spread=0.0)
    return IDENTITIES[name].evaluate(forms, pt)


class TestShiftIdentities:
    def test_eigenvalue_only_under_the_eigen_condition(self, theta_forms, minimal_forms):
        theta = [label for label, *_ in _labels(theta_forms, "qdiff-v")]
        minimal = [label for label, *_ in _labels(minimal_forms, "qdiff-v")]
        assert "eigen f1" in theta and "eigen f2" in theta
        assert f"x_p E({P2})|_{P11}" in theta
        assert not any(label.startswith(("eigen", "x_p")) for label in minimal)
        assert f"engine E2|_{P2}" in minimal

    @pytest.mark.parametrize("name", ["qdiff-a", "qdiff-v", "z-periodicity", "k-limit-normalization"])
    def test_engine_labels_carry_a_bound(self, minimal_forms, name):
        pairs = _labels(minimal_forms, name)
        engine = [pair for pair in pairs if pair[0].startswith("engine")]
        assert engine
        assert all(len(pair) == 4 for pair in engine)

    @pytest.mark.parametrize("mu", [P2, P11])
    @pytest.mark.parametrize("p", [P2, P11])
    def test_unit_z_shift_is_the_g_factor(self, minimal_forms, mu, p):
        assert z_shift_factor(minimal_forms, mu, p, 1) == minimal_forms.gmatrix.factor(minimal_forms.model, mu, p)

    def test_double_z_shift_composes(self, minimal_forms):
        once = z_shift_factor(minimal_forms, P2, P11, 1)
        twice = z_shift_factor(minimal_forms, P2, P11, 2)
        assert twice == once * once.shift("z", 1)

    def test_k_limit_reads_at_small_q(self, minimal_forms):
        report = check_identity(minimal_forms, "k-limit-normalization", points=POINTS)
        assert report.passed, report.residual_sample
        assert report.detail["qmag"] < 1e-12

    def test_leading_coefficient_breaks_k_limit(self):
        forms = ClosedForms(FCoeffs.from_preset("broken-f1"))
        report = check_identity(forms, "k-limit-normalization", points=POINTS)
        assert report.failed
        assert any(f"E({P2})" in line for line in report.residual_sample)
