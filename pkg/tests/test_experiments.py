import math

import mpmath as mp
import numpy as np
import pytest

from gausscompose import ButcherTableau, classical_rk4, gauss_tableau, harmonic_oscillator, pendulum
from gausscompose import experiments as ex
from reference_tableaux import CONJUGATE4


class TestConvergenceReport:
    def test_rates(self):
        rep = ex.ConvergenceReport([0.1, 0.05, 0.025], [1.6e-3, 1e-4, 6.25e-6])
        assert rep.rate[0] == 0.0
        np.testing.assert_allclose(rep.rate[1:], [4.0, 4.0])
        assert rep.final_rate == pytest.approx(4.0)

    def test_halving_enforced(self):
        with pytest.raises(ValueError):
            ex.ConvergenceReport([0.1, 0.03], [1.0, 0.1])
        with pytest.raises(ValueError):
            ex.ConvergenceReport([0.1, 0.05], [1.0])

    def test_csv(self):
        rep = ex.ConvergenceReport([0.5, 0.25], [1.0, 0.25], "err")
        lines = rep.to_csv().split("\n")
        assert lines[0] == "h,err,rate"
        assert lines[2] == "0.25,0.25,2.0"
        assert rep.to_csv().endswith("\n") and not any(l.endswith(",") for l in lines)

    def test_format_five_digits(self):
        rep = ex.ConvergenceReport([0.125, 0.0625], [4.75612e-5, 3.42391e-6])
        text = rep.format()
        assert "1/8" in text and "4.7561e-05" in text and "3.80" in text


class TestBvp:
    @pytest.mark.parametrize("eps", [0.1, 1e-3, 1e6])
    def test_exact_solution(self, eps):
        mp.mp.dps = 40
        k = 1 / mp.sqrt(mp.mpf(eps))
        x = np.linspace(0, 1, 11)
        ref = [float((mp.exp(-k * xi) - mp.exp(k * (xi - 2))) / (1 - mp.exp(-2 * k)))
               for xi in x]
        np.testing.assert_allclose(ex.bvp_exact(eps, x), ref, rtol=1e-13, atol=1e-15)

    def test_forms_agree(self):
        x = np.linspace(0, 1, 7)
        k = 1 / math.sqrt(0.1)
        ref = np.sinh(k * (1 - x)) / np.sinh(k)
        np.testing.assert_allclose(ex.bvp_exact(0.1, x), ref, rtol=1e-14, atol=1e-16)

    def test_boundary_conditions(self):
        recs = ex.shoot_bvp(0.1, 1 / 16)
        assert recs[0].y_start[0] == pytest.approx(1.0)
        assert abs(recs[-1].y[0]) <= 1e-14

    def test_rejects_non_dividing_step(self):
        with pytest.raises(ValueError):
            ex.shoot_bvp(0.1, 0.3)

    def test_first_row(self):
        run = ex.bvp_errors(0.1, 1 / 8)
        assert run.dense == pytest.approx(4.7402e-5, rel=5e-3)
        assert run.collocation == pytest.approx(4.2624e-4, rel=5e-3)

    def test_near_linear_limit(self):
        run = ex.bvp_errors(1e6, 1 / 8)
        assert run.dense <= 1e-12
        # the degree-two collocation error is third order in h times y''' ~ 1/eps
        assert run.collocation <= 1e-10
        scaled = ex.bvp_errors(1e7, 1 / 8).collocation
        assert run.collocation / scaled == pytest.approx(10.0, rel=1e-2)

    def test_profile_csv(self):
        run = ex.bvp_errors(0.1, 1 / 8, samples=5)
        lines = ex.profile_csv(run).strip().split("\n")
        assert lines[0] == "x,dense_error,collocation_error"
        assert len(lines) == 1 + 8 * 5
        assert "np." not in lines[1]

    def test_deterministic(self):
        a = ex.combine_reports_csv(ex.table1(hs=(0.25, 0.125))[:2])
        b = ex.combine_reports_csv(ex.table1(hs=(0.25, 0.125))[:2])
        assert a == b


class TestEnergy:
    def test_harmonic(self):
        st = ex.energy_study(harmonic_oscillator(), "gauss4", 0.1, 500)
        assert st.max_drift <= 1e-13
        assert st.t.shape == st.error.shape == (501,)
        assert st.error[0] == 0.0

    def test_rk4_drifts(self):
        st = ex.energy_study(pendulum(), classical_rk4(), 0.1, 2000)
        assert st.monotone and st.slope > 0
        assert "monotone_windows=yes" in st.summary()

    def test_summary_parseable(self):
        st = ex.energy_study(pendulum(), "conjugate4", 0.1, 200)
        fields = dict(kv.split("=") for kv in st.summary().split())
        assert set(fields) == {"max_drift", "half_ratio", "slope", "monotone_windows"}
        float(fields["max_drift"])

    def test_csv_header(self):
        st = ex.energy_study(pendulum(), "gauss4", 0.1, 3)
        assert st.to_csv().split("\n")[0] == "t,energy_error"

    def test_steps_guard(self):
        with pytest.raises(ValueError):
            ex.energy_study(pendulum(), "gauss4", 0.1, 1)


class TestConvergence:
    def test_levels_guard(self):
        with pytest.raises(ValueError):
            ex.convergence_study("gauss4", pendulum(), 0.1, 2, 1.0)

    def test_gauss6_order(self):
        rep = ex.convergence_study("gauss:3", pendulum(), 0.25, 3, 4.0)
        assert rep.final_rate == pytest.approx(6.0, abs=0.25)

    # factor order is s + 1 for even s and s for odd s; the conjugate gains one
    @pytest.mark.parametrize("s,phi_order,conj_order", [(3, 3, 4), (4, 5, 6), (5, 5, 6)])
    def test_larger_stage_counts(self, s, phi_order, conj_order):
        phi = ex.convergence_study(f"phi:{s}", pendulum(), 0.4, 4, 4.0)
        conj = ex.convergence_study(f"conjugate:{s}", pendulum(), 0.4, 4, 4.0)
        assert phi.final_rate == pytest.approx(phi_order, abs=0.15)
        assert conj.final_rate == pytest.approx(conj_order, abs=0.15)

    @pytest.mark.parametrize("s", [3, 4])
    def test_conjugate_energy_bounded(self, s):
        st = ex.energy_study(pendulum(q0=2.0, p0=0.0), f"conjugate:{s}", 0.2, 4000)
        assert st.half_ratio <= 2.0
        assert not st.monotone


class TestReports:
    @pytest.mark.parametrize("s", [1, 2, 3, 7, 10])
    def test_factorization_passes(self, s):
        rep = ex.factorization_report(gauss_tableau(s))
        assert rep.passed
        assert rep.symplecticity["theta"] <= 1e-13

    def test_nonsymmetric_base(self):
        tab = ButcherTableau([[1 / 3, 0.0], [1.0, 0.0]], [0.75, 0.25], [1 / 3, 1.0])
        rep = ex.factorization_report(tab)
        assert rep.adjoint_deviation is None
        assert "adjoint" not in rep.checks

    def test_check_conjugate(self):
        tab = ButcherTableau(CONJUGATE4["A"], CONJUGATE4["b"], CONJUGATE4["c"])
        rep = ex.check_report(tab)
        assert rep.passed and rep.order == 4 and rep.symmetric
        assert rep.symplecticity > 1e-3

    def test_check_corrupted(self):
        rep = ex.check_report(ButcherTableau([[0.5]], [0.9], [0.5]))
        assert not rep.passed
        assert not rep.symmetric
        assert "FAIL" in rep.format()
