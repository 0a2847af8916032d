import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausscompose import (ButcherTableau, adjoint, classical_order, classical_rk4, compose,
                          explicit_euler, gauss_tableau, implicit_euler, implicit_midpoint,
                          is_symmetric, order_conditions_p4, s_reduce, simplifying_residuals,
                          stability_function, symplecticity_residual, trapezoidal)
from gausscompose.linalg import SingularSystemError, lu_factor, lu_solve, solve
from reference_tableaux import CONJUGATE4, max_dev, pade22


class TestButcherTableau:
    def test_shapes_checked(self):
        with pytest.raises(ValueError):
            ButcherTableau([[0.0, 0.0]], [1.0], [0.0])
        with pytest.raises(ValueError):
            ButcherTableau([[0.0]], [1.0, 0.0], [0.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            ButcherTableau([[np.nan]], [1.0], [0.0])

    def test_immutable(self):
        tab = implicit_midpoint()
        with pytest.raises(ValueError):
            tab.A[0, 0] = 3.0

    def test_scalar_promotion(self):
        tab = ButcherTableau(0.5, 1.0, 0.5)
        assert tab.s == 1
        assert tab.A.shape == (1, 1)

    def test_explicit_flag(self):
        assert classical_rk4().is_explicit
        assert not gauss_tableau(2).is_explicit

    def test_deviation_different_sizes(self):
        assert gauss_tableau(2).deviation(gauss_tableau(3)) == np.inf


class TestSimplifyingResiduals:
    def test_midpoint_b3(self):
        r = simplifying_residuals(implicit_midpoint(), 3)
        assert r.B[2] == pytest.approx(1 / 12, abs=1e-16)

    def test_gauss2_b4(self):
        r = simplifying_residuals(gauss_tableau(2), 4)
        assert max(r.B) <= 1e-15

    def test_gauss3(self):
        r = simplifying_residuals(gauss_tableau(3), 6)
        assert r.satisfies(6, 3, 3, tol=1e-13)

    def test_rk4_fails_c2(self):
        r = simplifying_residuals(classical_rk4(), 2)
        assert r.C[1] > 0.1


class TestOrderConditions:
    def test_explicit_euler(self):
        r = order_conditions_p4(explicit_euler())
        assert r[0] == 0.0
        assert r[1] == pytest.approx(-0.5)
        assert classical_order(explicit_euler()) == 1

    @pytest.mark.parametrize("tab,order", [
        (implicit_midpoint(), 2), (trapezoidal(), 2), (classical_rk4(), 4),
    ])
    def test_known_orders(self, tab, order):
        assert classical_order(tab) == order

    def test_conjugate_display(self):
        tab = ButcherTableau(CONJUGATE4["A"], CONJUGATE4["b"], CONJUGATE4["c"])
        assert np.max(np.abs(order_conditions_p4(tab))) <= 1e-14


class TestSymplecticity:
    def test_gauss2(self):
        assert symplecticity_residual(gauss_tableau(2)).norm <= 1e-15

    def test_trapezoidal(self):
        r = symplecticity_residual(trapezoidal())
        np.testing.assert_allclose(r.M, [[-0.25, 0.0], [0.0, 0.25]], atol=1e-16)
        assert r.norm == pytest.approx(0.25)

    @pytest.mark.parametrize("s", range(1, 6))
    def test_gauss_family(self, s):
        r = symplecticity_residual(gauss_tableau(s))
        assert r.norm <= 1e-14
        np.testing.assert_array_equal(r.M, r.M.T)


class TestAdjoint:
    def test_implicit_to_explicit_euler(self):
        adj = adjoint(implicit_euler())
        assert adj.deviation(explicit_euler()) == 0.0

    def test_involution_gauss3(self):
        tab = gauss_tableau(3)
        assert adjoint(adjoint(tab)).deviation(tab) <= 1e-14

    def test_rejects_inconsistent(self):
        with pytest.raises(ValueError):
            adjoint(ButcherTableau([[0.5]], [0.9], [0.5]))

    def test_gauss_symmetric_rk4_not(self):
        assert is_symmetric(gauss_tableau(4))
        assert not is_symmetric(classical_rk4())


class TestCompose:
    def test_ee_then_ie_is_trapezoid(self):
        tab = compose(explicit_euler(), implicit_euler(), 0.5, 0.5)
        assert tab.deviation(trapezoidal()) == 0.0

    def test_rejects_bad_fractions(self):
        with pytest.raises(ValueError):
            compose(explicit_euler(), implicit_euler(), 0.5, 0.6)

    def test_uneven_fractions(self):
        tab = compose(implicit_euler(), explicit_euler(), 0.25, 0.75)
        np.testing.assert_allclose(tab.c, [0.25, 0.25])
        assert tab.weight_defect() <= 1e-15

    def test_conjugate_display(self):
        from gausscompose import gauss_pair
        pair = gauss_pair(2)
        tab = compose(pair.psi, pair.phi)
        assert max_dev(tab, CONJUGATE4) <= 1e-15


class TestSReduce:
    def test_ie_then_ee_is_midpoint(self):
        tab = s_reduce(compose(implicit_euler(), explicit_euler()))
        assert tab.s == 1
        assert tab.deviation(implicit_midpoint()) <= 1e-16

    def test_no_merge_returns_input(self):
        tab = trapezoidal()
        assert s_reduce(tab) is tab

    def test_idempotent(self):
        red = s_reduce(compose(gauss_tableau(2), gauss_tableau(2)))
        assert s_reduce(red) is red

    def test_equal_abscissae_different_rows_stay_apart(self):
        # stages 0 and 1 share c but weigh stage 2 differently
        tab = ButcherTableau([[0.5, 0.0, 0.0], [0.0, 0.0, 0.5], [0.5, 0.5, 0.0]],
                             [0.25, 0.25, 0.5], [0.5, 0.5, 1.0])
        assert s_reduce(tab).s == 3

    def test_euler_family_associativity(self):
        assert s_reduce(compose(explicit_euler(), implicit_euler())).deviation(trapezoidal()) == 0
        assert s_reduce(compose(implicit_euler(), explicit_euler())).s == 1


class TestStabilityFunction:
    def test_zero(self):
        assert stability_function(gauss_tableau(3), 0.0) == 1.0

    def test_gauss2_at_one(self):
        assert stability_function(gauss_tableau(2), 1.0) == pytest.approx(19 / 7, rel=1e-14)

    def test_pade(self, sample_z):
        tab = gauss_tableau(2)
        for z in sample_z:
            assert abs(stability_function(tab, z) / pade22(z) - 1) <= 1e-12

    def test_explicit_is_polynomial(self):
        z = 0.3 + 0.2j
        assert stability_function(classical_rk4(), z) == pytest.approx(
            1 + z + z ** 2 / 2 + z ** 3 / 6 + z ** 4 / 24, rel=1e-14)

    def test_singular(self):
        # implicit Euler: 1 - z = 0 at z = 1
        with pytest.raises(SingularSystemError):
            stability_function(implicit_euler(), 1.0)


class TestLinalg:
    def test_against_numpy(self, rng):
        M = rng.normal(size=(7, 7))
        rhs = rng.normal(size=(7, 3))
        np.testing.assert_allclose(solve(M, rhs), np.linalg.solve(M, rhs), rtol=1e-12)

    def test_complex(self, rng):
        M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        v = rng.normal(size=4)
        np.testing.assert_allclose(lu_solve(lu_factor(M), v), np.linalg.solve(M, v), rtol=1e-12)

    def test_pivot_floor(self):
        with pytest.raises(SingularSystemError):
            lu_factor(np.zeros((3, 3)))


# -- properties ----------------------------------------------------------------

def _tableaux(draw_s=st.integers(1, 4)):
    @st.composite
    def build(draw):
        s = draw(draw_s)
        vals = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
        A = np.array(draw(st.lists(vals, min_size=s * s, max_size=s * s))).reshape(s, s)
        b = np.array(draw(st.lists(vals, min_size=s, max_size=s)))
        b = np.append(b[:-1], 1.0 - b[:-1].sum())
        return ButcherTableau(A, b, A.sum(axis=1))
    return build()


@settings(max_examples=60, deadline=None)
@given(_tableaux())
def test_adjoint_involution(tab):
    assert adjoint(adjoint(tab)).deviation(tab) <= 1e-13


@settings(max_examples=60, deadline=None)
@given(_tableaux(), _tableaux(), st.floats(0.05, 0.95))
def test_composed_stability_is_product(t1, t2, th):
    z = 0.3 - 0.4j
    try:
        r1 = stability_function(t1, th * z)
        r2 = stability_function(t2, (1 - th) * z)
        rc = stability_function(compose(t1, t2, th, 1 - th), z)
    except SingularSystemError:
        return
    if abs(r1 * r2) > 1e6:
        return
    assert abs(rc - r1 * r2) <= 1e-9 * max(1.0, abs(r1 * r2))


def _duplicated(tab):
    """Every stage split into two identical half-weight copies."""
    A = np.kron(tab.A, np.full((2, 2), 0.5))
    return ButcherTableau(A, np.repeat(tab.b, 2) / 2, np.repeat(tab.c, 2))


@settings(max_examples=40, deadline=None)
@given(_tableaux(st.integers(1, 3)))
def test_s_reduce_idempotent_and_preserves_stability(tab):
    big = _duplicated(tab)
    red = s_reduce(big)
    assert red.s <= tab.s
    assert s_reduce(red) is red
    for z in (0.2j, -0.5, 0.3 + 0.1j):
        try:
            ro, rr = stability_function(big, z), stability_function(red, z)
        except SingularSystemError:
            continue
        if abs(ro) > 1e6:
            continue
        assert abs(ro - rr) <= 1e-9 * max(1.0, abs(ro))
