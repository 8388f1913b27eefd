import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from sombrero import (
    BoundaryBreakdown,
    InvalidWindow,
    ModelParams,
    NonpositiveIterate,
    NotConverged,
    SolverConfig,
    solve,
)
from sombrero.grid import GridConfig, RadialGrid
from sombrero.iterate import (
    Discretization,
    compute_energy_shift,
    initial_state,
    step_bc_infinity,
    step_bc_origin,
    strict_decrease_count,
)
from sombrero.model import DerivedConstants, a_window

from conftest import FIG1

E_REF = 4.46682536768  # g = 3, k = 2, a = 1.2, default grid


def test_energy_shift_positive_and_rising(solved_a):
    s = solved_a.shifts
    assert 0 < s[0] < s[1] < s[2]


def test_zero_total_charge_every_step(solved_a, solved_b):
    for res in (solved_a, solved_b):
        assert max(abs(st.residue) for st in res.states[1:]) < 1e-10


def test_far_condition_holds(solved_a):
    for st in solved_a.states:
        assert st.f[-1] == 1.0


def test_iterates_increase_pointwise(solved_a):
    f1, f2, f3 = (solved_a.states[m].f[:-1] for m in (1, 2, 3))
    assert np.all(1 < f1) and np.all(f1 < f2) and np.all(f2 < f3)


def test_first_iterate_decreasing(solved_a):
    f1 = solved_a.states[1].f[solved_a.grid.distinct_mask()]
    assert np.all(np.diff(f1) < 0)


def test_origin_condition_holds(solved_b):
    r0 = solved_b.grid.r[0]
    for st in solved_b.states[1:]:
        assert st.f_at_origin == 1.0
        assert abs(st.f[0] - 1.0) < 10 * r0 * r0 * abs(st.f).max() + 1e-15


def test_hierarchy_flags(solved_a, solved_b):
    for res in (solved_a, solved_b):
        rep = res.hierarchy
        assert rep.inside_window and rep.all_true, rep


def test_energies_and_bracket(solved_a, solved_b):
    assert solved_a.converged and solved_b.converged
    assert strict_decrease_count(solved_a.energies) >= 8
    E = solved_b.energies
    odd, even = E[0::2], E[1::2]
    assert np.all(np.diff(odd) < 0) and np.all(np.diff(even) > 0)
    assert even.max() < odd.min()
    lo, hi = solved_b.bracket
    assert 0 < hi - lo < 1e-8
    assert lo <= solved_a.E_final <= hi
    assert abs(solved_a.E_final - solved_b.E_final) < 2 * solved_a.tol
    assert solved_a.E_final == pytest.approx(E_REF, abs=1e-10)


def test_first_step_conditions_differ_by_a_constant(fig1_dc):
    d = Discretization.radial(fig1_dc, RadialGrid.build(GridConfig(), fig1_dc.g))
    f0 = initial_state(d)
    shift = compute_energy_shift(d, f0.f)
    fa = step_bc_infinity(d, f0, shift)
    fb = step_bc_origin(d, f0, shift)
    np.testing.assert_allclose(fb.f, fa.f - fa.f_at_origin + 1.0, rtol=0, atol=1e-9)


def _piece_residual(res, sl):
    r = res.grid.r[sl]
    f = res.final_f[sl]
    shift = res.dc.E0 - res.E_final
    d = res.disc
    from sombrero.model import TrialFunction, LEFT, RIGHT

    side = LEFT if sl == res.grid.left else RIGHT
    dlog = TrialFunction(res.dc).dlog_phi(r, side)
    fp = np.gradient(f, r, edge_order=2)
    fpp = np.gradient(fp, r, edge_order=2)
    # (H - E) psi / phi in terms of f
    resid = -0.5 * fpp - dlog * fp - (d.w[sl] - shift) * f
    inner = slice(2, -2)
    return resid[inner], f[inner], d.phi2[sl][inner], res.grid.jac[sl][inner]


def test_converged_wavefunction_residual(solved_a):
    num = den = 0.0
    for sl in (solved_a.grid.left, solved_a.grid.right):
        resid, f, w, jac = _piece_residual(solved_a, sl)
        num += np.sum(resid**2 * w * jac)
        den += np.sum((solved_a.E_final * f) ** 2 * w * jac)
    assert np.sqrt(num / den) < 1e-5


def test_refinement_is_cauchy():
    E = [solve(FIG1, "A", SolverConfig(grid=GridConfig(node_count=n))).E_final for n in (2001, 4001, 8001)]
    assert abs(E[1] - E[2]) < abs(E[0] - E[1])
    assert abs(E[1] - E[2]) < 1e-7


def test_origin_condition_breaks_down_at_k3():
    p = ModelParams(g=3, N=3, l=2, a=1.6)
    with pytest.raises(BoundaryBreakdown) as info:
        solve(p, "B")
    assert info.value.f_at_far <= 0
    assert info.value.partial is not None
    assert solve(p, "A").converged


def test_origin_condition_depends_on_cutoff():
    # with a longer tail the k = 2 run leaves the admissible range as well
    cfg = SolverConfig(grid=GridConfig(tail_threshold=60.0))
    with pytest.raises(BoundaryBreakdown):
        solve(FIG1, "B", cfg)
    assert solve(FIG1, "A", cfg).E_final == pytest.approx(E_REF, abs=1e-8)


def test_window_enforced_unless_forced():
    p = ModelParams(g=3, N=5, l=0, a=2.0)
    with pytest.raises(InvalidWindow):
        solve(p, "A")
    res = solve(p, "A", SolverConfig(force=True, max_iter=50), raise_on_fail=False)
    assert res.hierarchy.label == "outside sufficient condition"


def test_not_converged_carries_partial():
    with pytest.raises(NotConverged) as info:
        solve(FIG1, "A", SolverConfig(max_iter=3))
    assert info.value.partial.iterations_used == 3


def test_nonpositive_iterate(fig1_dc):
    d = Discretization.radial(fig1_dc, RadialGrid.build(GridConfig(node_count=1001), 3.0))
    f = np.ones(d.grid.size)
    f[-1] = 0.0
    with pytest.raises(NonpositiveIterate):
        compute_energy_shift(d, f)


def test_overlong_tail_overflows():
    with pytest.raises(OverflowError):
        solve(FIG1, "A", SolverConfig(grid=GridConfig(tail_threshold=1600.0)))


def test_radial_factor(solved_a):
    r = solved_a.grid.r
    np.testing.assert_allclose(solved_a.radial_R(1.3), solved_a.psi(1.3) / r**2, rtol=1e-12)
    assert solved_a.psi(2.0)[-1] == pytest.approx(2 * solved_a.psi(1.0)[-1])


@st.composite
def window_points(draw):
    k = draw(st.floats(0.5, 4.0))
    g = draw(st.floats(2.5, 6.0))
    lo, hi = a_window(g, k)
    a = draw(st.floats(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo)))
    return g, k, a


@settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(window_points())
def test_hierarchy_inside_window(pt):
    g, k, a = pt
    dc = DerivedConstants.from_k(g, k, a)
    assert dc.hierarchy_valid
    res = solve(dc, "A", SolverConfig(grid=GridConfig(node_count=1501), max_iter=8), raise_on_fail=False)
    assert res.hierarchy.all_true, res.hierarchy
    assert np.all(np.diff(res.energies) < 0)
