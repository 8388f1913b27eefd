import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sombrero import ConfigError
from sombrero.grid import GridConfig, RadialGrid, cell_integrals, tail_radius, weighted_integral
from sombrero.iterate import Discretization
from sombrero.model import DerivedConstants
from sombrero.oracle import prototype_discretization


def _bisect(fun, lo, hi, n=200):
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if fun(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_tail_radius_threshold_60():
    root = _bisect(lambda r: (r - 1) ** 2 * (r + 2) - 30.0, 1.0, 10.0)
    assert tail_radius(3.0, 60.0) == pytest.approx(root, abs=1e-12)
    assert root == pytest.approx(3.36475, abs=1e-5)


def test_default_r_max():
    g = RadialGrid.build(GridConfig(), 3.0)
    assert 2 * 3.0 * (g.r_max - 1) ** 2 * (g.r_max + 2) / 3 == pytest.approx(20.0)


@pytest.mark.parametrize("cfg", [GridConfig(), GridConfig(node_count=777, cluster=1.0), GridConfig(r_max=5.0)])
@pytest.mark.parametrize("origin", [False, True])
def test_node_layout(cfg, origin):
    g = RadialGrid.build(cfg, 3.0, origin_included=origin)
    assert np.count_nonzero(g.r == 1.0) == 2
    assert g.r[g.n_left - 1] == 1.0 and g.r[g.n_left] == 1.0
    assert np.all(np.diff(g.r[g.distinct_mask()]) > 0)
    assert (g.r[0] == 0.0) == origin
    assert g.size == cfg.node_count


@pytest.mark.parametrize("bad", [GridConfig(node_count=499), GridConfig(r_max=1.5)])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        RadialGrid.build(bad, 3.0)


def test_unit_integrals():
    g = RadialGrid.build(GridConfig(), 3.0)
    assert g.integrate(np.ones(g.size)) == pytest.approx(g.r_max, abs=1e-12)
    assert weighted_integral(g, 1.0, r_lo=1.0) == pytest.approx(g.r_max - 1, abs=1e-12)
    assert weighted_integral(g, 1.0, r_hi=1.0) == pytest.approx(1.0, abs=1e-12)


@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4), st.integers(4, 40))
def test_cell_rule_exact_for_cubics(c, n):
    t = np.linspace(0, 1, n + 1)
    G = np.polynomial.polynomial.polyval(t, c)
    cells = cell_integrals(G, 1.0 / n)
    P = np.polynomial.polynomial.polyint(c)
    want = np.diff(np.polynomial.polynomial.polyval(t, P))
    np.testing.assert_allclose(cells, want, atol=1e-12 * (1 + max(map(abs, c))))


def test_cumulative_passes_agree():
    g = RadialGrid.build(GridConfig(node_count=1001), 3.0)
    F = np.exp(-g.r) * g.r**2
    fwd = g.cumulative_forward(F, 2.0)
    bwd = g.cumulative_backward(F)
    np.testing.assert_allclose(fwd + bwd, fwd[-1], rtol=1e-14)


def test_phi_norm_stable_under_doubling():
    dc = DerivedConstants.from_k(3.0, 2.0, 1.2)
    vals = []
    for n in (4001, 8001):
        d = Discretization.radial(dc, RadialGrid.build(GridConfig(node_count=n), 3.0))
        vals.append(weighted_integral(d.grid, 1.0, d.log_phi2, power=2 * dc.k))
    assert vals[0] > 0 and np.isfinite(vals[0])
    assert abs(vals[1] / vals[0] - 1) < 1e-8


@pytest.mark.parametrize("shift", [-700.0, -300.0, 300.0, 650.0])
def test_log_weight_offset_invariance(shift):
    g = RadialGrid.build(GridConfig(node_count=1001), 3.0)
    lw = -50.0 * (g.r - 1.0) ** 2
    base = weighted_integral(g, g.r, lw)
    # exp(lw + shift) alone under- or overflows at the extreme shifts
    got = weighted_integral(g, g.r, lw + shift)
    assert math.log(got) - shift == pytest.approx(math.log(base), abs=1e-12)


@pytest.mark.parametrize("g", [3.0, 6.0, 10.0])
def test_prototype_tail_charge(g):
    d = prototype_discretization(g)
    val = d.grid.integrate((d.w - 0.25) * d.phi2) * math.exp(d.log_offset)
    assert val > math.exp(-4 * g / 3) / 3
