import numpy as np
import pytest

from sombrero import ConfigError, DomainError, ModelParams, NoBracket
from sombrero.model import DerivedConstants
from sombrero.oracle import FDConfig, check_rate_bound, e1_expansion, fd_ground_energy, prototype1d_solve
from sombrero.reference import TABLE1_A

# shooting energies at g = 3 with the default FD grid
FD_FROZEN = {
    0.5: 2.48703979997,
    1.0: 2.89720396405,
    1.5: 3.57817447598,
    2.0: 4.46682536780,
    2.5: 5.52592074634,
    3.0: 6.73067624785,
    4.0: 9.51036788459,
}


@pytest.mark.parametrize("k", sorted(FD_FROZEN))
def test_fd_frozen_energies(k):
    dc = DerivedConstants.from_k(3.0, k, TABLE1_A[k])
    assert fd_ground_energy(dc) == pytest.approx(FD_FROZEN[k], abs=1e-9)


def test_fd_accepts_model_params():
    assert fd_ground_energy(ModelParams(3, 5, 0, 1.2)) == pytest.approx(FD_FROZEN[2.0], abs=1e-9)


def test_fd_window_not_required():
    # a only enters through the bisection seed
    assert fd_ground_energy(ModelParams(3, 5, 0, 3.0)) == pytest.approx(FD_FROZEN[2.0], abs=1e-9)


def test_fd_doubling():
    p = ModelParams(3, 5, 0, 1.2)
    assert abs(fd_ground_energy(p, FDConfig(node_count=16000)) - fd_ground_energy(p)) < 1e-8


def test_fd_monotone_in_box_size():
    p = ModelParams(3, 5, 0, 1.2)
    E = [fd_ground_energy(p, FDConfig(r_max=rm)) for rm in (1.8, 2.0, 2.2, 2.5)]
    assert all(x > y for x, y in zip(E, E[1:]))
    assert E[-1] > fd_ground_energy(p) - 1e-10


def test_fd_no_bracket():
    with pytest.raises(NoBracket):
        fd_ground_energy(ModelParams(3, 5, 0, 0.01), FDConfig(r_max=1.1))


@pytest.mark.parametrize("kw", [dict(node_count=1999), dict(tol=1e-13)])
def test_fd_config_limits(kw):
    with pytest.raises(ConfigError):
        FDConfig(**kw)


@pytest.fixture(scope="module")
def proto10():
    return prototype1d_solve(10.0, 6)


def test_prototype_first_shift(proto10):
    assert proto10.shifts[0] == pytest.approx(0.2660746730613, abs=1e-9)
    assert abs(proto10.shifts[0] - e1_expansion(10.0)) < 2e-3
    assert e1_expansion(10.0) == pytest.approx(0.26572265625)


def test_prototype_hierarchy(proto10):
    assert np.all(np.diff(proto10.shifts) > 0)
    assert np.all(proto10.gaps > 0)
    grid = proto10.disc.grid
    mask = grid.distinct_mask()
    for st in proto10.states[1:]:
        assert np.all(np.diff(st.f[mask]) <= 0)
        assert abs(st.residue) < 1e-10
    for n in (1, 2, 3):
        inc = (proto10.states[n].f - proto10.states[n - 1].f)[mask]
        assert np.all(np.diff(inc) < 0)


def test_prototype_increment_at_origin(proto10):
    f0 = [st.f[0] for st in proto10.states]
    np.testing.assert_allclose(np.diff(f0)[:3], proto10.g0[:3], rtol=1e-8)


def test_prototype_refuses_small_coupling():
    with pytest.raises(DomainError):
        prototype1d_solve(2.0)


@pytest.mark.parametrize("g", [6.0, 10.0, 20.0])
def test_rate_bound(g):
    rep = check_rate_bound(g, 6)
    assert rep.bound_holds and rep.g0_bound_holds and rep.gaps_positive, rep


def test_rate_bound_vacuous_regime():
    rep = check_rate_bound(3.0, 3)
    assert rep.bound[2] == pytest.approx(5 / 24 * 27)
    assert rep.bound_holds


@pytest.mark.parametrize("g", [12.0, 24.0])
def test_gap_ratio_trend(g):
    gaps = prototype1d_solve(g, 6).gaps
    assert np.all(gaps[1:] / gaps[:-1] <= 2 * 9 / g)
