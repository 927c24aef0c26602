import numpy as np
import pytest

from rqaopt.systems import (IntegrationError, LorenzParams, lorenz, lorenz_trajectory,
                            rk4_step)


def test_equilibrium_stays_fixed():
    traj = lorenz_trajectory(LorenzParams(initial=(0.0, 0.0, 0.0), n_steps=500))
    assert not traj.any()


def test_nontrivial_equilibrium():
    beta, rho = 8 / 3, 28.0
    c = np.sqrt(beta * (rho - 1))
    traj = lorenz_trajectory(LorenzParams(initial=(c, c, rho - 1), n_steps=200, transient=0))
    np.testing.assert_allclose(traj, np.tile([c, c, rho - 1], (200, 1)), atol=1e-9)


def test_canonical_run_bounded(lorenz_x):
    x, y, z = (s.values for s in lorenz())
    assert x.size == 3000
    assert np.abs(x).max() < 25 and np.abs(y).max() < 30
    assert 0 < z.min() and z.max() < 50
    assert x.std() > 1


def test_deterministic():
    a = lorenz_trajectory(LorenzParams(n_steps=300))
    b = lorenz_trajectory(LorenzParams(n_steps=300))
    assert np.array_equal(a, b)


def test_transient_is_dropped():
    full = lorenz_trajectory(LorenzParams(n_steps=50, transient=0))
    late = lorenz_trajectory(LorenzParams(n_steps=30, transient=20))
    np.testing.assert_array_equal(full[20:], late)
    np.testing.assert_array_equal(full[0], [1.0, 1.0, 1.0])


def test_fourth_order_local_error():
    # one step of size h against a finely resolved reference; halving h
    # should shrink the local error by about 2^5
    state = np.array([1.0, 1.0, 20.0])
    args = (10.0, 28.0, 8 / 3)

    def reference(h):
        s = state.copy()
        for _ in range(4096):
            s = rk4_step(s, h / 4096, *args)
        return s

    errors = []
    for h in (0.02, 0.01):
        errors.append(np.linalg.norm(rk4_step(state, h, *args) - reference(h)))
    assert 25 < errors[0] / errors[1] < 40


def test_blow_up_reports_step():
    with np.errstate(all="ignore"), pytest.raises(IntegrationError, match="step"):
        lorenz_trajectory(LorenzParams(dt=0.5, n_steps=1000, transient=0))


@pytest.mark.parametrize("kwargs", [{"dt": 0}, {"n_steps": 0}, {"transient": -1},
                                    {"initial": (1.0, 2.0)}])
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        LorenzParams(**kwargs)
