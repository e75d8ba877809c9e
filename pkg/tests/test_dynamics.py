import numpy as np
import pytest

from kuramoto_sync._validation import NumericalFailure
from kuramoto_sync.continuum import continuous_solution, family_distance
from kuramoto_sync.dynamics import (
    convergence_experiment,
    default_dt,
    distance_curve,
    integrate,
    perturbation,
    rk4,
    step_halving_order,
)
from kuramoto_sync.equilibria import SignSequence, equilibria_for
from kuramoto_sync.model import ModelConfig, lift_state


def test_rk4_exponential():
    t, y, final = rk4(lambda u: -u, np.array([1.0]), 1.0, 0.01)
    assert final[0] == pytest.approx(np.exp(-1.0), abs=1e-10)
    assert len(t) == 101 and t[-1] == pytest.approx(1.0)


def test_rk4_order_on_oscillator():
    f = lambda u: np.array([u[1], -u[0]])
    errs = []
    for dt in (0.1, 0.05, 0.025):
        final = rk4(f, np.array([1.0, 0.0]), 2.0, dt)[2]
        errs.append(abs(final[0] - np.cos(2.0)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 3.7) & (orders < 4.3))


def test_rk4_records_and_lands_on_t_end():
    t, y, _ = rk4(lambda u: -u, np.ones(2), 1.0, 0.03, record_every=5)
    assert t[-1] == pytest.approx(1.0)
    assert len(t) == len(y)


def test_rk4_nonfinite_raises():
    with pytest.raises(NumericalFailure):
        with np.errstate(over="ignore"):
            rk4(lambda u: u * 1e300, np.ones(1), 10.0, 1.0)


def test_rk4_validates():
    with pytest.raises(ValueError):
        rk4(lambda u: u, np.ones(1), -1.0, 0.1)


def test_perturbation_properties():
    p = perturbation(9, 0.3, seed=4)
    assert abs(p.mean()) < 1e-15
    assert np.sqrt(np.mean(p**2)) == pytest.approx(0.3)
    assert np.array_equal(p, perturbation(9, 0.3, seed=4))
    assert not np.array_equal(p, perturbation(9, 0.3, seed=5))


def test_mean_phase_is_conserved():
    # evenly spaced frequencies sum to zero and the couplings cancel pairwise
    cfg = ModelConfig(7, a=1.0, K=1.5)
    u0 = np.random.default_rng(0).uniform(-3, 3, 7)
    traj = integrate(u0, cfg, 20.0)
    assert traj.final_lifted.sum() == pytest.approx(u0.sum(), abs=1e-10)


def test_stable_equilibrium_attracts():
    cfg = ModelConfig.from_ratio(5, 0.7)
    eq = equilibria_for(SignSequence.all_ones(2), cfg)[0]
    ref = lift_state(eq.v)
    traj = integrate(ref + perturbation(5, 1e-3, 0), cfg, 100 / cfg.K, record_every=1000)
    d = distance_curve(traj, ref)
    assert d[0] == pytest.approx(1e-3, rel=1e-6)
    assert d[-1] < 1e-6


def test_unstable_equilibrium_repels():
    cfg = ModelConfig.from_ratio(5, 2.3)
    eq = equilibria_for(SignSequence.from_string("+-++"), cfg)[0]
    ref = lift_state(eq.v)
    traj = integrate(ref + perturbation(5, 1e-6, 1), cfg, 500 / cfg.K, record_every=1000)
    assert np.max(distance_curve(traj, ref)) > 1e-2


def test_step_halving_order():
    cfg = ModelConfig(5, K=1.0)
    u0 = np.random.default_rng(2).uniform(-1, 1, 5)
    assert 3.5 <= step_halving_order(u0, cfg, 2.0, 0.1) <= 4.5


def test_integration_is_deterministic():
    cfg = ModelConfig(5, K=2.0)
    u0 = perturbation(5, 0.5, 7)
    a = integrate(u0, cfg, 5.0, record_every=50)
    b = integrate(u0, cfg, 5.0, record_every=50)
    assert np.array_equal(a.states, b.states)
    assert a.dt == default_dt(cfg)
    assert np.all(a.states > -np.pi) and np.all(a.states <= np.pi)


def test_convergence_experiment_shape():
    sol = continuous_solution(1.0, 2.0)
    res = convergence_experiment(sol, [5, 11], t_end=5.0, delta=0.05, n_records=5)
    ns = {r.n for r in res.rows}
    assert ns == {5, 11}
    first = [r for r in res.rows if r.t == 0.0]
    assert all(r.distance == pytest.approx(0.05, rel=1e-6) for r in first)
    assert set(res.initial_offset) == {5, 11}
    # the cell averages are close to, but not exactly, a rest state of the discrete model
    assert res.initial_offset[11] < res.initial_offset[5] < 0.1
    with pytest.raises(ValueError):
        convergence_experiment(sol, [11, 5], t_end=1.0)


def test_instability_transfers_to_discretization():
    from kuramoto_sync.continuum import FlipSet, build_discontinuous, discretize

    sol = build_discontinuous(FlipSet(((0.75, 1.0),)), 0.5)
    n = 21
    cfg = ModelConfig(n, K=2.0)
    ref = discretize(sol, n).values
    traj = integrate(ref + perturbation(n, 1e-3, 0), cfg, 100.0, record_every=500)
    assert max(family_distance(s, ref) for s in traj.states) > 0.1


def test_continuous_family_contains_perturbations():
    sol = continuous_solution(1.0, 2.0)
    for delta in (0.05, 0.0):
        res = convergence_experiment(sol, [11, 23, 47], t_end=50 / sol.K, delta=delta, n_records=10)
        for n in (11, 23, 47):
            final = [r for r in res.rows if r.n == n][-1]
            if delta > 0:
                assert final.distance < delta
            # what is left is the gap between cell averages and the true discrete rest state
            assert final.distance <= res.initial_offset[n] * (1 + 1e-6) + 1e-12
    offs = [res.initial_offset[n] for n in (11, 23, 47)]
    assert offs[0] > offs[1] > offs[2]
