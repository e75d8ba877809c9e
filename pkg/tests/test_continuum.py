import numpy as np
import pytest
from scipy.integrate import quad

from kuramoto_sync.continuum import (
    CONTINUOUS,
    DISCONTINUOUS,
    MIRROR,
    FlipSet,
    build_discontinuous,
    continuous_solution,
    discontinuous_roots,
    discretize,
    family_distance,
    match_discrete_to_continuum,
    phi,
    sample_profile,
    sigma_flip_set,
    solve_C_continuous,
    solve_eta,
)
from kuramoto_sync.equilibria import SignSequence, equilibria_for
from kuramoto_sync.model import ModelConfig, wrap_angle

MID = (np.arange(10**6) + 0.5) / 10**6


def riemann_signed_integral(flips, eta):
    s = np.where(flips.indicator(MID), -1.0, 1.0)
    y = 2 * eta * (MID - 0.5)
    return 2 * eta * np.mean(s * np.sqrt(1 - y * y))


def stationarity_residual(sol, xs):
    # a (x - 1/2) + K int sin(U(y) - U(x)) dy, with the integral split at the profile's kinks
    pts = sorted({0.5, *(c for iv in sol.flip_set.proper for c in iv)} - {0.0, 1.0})
    S = quad(lambda y: np.sin(sol.profile_lifted(y)), 0, 1, points=pts, epsabs=1e-13, limit=200)[0]
    C = quad(lambda y: np.cos(sol.profile_lifted(y)), 0, 1, points=pts, epsabs=1e-13, limit=200)[0]
    U = sol.profile_lifted(xs)
    return np.max(np.abs(sol.a * (xs - 0.5) + sol.K * (S * np.cos(U) - C * np.sin(U))))


def test_phi_against_quadrature():
    for eta in (0.0, 0.1, 0.5, 0.9, 1.0):
        ref = quad(lambda y: np.sqrt(1 - y * y), -eta, eta)[0]
        assert phi(eta) == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("intervals", [(), ((0.75, 1.0),), ((0.1, 0.3), (0.6, 0.7)), ((0.2, 0.8),)])
def test_signed_integral_against_riemann(intervals):
    fs = FlipSet(intervals)
    for eta in (0.2, 0.6, 1.0):
        assert fs.signed_integral(eta) == pytest.approx(riemann_signed_integral(fs, eta), abs=1e-9)


def test_flipset_normalization():
    fs = FlipSet(((0.2, 0.8),))
    assert fs.intervals == ((0.2, 0.5), (0.5, 0.8))
    assert fs.measure == pytest.approx(0.6)
    assert FlipSet.full().is_full
    with pytest.raises(ValueError):
        FlipSet(((0.1, 0.3), (0.2, 0.4)))
    with pytest.raises(ValueError):
        FlipSet(((0.5, 1.2),))


def test_threshold_and_limits():
    assert solve_eta(np.pi / 2 * (1 + 1e-9)) is None
    assert solve_C_continuous(np.pi / 2) == pytest.approx(np.pi / 4, abs=1e-12)
    sol = continuous_solution(1.0, 2 / np.pi)
    assert sol is not None and sol.C == pytest.approx(np.pi / 4, abs=1e-10)
    assert continuous_solution(1.0, 0.99 * 2 / np.pi) is None
    assert continuous_solution(1.0, 1e4).C == pytest.approx(1.0, abs=1e-7)
    Cs = [solve_C_continuous(1 / r) for r in (0.7, 1.0, 2.0, 10.0)]
    assert all(b > a for a, b in zip(Cs, Cs[1:]))


@pytest.mark.parametrize("ratio", [0.7, 1.0, 3.0])
def test_continuous_profile_is_stationary(ratio):
    sol = continuous_solution(1.3, 1.3 * ratio)
    assert sol.kind == CONTINUOUS
    assert sol.consistency_residual() < 1e-12
    assert stationarity_residual(sol, np.linspace(0, 1, 41)) < 1e-9


@pytest.mark.parametrize("ratio,intervals", [(2.0, ((0.75, 1.0),)), (3.0, ((0.75, 1.0),)),
                                             (2.0, ((0.0, 0.5), (0.5, 1.0))), (5.0, ((0.1, 0.2),))])
def test_discontinuous_profiles_are_stationary(ratio, intervals):
    fs = FlipSet(intervals)
    for root in range(len(discontinuous_roots(fs, 1 / ratio))):
        sol = build_discontinuous(fs, 1 / ratio, root=root)
        assert sol.consistency_residual() < 1e-12
        assert stationarity_residual(sol, np.linspace(0, 1, 41)) < 1e-9


def test_no_profile_for_large_flip_at_unit_coupling():
    assert build_discontinuous(FlipSet(((0.75, 1.0),)), 1.0) is None
    assert build_discontinuous(FlipSet(((0.75, 1.0),)), 0.5).kind == DISCONTINUOUS


def test_full_flip_is_a_half_turn_of_the_stable_profile():
    beta = 0.5
    mirror = build_discontinuous(FlipSet.full(), beta)
    std = continuous_solution(1.0, 1 / beta)
    assert mirror.kind == MIRROR and mirror.C < 0
    x = np.linspace(0, 1, 101)
    assert np.max(np.abs(wrap_angle(mirror.profile(x) - std.profile(x) - np.pi))) < 1e-12


def test_measure_zero_flip_is_continuous():
    sol = build_discontinuous(FlipSet(((0.3, 0.3),)), 0.5)
    assert sol.kind == CONTINUOUS and sol.note


def cell_average_oracle(sol, n, per_cell=20000):
    out = []
    for i in range(n):
        x = (i + (np.arange(per_cell) + 0.5) / per_cell) / n
        z = np.exp(1j * sol.profile(x))
        # circular mean is exact for the average when the cell does not wrap
        ref = np.angle(z.mean())
        out.append(ref + np.mean(wrap_angle(sol.profile(x) - ref)))
    return np.array(out)


@pytest.mark.parametrize("intervals", [(), ((0.75, 1.0),), ((0.4, 0.6),)])
def test_discretize_matches_fine_averages(intervals):
    sol = build_discontinuous(FlipSet(intervals), 0.3)
    for n in (5, 11, 23):
        got = discretize(sol, n).values
        assert np.max(np.abs(wrap_angle(got - cell_average_oracle(sol, n)))) < 1e-7
    with pytest.raises(ValueError):
        discretize(sol, 4)


def test_sample_profile_close_to_averages():
    sol = continuous_solution(1.0, 2.0)
    a, b = discretize(sol, 101).values, sample_profile(sol, 101).values
    assert np.max(np.abs(a - b)) < 1e-3


def test_family_distance_against_theta_grid(rng):
    thetas = np.linspace(-np.pi, np.pi, 200001)
    for _ in range(5):
        x, y = rng.uniform(-np.pi, np.pi, (2, 9))
        dx = wrap_angle(x - y)
        ref = min(np.sqrt(np.mean(wrap_angle(dx[None, :] - thetas[:, None]) ** 2, axis=1)))
        got = family_distance(x, y)
        assert got <= ref + 1e-12
        assert got == pytest.approx(ref, abs=1e-6)


def test_family_distance_invariances(rng):
    x = rng.uniform(-np.pi, np.pi, 7)
    assert family_distance(wrap_angle(x + 2.1), x) < 1e-10
    y = rng.uniform(-np.pi, np.pi, 7)
    assert family_distance(x, y) == pytest.approx(family_distance(y, x), abs=1e-10)
    with pytest.raises(ValueError):
        family_distance(x, x[:5])


def test_sigma_flip_sets():
    assert sigma_flip_set(SignSequence.all_ones(3)).intervals == ()
    assert sigma_flip_set(SignSequence((-1,) * 6)).is_full
    fs = sigma_flip_set(SignSequence.from_string("+++--+"))
    # entries 4 and 5 are oscillators 5 and 6 of 7, adjacent to the reference
    assert fs.intervals == ((0.5, 6 / 7),)


def test_discrete_all_ones_approaches_continuum():
    dists = []
    for n in (11, 23, 47):
        cfg = ModelConfig.from_ratio(n, 1.0)
        sol = match_discrete_to_continuum(SignSequence.all_ones(cfg.n0), cfg)
        eq = equilibria_for(SignSequence.all_ones(cfg.n0), cfg)[0]
        full = np.insert(eq.v, cfg.n0, 0.0)
        dists.append(family_distance(full, discretize(sol, n)))
    assert dists[0] > dists[1] > dists[2]
