import numpy as np

from kuramoto_sync.equilibria import all_equilibria, group_identical
from kuramoto_sync.model import ModelConfig, reduced_vector_field, wrap_angle
from kuramoto_sync.search import damped_newton, multistart_equilibria, torus_grid, unique_states


def test_torus_grid_shape():
    assert torus_grid(2, 5).shape == (25, 2)


def test_newton_converges_to_zeros():
    cfg = ModelConfig.from_ratio(3, 2.0)
    V, ok = damped_newton(torus_grid(2, 10), cfg)
    assert ok.any()
    assert np.max(np.abs(reduced_vector_field(V[ok], cfg))) < 1e-11


def test_unique_states_merges_wrapped_copies():
    v = np.array([[0.1, np.pi - 1e-12], [0.1, -np.pi + 1e-12], [0.3, 0.0]])
    assert len(unique_states(v)) == 2


def test_multistart_finds_every_enumerated_state_n3():
    cfg = ModelConfig.from_ratio(3, 3.0)
    found = multistart_equilibria(cfg, per_axis=24)
    enumerated = group_identical(all_equilibria(cfg))
    assert len(found) == len(enumerated)
    for eq in enumerated:
        assert min(np.max(np.abs(wrap_angle(eq.v - f))) for f in found) < 1e-8
