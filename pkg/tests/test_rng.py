import numpy as np
import pytest

from batbench.rng import RandomStream, derive_run_seed


def test_same_seed_same_sequence():
    a = RandomStream(7)
    b = RandomStream(7)
    assert [a.uniform01() for _ in range(100)] == [b.uniform01() for _ in range(100)]


def test_uniform01_range():
    s = RandomStream(123)
    draws = np.array([s.uniform01() for _ in range(100_000)])
    assert np.all(draws >= 0.0)
    assert np.all(draws < 1.0)


def test_uniform01_mean_law_of_large_numbers():
    s = RandomStream(7)
    draws = np.array([s.uniform01() for _ in range(100_000)])
    assert abs(draws.mean() - 0.5) < 0.01


def test_uniform_in_matches_uniform01_scaling():
    a = RandomStream(42)
    b = RandomStream(42)
    for _ in range(50):
        assert a.uniform_in(0.0, 1.0) == b.uniform01()


def test_uniform_in_range():
    s = RandomStream(5)
    draws = np.array([s.uniform_in(-1.0, 1.0) for _ in range(10_000)])
    assert np.all(draws >= -1.0)
    assert np.all(draws < 1.0)


def test_uniform_in_degenerate_width():
    s = RandomStream(11)
    lo, hi = 5.0, 5.0 + 1e-12
    for _ in range(10_000):
        v = s.uniform_in(lo, hi)
        assert lo <= v < hi


@pytest.mark.parametrize("lo,hi", [(1.0, 1.0), (2.0, 1.0), (np.inf, 1.0), (0.0, np.nan)])
def test_uniform_in_rejects_bad_bounds(lo, hi):
    s = RandomStream(0)
    with pytest.raises(ValueError):
        s.uniform_in(lo, hi)


def test_derive_run_seed_distinct_and_stable():
    seeds = [derive_run_seed(12345, i) for i in range(200)]
    assert len(set(seeds)) == 200
    assert seeds == [derive_run_seed(12345, i) for i in range(200)]
    assert derive_run_seed(12345, 0) != derive_run_seed(12346, 0)


def test_derive_run_seed_rejects_negative_index():
    with pytest.raises(ValueError):
        derive_run_seed(1, -1)


def test_generator_state_is_shared():
    s = RandomStream(3)
    first = s.generator.random()
    second = s.uniform01()
    fresh = RandomStream(3)
    assert first == fresh.uniform01()
    assert second == fresh.uniform01()
