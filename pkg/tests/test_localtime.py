import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from risklt import (
    DomainError,
    ExponentialClaims,
    IntegrityError,
    ModelParams,
    MollifiedStep,
    PreconditionError,
    SamplePath,
    approx_local_time,
    approx_local_time_direct,
    crossing_count,
    crossing_count_geometric,
    endpoint_levels,
    evaluate,
    exactness_threshold,
    local_time_at,
    local_time_levels,
    local_time_tanaka,
    occupation_measure,
    scaled_local_time,
    simulate,
    tanaka_jump_sum,
    tanaka_kernel,
)


@st.composite
def hand_paths(draw):
    """Small paths with arbitrary (possibly coinciding) values."""
    c = draw(st.sampled_from([0.5, 1.0, 1.1, 2.0]))
    x0 = draw(st.floats(0.0, 5.0, allow_nan=False))
    k = draw(st.integers(0, 6))
    gaps = draw(st.lists(st.floats(0.01, 2.0), min_size=k, max_size=k))
    claims = draw(st.lists(st.floats(0.0, 4.0), min_size=k, max_size=k))
    times = np.cumsum(gaps)
    horizon = float(times[-1] if k else 0.0) + draw(st.floats(0.0, 2.0))
    assume(k == 0 or np.all(np.diff(times) > 0))
    return SamplePath(ModelParams(x0, c, 1.0, ExponentialClaims(1.0)), times, claims, horizon)


class TestMollifiedStep:
    def test_ramp(self):
        phi = MollifiedStep(0.5, 10)
        assert phi.value(0.3) == 0.0
        assert phi.value(0.7) == 1.0
        assert phi.value(0.5) == pytest.approx(0.5)
        assert phi.derivative(0.5) == 5.0
        assert phi.derivative(phi.lower) == 0.0 and phi.derivative(phi.upper) == 0.0

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            MollifiedStep(0.0, 0)


class TestLocalTimeAt:
    """Explicit local time on the canonical path."""

    def test_two_traversals(self, pstar):
        assert local_time_at(pstar, 4.0, 0.5) == 2.0

    def test_unreached(self, pstar):
        assert local_time_at(pstar, 4.0, 10.0) == 0.0

    def test_terminal_atom(self, pstar):
        assert local_time_at(pstar, 4.0, 1.0) == 1.5

    def test_time_zero_is_zero(self, pstar):
        assert local_time_at(pstar, 0.0, 0.0) == 0.0

    def test_outside_domain(self, pstar):
        with pytest.raises(DomainError):
            local_time_at(pstar, 4.5, 0.5)

    def test_levels_bitwise_equal_scalar(self, paper_params):
        path = simulate(paper_params, 5.0, 3)
        xs = np.concatenate((np.linspace(-3, 10, 401), endpoint_levels(path, 5.0)))
        vec = local_time_levels(path, 5.0, xs)
        assert all(vec[i] == local_time_at(path, 5.0, x) for i, x in enumerate(xs))

    def test_occupation_ratio_oracle(self, paper_params):
        """L_t(x) is the limit of occupation of (x-h, x+h] over 2h."""
        path = simulate(paper_params, 5.0, 12)
        rng = np.random.default_rng(0)
        for x in rng.uniform(0.0, 8.0, 25):
            h = 1e-7
            ratio = occupation_measure(path, 5.0, (x - h, x + h)) / (2 * h)
            assert local_time_at(path, 5.0, x) == pytest.approx(ratio, rel=1e-5, abs=1e-5)

    @settings(max_examples=200, deadline=None)
    @given(hand_paths(), st.floats(-5, 15))
    def test_nonnegative(self, path, x):
        assert local_time_at(path, path.horizon, x) >= 0.0

    @settings(max_examples=200, deadline=None)
    @given(hand_paths(), st.floats(0, 1))
    def test_scaled_is_half_integer(self, path, u):
        x = float(np.quantile(endpoint_levels(path, path.horizon), u))
        v = scaled_local_time(path, path.horizon, x)
        assert 2 * v == math.floor(2 * v)


class TestCrossings:
    """Jump identity against segment enumeration."""

    @pytest.mark.parametrize("x, expected", [(0.5, 2), (1.5, 1), (-5.0, 0)])
    def test_canonical(self, pstar, x, expected):
        assert crossing_count(pstar, 4.0, x) == expected

    @pytest.mark.parametrize("x, expected", [(0.5, 2), (1.5, 1)])
    def test_canonical_geometric(self, pstar, x, expected):
        assert crossing_count_geometric(pstar, 4.0, x) == expected

    def test_single_segment(self, flat_path):
        assert crossing_count_geometric(flat_path, 1.0, 2.0) == 1

    def test_geometric_rejects_endpoint(self, pstar):
        with pytest.raises(PreconditionError):
            crossing_count_geometric(pstar, 4.0, 2.0)

    def test_degenerate_path_flagged(self):
        """Starting above the level and jumping exactly onto it at time t gives -1."""
        params = ModelParams(2.0, 1.0, 1.0, ExponentialClaims(1.0))
        path = SamplePath(params, [0.5], [3.0], 0.5)
        with pytest.raises(IntegrityError):
            crossing_count(path, 0.5, -0.5)

    @settings(max_examples=300, deadline=None)
    @given(hand_paths(), st.floats(-5, 15))
    def test_three_way_identity(self, path, x):
        t = path.horizon
        assume(not np.any(endpoint_levels(path, t) == x))
        n = crossing_count(path, t, x)
        assert n == crossing_count_geometric(path, t, x)
        assert scaled_local_time(path, t, x) == n

    def test_simulated(self, paper_params):
        rng = np.random.default_rng(1)
        for seed in range(50):
            path = simulate(paper_params, 5.0, seed)
            for x in rng.uniform(-2, 10, 20):
                n = crossing_count_geometric(path, 5.0, x)
                assert crossing_count(path, 5.0, x) == n
                assert local_time_at(path, 5.0, x) * paper_params.c == pytest.approx(n, rel=1e-15)


class TestTanaka:
    def test_kernel(self):
        assert tanaka_kernel(0.5, -1.0, 2.0) == pytest.approx(-1 / 3)
        assert tanaka_kernel(5.0, -1.0, 2.0) == 0.0
        assert tanaka_kernel(1.0, 1.0, 1.0) == 0.0

    def test_canonical(self, pstar):
        assert tanaka_jump_sum(pstar, 4.0, 0.5) == 1.0
        assert tanaka_jump_sum(pstar, 4.0, 5.0) == 0.0

    def test_no_jumps(self, flat_path):
        assert tanaka_jump_sum(flat_path, 1.0, 2.0) == 0.0

    @settings(max_examples=300, deadline=None)
    @given(hand_paths(), st.floats(-5, 15))
    def test_matches_explicit_off_post_jump_values(self, path, x):
        t = path.horizon
        assume(not np.any(path.post[1:] == x))
        assert local_time_tanaka(path, t, x) == local_time_at(path, t, x)

    def test_atoms_agree(self, pstar):
        for x in (0.0, 1.0):
            assert local_time_tanaka(pstar, 4.0, x) == local_time_at(pstar, 4.0, x)


class TestApproxLocalTime:
    """The approximating fields L^n and their eventual exactness."""

    def test_fine_window(self, pstar):
        assert approx_local_time(pstar, 4.0, 0.5, 10) == pytest.approx(2.0, rel=1e-14)

    def test_wide_window(self, pstar):
        assert approx_local_time(pstar, 4.0, 0.5, 1) == pytest.approx(1.5, rel=1e-14)

    def test_far_level(self, pstar):
        assert approx_local_time(pstar, 4.0, 50.0, 3) == 0.0

    def test_direct_formula_agrees(self, paper_params):
        rng = np.random.default_rng(4)
        for seed in range(30):
            path = simulate(paper_params, 5.0, seed)
            for x in rng.uniform(-2, 10, 5):
                for n in (1, 2, 5, 17, 100):
                    a = approx_local_time(path, 5.0, x, n)
                    b = approx_local_time_direct(path, 5.0, x, n)
                    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)

    def test_exact_beyond_threshold(self, paper_params):
        rng = np.random.default_rng(9)
        for seed in range(30):
            path = simulate(paper_params, 5.0, seed)
            x = float(rng.uniform(0, 9))
            n_star = exactness_threshold(path, 5.0, x)
            for n in (n_star, n_star + 1, 2 * n_star, 10 * n_star + 3):
                assert approx_local_time(path, 5.0, x, n) == local_time_at(path, 5.0, x)

    def test_threshold_is_minimal(self, pstar):
        # endpoints are {-1, 0, 1, 2}; at x = 0.4 the nearest is 0 at distance 0.4
        n_star = exactness_threshold(pstar, 4.0, 0.4)
        assert n_star == 3

    def test_threshold_rejects_endpoint(self, pstar):
        with pytest.raises(PreconditionError):
            exactness_threshold(pstar, 4.0, 1.0)
