import json

import numpy as np
import pytest

from risklt import (
    DomainError,
    ExponentialClaims,
    ModelParams,
    SamplePath,
    Segment,
    evaluate,
    evaluate_left,
    path_seed,
    segments,
    simulate,
)
from risklt.process import ClaimModel, jumps_upto


class TestModelParams:
    """Validation and serialization of the model parameters."""

    @pytest.mark.parametrize("kwargs", [
        {"x0": -1.0}, {"c": 0.0}, {"alpha": -2.0}, {"x0": float("nan")}, {"c": float("inf")},
    ])
    def test_rejects_invalid(self, kwargs):
        base = {"x0": 1.0, "c": 1.0, "alpha": 1.0, "claims": ExponentialClaims(1.0)}
        base.update(kwargs)
        with pytest.raises(ValueError):
            ModelParams(**base)

    def test_rejects_bad_beta(self):
        with pytest.raises(ValueError):
            ExponentialClaims(0.0)

    def test_round_trip(self, paper_params):
        assert ModelParams.from_dict(paper_params.to_dict()) == paper_params

    def test_unknown_claim_kind(self):
        with pytest.raises(ValueError):
            ClaimModel.from_dict({"kind": "pareto", "shape": 2.0})


class TestExponentialClaims:
    def test_density_and_cdf(self):
        m = ExponentialClaims(2.0)
        assert m.density(0.5) == pytest.approx(2.0 * np.exp(-1.0))
        assert m.cdf(0.5) == pytest.approx(1.0 - np.exp(-1.0))
        assert m.density(-1.0) == 0.0
        assert m.mean == 0.5

    def test_sample_mean(self):
        draws = ExponentialClaims(4.0).sample(np.random.default_rng(3), 200_000)
        assert draws.mean() == pytest.approx(0.25, abs=5 * 0.25 / np.sqrt(200_000))


class TestSamplePath:
    """Construction rules, equality and JSON fixtures."""

    def test_rejects_unsorted_times(self, unit_params):
        with pytest.raises(ValueError):
            SamplePath(unit_params, [2.0, 1.0], [1.0, 1.0], 4.0)

    def test_rejects_jump_past_horizon(self, unit_params):
        with pytest.raises(ValueError):
            SamplePath(unit_params, [5.0], [1.0], 4.0)

    def test_rejects_jump_at_zero(self, unit_params):
        with pytest.raises(ValueError):
            SamplePath(unit_params, [0.0], [1.0], 4.0)

    def test_rejects_negative_claim(self, unit_params):
        with pytest.raises(ValueError):
            SamplePath(unit_params, [1.0], [-1.0], 4.0)

    def test_rejects_length_mismatch(self, unit_params):
        with pytest.raises(ValueError):
            SamplePath(unit_params, [1.0, 2.0], [1.0], 4.0)

    def test_arrays_are_read_only(self, pstar):
        with pytest.raises(ValueError):
            pstar.jump_times[0] = 1.0

    def test_post_and_pre(self, pstar):
        assert pstar.post.tolist() == [0.0, -1.0]
        assert pstar.pre.tolist() == [2.0]

    def test_json_field_names(self, pstar):
        data = json.loads(pstar.to_json())
        assert set(data) == {"x0", "c", "alpha", "claims", "horizon", "jump_times", "claim_sizes"}
        assert data["claims"] == {"kind": "exponential", "beta": 1.0}

    def test_json_round_trip(self, pstar, tmp_path):
        assert SamplePath.from_json(pstar.to_json()) == pstar
        pstar.save(tmp_path / "p.json")
        assert SamplePath.load(tmp_path / "p.json") == pstar

    def test_json_extra_key_rejected(self, pstar):
        data = pstar.to_dict()
        data["note"] = "x"
        with pytest.raises(ValueError):
            SamplePath.from_dict(data)


class TestEvaluate:
    """Right-continuous values and left limits on the canonical path."""

    def test_start(self, pstar):
        assert evaluate(pstar, 0.0) == 0.0

    def test_at_jump(self, pstar):
        assert evaluate(pstar, 2.0) == -1.0
        assert evaluate_left(pstar, 2.0) == 2.0

    def test_end(self, pstar):
        assert evaluate(pstar, 4.0) == 1.0

    def test_vectorized(self, pstar):
        np.testing.assert_array_equal(evaluate(pstar, np.array([0.0, 1.0, 2.0, 3.0])), [0.0, 1.0, -1.0, 0.0])

    @pytest.mark.parametrize("t", [-0.1, 4.1])
    def test_outside_domain(self, pstar, t):
        with pytest.raises(DomainError):
            evaluate(pstar, t)
        with pytest.raises(DomainError):
            evaluate_left(pstar, t)

    def test_jumps_upto(self, pstar):
        assert jumps_upto(pstar, 1.999) == 0
        assert jumps_upto(pstar, 2.0) == 1


class TestSegments:
    def test_canonical(self, pstar):
        assert segments(pstar, 4.0) == [Segment(0.0, 2.0, 0.0, 2.0), Segment(2.0, 4.0, -1.0, 1.0)]

    def test_no_jumps(self, flat_path):
        assert segments(flat_path, 1.0) == [Segment(0.0, 1.0, 1.0, 3.0)]

    def test_before_jump(self, pstar):
        assert segments(pstar, 1.5) == [Segment(0.0, 1.5, 0.0, 1.5)]

    def test_at_jump_time_drops_empty_piece(self, pstar):
        assert segments(pstar, 2.0) == [Segment(0.0, 2.0, 0.0, 2.0)]

    def test_time_zero(self, pstar):
        assert segments(pstar, 0.0) == []

    def test_outside_domain(self, pstar):
        with pytest.raises(DomainError):
            segments(pstar, 5.0)


class TestSimulate:
    """Exact event-driven simulation."""

    def test_zero_horizon(self, paper_params):
        path = simulate(paper_params, 0.0, 11)
        assert path.n_jumps == 0 and path.horizon == 0.0

    def test_deterministic(self, paper_params):
        assert simulate(paper_params, 3.0, 7) == simulate(paper_params, 3.0, 7)

    def test_different_seeds_differ(self, paper_params):
        assert simulate(paper_params, 30.0, 1) != simulate(paper_params, 30.0, 2)

    def test_negative_horizon(self, paper_params):
        with pytest.raises(DomainError):
            simulate(paper_params, -1.0, 0)

    def test_long_horizon_crosses_chunks(self):
        params = ModelParams(0.0, 1.0, 50.0, ExponentialClaims(1.0))
        path = simulate(params, 10.0, 5)
        assert abs(path.n_jumps - 500) < 6 * np.sqrt(500)
        assert path.jump_times[-1] <= 10.0

    def test_mean_jump_count(self, paper_params):
        """Poisson mean alpha*t over 10^5 independent seeds."""
        counts = np.array([simulate(paper_params, 1.0, path_seed(2024, i)).n_jumps for i in range(100_000)])
        assert abs(counts.mean() - 1.0) <= 3.0 * np.sqrt(1.0 / 100_000)

    def test_claim_distribution(self, paper_params):
        claims = np.concatenate([simulate(paper_params, 50.0, s).claim_sizes for s in range(40)])
        assert abs(claims.mean() - 1.0) < 5.0 / np.sqrt(claims.size)


class TestPathSeed:
    def test_stable_and_distinct(self):
        assert path_seed(5, 3) == path_seed(5, 3)
        assert len({path_seed(5, i) for i in range(1000)}) == 1000
        assert path_seed(5, 0) != path_seed(6, 0)
