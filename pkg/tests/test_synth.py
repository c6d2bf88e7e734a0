import numpy as np
import pytest
from scipy.integrate import quad

from chartbench.linalg import pairwise_sq_dists
from chartbench.synth import (
    Dataset,
    SheetChart,
    SpiralParams,
    invert_arc_length,
    roll,
    sample_sheet,
    spiral_arc_length,
    verify_isometry,
)


def quad_arc_length(theta, a, b):
    """Independent oracle: numerical quadrature of the speed integrand."""
    val, _ = quad(lambda t: np.sqrt((a + b * t) ** 2 + b * b), 0.0, theta, limit=200)
    return val


class TestSampleSheet:
    def test_paper_scale_bounds(self):
        chart = sample_sheet(4, 60, 10, seed=7)
        assert chart.Q.shape == (4, 2)
        assert np.all((chart.Q[:, 0] >= 0) & (chart.Q[:, 0] <= 60))
        assert np.all((chart.Q[:, 1] >= 0) & (chart.Q[:, 1] <= 10))

    def test_determinism(self):
        a = sample_sheet(1, 1, 1, seed=0)
        b = sample_sheet(1, 1, 1, seed=0)
        assert np.array_equal(a.Q, b.Q)

    def test_law_of_large_numbers(self):
        chart = sample_sheet(10000, 60, 10, seed=1)
        assert abs(chart.Q[:, 0].mean() - 30.0) <= 1.0

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            sample_sheet(0, 60, 10, seed=0)
        with pytest.raises(ValueError):
            sample_sheet(5, -1, 10, seed=0)
        with pytest.raises(ValueError):
            sample_sheet(5, 60, 0, seed=0)


class TestArcLength:
    def test_closed_form_matches_quadrature(self):
        sp = SpiralParams(a=1.0, b=0.5)
        for theta in [0.1, 1.0, 2 * np.pi, 13.5]:
            assert abs(spiral_arc_length(theta, sp) - quad_arc_length(theta, 1.0, 0.5)) <= 1e-8

    def test_inversion_tolerance(self):
        sp = SpiralParams(a=1.0, b=0.5)
        s = np.random.default_rng(0).uniform(0, 60, size=200)
        theta = invert_arc_length(s, sp, w_scale=60.0)
        assert np.abs(spiral_arc_length(theta, sp) - s).max() <= 1e-10 * 60.0


class TestRoll:
    def test_origin_of_the_spiral(self):
        chart = SheetChart(Q=np.array([[0.0, 5.0]]), W=60, H=10, seed=0)
        ds = roll(chart, SpiralParams(a=1.0, b=0.5))
        assert np.allclose(ds.X[0], [1.0, 0.0, 5.0], atol=1e-12)

    def test_full_turn_lands_on_positive_x_axis(self):
        # oracle: the target arc length comes from quadrature, not the
        # closed form under test
        a, b = 1.0, 0.5
        s_star = quad_arc_length(2 * np.pi, a, b)
        chart = SheetChart(Q=np.array([[s_star, 3.0]]), W=s_star + 1, H=10, seed=0)
        ds = roll(chart, SpiralParams(a=a, b=b))
        assert np.allclose(ds.X[0], [1.0 + np.pi, 0.0, 3.0], atol=1e-8)

    def test_chord_never_exceeds_intrinsic_distance(self):
        chart = sample_sheet(200, 60, 10, seed=5)
        ds = roll(chart)
        amb = pairwise_sq_dists(ds.X)
        intr = pairwise_sq_dists(chart.Q)
        assert np.all(amb <= intr + 1e-9)

    def test_determinism_of_dataset(self):
        d1 = roll(sample_sheet(100, 60, 10, seed=2))
        d2 = roll(sample_sheet(100, 60, 10, seed=2))
        assert np.array_equal(d1.X, d2.X)

    def test_unit_speed_forward_difference(self):
        sp = SpiralParams(a=1.0, b=0.5)
        chart = sample_sheet(50, 59.9, 10, seed=4)
        ds = roll(chart, sp)
        eps = 1e-4
        bumped = chart.Q.copy()
        bumped[:, 0] += eps
        X2 = roll(SheetChart(Q=bumped, W=60, H=10, seed=4), sp).X
        speed = np.linalg.norm(X2 - ds.X, axis=1) / eps
        assert np.abs(speed - 1.0).max() <= 1e-4

    def test_injectivity_at_desk_scale(self):
        for b in (0.3, 0.5):
            ds = roll(sample_sheet(2000, 60, 10, seed=7), SpiralParams(a=1.0, b=b))
            D2 = pairwise_sq_dists(ds.X)
            off = D2[np.triu_indices(2000, 1)]
            assert off.min() > 0.0

    def test_rejects_bad_spiral(self):
        with pytest.raises(ValueError):
            SpiralParams(a=0.0, b=0.5)
        with pytest.raises(ValueError):
            SpiralParams(a=1.0, b=-0.1)


class TestVerifyIsometry:
    def test_rolled_dataset_is_isometric(self):
        ds = roll(sample_sheet(500, 60, 10, seed=7))
        assert verify_isometry(ds, step=1e-4) <= 1e-4

    def test_scaled_embedding_is_flagged(self):
        chart = sample_sheet(100, 60, 10, seed=1)
        base = roll(chart)
        scaled = Dataset(X=2.0 * base.X, chart=chart, spiral=base.spiral)
        from chartbench.synth import _roll_map

        embed = _roll_map(base.spiral, chart.W)
        dev = verify_isometry(scaled, step=1e-4, embed=lambda Q: 2.0 * embed(Q))
        assert dev >= 0.9

    def test_flat_embedding_is_exact(self):
        chart = sample_sheet(100, 60, 10, seed=1)
        flat = np.column_stack([chart.Q, np.zeros(100)])
        ds = Dataset(X=flat, chart=chart, spiral=SpiralParams())
        dev = verify_isometry(ds, step=1e-4,
                              embed=lambda Q: np.column_stack([Q, np.zeros(len(Q))]))
        assert dev <= 1e-12

    def test_rejects_nonpositive_step(self):
        ds = roll(sample_sheet(10, 60, 10, seed=0))
        with pytest.raises(ValueError):
            verify_isometry(ds, step=0.0)
