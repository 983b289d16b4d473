import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transmon_ccz.pulses import ControlTable, PulseShape

SHAPES = [PulseShape.PIECEWISE_CONSTANT, PulseShape.ERF]


@pytest.mark.parametrize("shape", SHAPES)
def test_constant_table(shape):
    table = ControlTable(np.full((3, 5), 0.3), dt=1.0, shape=shape)
    for t in np.linspace(0, 5, 23):
        np.testing.assert_allclose(table.sample(t), 0.3, atol=1e-15)


def test_piecewise_two_segments():
    table = ControlTable([[0.1, -0.2]], dt=1.0)
    assert table.sample(0.5)[0] == 0.1
    assert table.sample(1.5)[0] == -0.2
    # right-open segments, last one closed
    assert table.sample(1.0)[0] == -0.2
    assert table.sample(2.0)[0] == -0.2


def test_erf_midpoint_of_transition():
    table = ControlTable([[0.1, -0.3]], dt=1.0, shape=PulseShape.ERF, sigma=0.25)
    assert table.sample(1.0)[0] == pytest.approx(-0.1, abs=1e-15)


def test_erf_approaches_steps():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1, 1, (3, 8))
    step = ControlTable(pts, dt=1.0)
    smooth = ControlTable(pts, dt=1.0, shape=PulseShape.ERF, sigma=1e-3)
    for t in np.arange(8) + 0.5:
        assert np.max(np.abs(step.sample(t) - smooth.sample(t))) < 1e-6


def test_sample_out_of_range():
    table = ControlTable(np.zeros((3, 4)))
    with pytest.raises(ValueError):
        table.sample(-0.1)
    with pytest.raises(ValueError):
        table.sample(4.01)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(-2.5, 2.5), min_size=2, max_size=10),
    st.floats(0, 1),
    st.sampled_from(SHAPES),
)
def test_sample_bounded_by_points(pts, frac, shape):
    table = ControlTable([pts], dt=1.0, shape=shape, sigma=0.25)
    v = table.sample(frac * table.duration)[0]
    eps = 0.0 if shape is PulseShape.PIECEWISE_CONSTANT else 1e-12
    assert min(pts) - eps <= v <= max(pts) + eps


class TestGenome:
    def test_zero_vector(self):
        table = ControlTable.from_genome(np.zeros(12))
        np.testing.assert_array_equal(table.points, np.zeros((3, 4)))

    def test_round_trip(self, rng):
        x = rng.uniform(-2.5, 2.5, 78)
        np.testing.assert_array_equal(ControlTable.from_genome(x).to_genome(), x)

    def test_transmon_major(self):
        x = np.arange(6) / 10
        np.testing.assert_array_equal(ControlTable.from_genome(x).points, [[0, 0.1], [0.2, 0.3], [0.4, 0.5]])

    def test_reference_grid(self):
        table = ControlTable.from_genome(np.zeros(78), dt=1.0)
        assert table.points.shape == (3, 26)
        assert table.duration == 26.0

    @pytest.mark.parametrize("x", [np.zeros(7), np.zeros(0), np.full(6, 3.0)])
    def test_invalid(self, x):
        with pytest.raises(ValueError):
            ControlTable.from_genome(x)


class TestValidation:
    def test_dt_positive(self):
        with pytest.raises(ValueError):
            ControlTable(np.zeros((3, 2)), dt=0)

    def test_sigma_positive(self):
        with pytest.raises(ValueError):
            ControlTable(np.zeros((3, 2)), shape=PulseShape.ERF, sigma=0)

    def test_bounds(self):
        with pytest.raises(ValueError):
            ControlTable(np.full((3, 2), 0.6), bounds=(-0.5, 0.5))


@pytest.mark.parametrize("shape", SHAPES)
def test_json_round_trip(tmp_path, rng, shape):
    table = ControlTable(rng.uniform(-1, 1, (3, 26)), dt=1.0, shape=shape, sigma=0.3, bounds=(-1, 1))
    path = tmp_path / "pulse.json"
    table.save(path)
    back = ControlTable.load(path)
    np.testing.assert_array_equal(back.points, table.points)
    assert (back.dt, back.shape, back.bounds) == (table.dt, table.shape, table.bounds)
    if shape is PulseShape.ERF:
        assert back.sigma == 0.3
    doc = table.to_dict()
    assert set(doc) >= {"dt_ns", "shape", "bounds_ghz", "points_ghz"}


def test_json_rejects_unknown_keys():
    with pytest.raises(ValueError):
        ControlTable.from_dict({"dt_ns": 1, "shape": "erf", "bounds_ghz": [-1, 1], "points_ghz": [[0]], "extra": 1})
