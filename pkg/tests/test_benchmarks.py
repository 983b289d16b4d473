import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from transmon_ccz.benchmarks import benchmark_suite, rastrigin, rosenbrock, sphere


class TestFunctions:
    def test_optima(self):
        assert sphere(np.zeros(7)) == 0
        assert rosenbrock(np.ones(7)) == 0
        assert rastrigin(np.zeros(7)) == 0

    def test_values(self):
        assert sphere([1, 2, 3]) == 14
        assert rosenbrock([0, 0]) == 1
        assert rastrigin([0.5]) == pytest.approx(10 + 0.25 + 10)

    @given(arrays(float, (3, 5), elements=st.floats(-5, 5)))
    def test_vectorised_and_nonnegative(self, xs):
        for f in (sphere, rosenbrock, rastrigin):
            batch = f(xs)
            np.testing.assert_allclose(batch, [f(x) for x in xs])
            assert np.all(batch >= -1e-12)


def test_suite_metadata():
    suite = benchmark_suite()
    assert set(suite) == {"sphere", "rosenbrock", "rastrigin"}
    for b in suite.values():
        opt = b.optimum(10)
        assert b.lower < opt.min() and opt.max() < b.upper
        assert b.fitness(opt) == 0
        np.testing.assert_allclose(b.batch_fitness(np.stack([opt, opt + 0.1])), [b.fitness(opt), b.fitness(opt + 0.1)])
