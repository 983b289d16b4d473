import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transmon_ccz.fidelity import (
    CCZObjective,
    DegeneratePhaseError,
    extract_phases,
    intrinsic_fidelity,
    objective,
    refine_phases,
    score,
    target_ccz,
    wrap_phase,
)
from transmon_ccz.hamiltonian import TransmonChain
from transmon_ccz.propagator import propagate
from transmon_ccz.pulses import ControlTable

CCZ = np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex)
phase_lists = st.lists(st.floats(-np.pi, np.pi), min_size=3, max_size=3)


def z_phase(theta):
    """Single-transmon z phases on three qubits, built from 2x2 factors."""
    out = np.ones((1, 1))
    for t in theta:
        out = np.kron(out, np.diag([1, np.exp(1j * t)]))
    return out


class TestTarget:
    def test_zero_phases(self):
        np.testing.assert_array_equal(target_ccz([0, 0, 0]), CCZ)

    @settings(max_examples=30, deadline=None)
    @given(phase_lists)
    def test_unit_modulus(self, theta):
        np.testing.assert_allclose(np.abs(np.diag(target_ccz(theta))), 1.0)

    def test_pi_on_first(self):
        d = np.diag(target_ccz([np.pi, 0, 0]))
        np.testing.assert_allclose(d[[4, 5, 6]], -1, atol=1e-15)
        np.testing.assert_allclose(d[7], 1, atol=1e-15)
        np.testing.assert_allclose(d[:4], 1, atol=1e-15)

    def test_matches_listed_layout(self):
        t1, t2, t3 = 0.3, -0.7, 1.1
        e = np.exp
        expected = [1, e(1j * t3), e(1j * t2), e(1j * (t2 + t3)), e(1j * t1), e(1j * (t1 + t3)), e(1j * (t1 + t2)),
                    -e(1j * (t1 + t2 + t3))]
        np.testing.assert_allclose(np.diag(target_ccz([t1, t2, t3])), expected, atol=1e-15)

    def test_equals_ccz_times_z_phases(self):
        theta = [0.4, 1.2, -2.0]
        np.testing.assert_allclose(target_ccz(theta), z_phase(theta) @ CCZ, atol=1e-15)


class TestExtractPhases:
    def test_ideal(self):
        np.testing.assert_array_equal(extract_phases(CCZ), [0, 0, 0])

    @settings(max_examples=30, deadline=None)
    @given(phase_lists)
    def test_recovers_target(self, theta):
        np.testing.assert_allclose(extract_phases(target_ccz(theta)), wrap_phase(theta), atol=1e-12)

    def test_z_rotation_on_qubit_three(self):
        phi = 0.83
        # R_z(phi) on qubit 3 after CCZ, written out as an explicit 8x8 product
        rz = np.kron(np.eye(4), np.diag([1, np.exp(1j * phi)]))
        u = np.zeros((8, 8), dtype=complex)
        for i in range(8):
            for j in range(8):
                u[i, j] = sum(rz[i, k] * CCZ[k, j] for k in range(8))
        np.testing.assert_allclose(extract_phases(u), [0, 0, phi], atol=1e-15)

    def test_degenerate(self):
        u = np.eye(8, dtype=complex)
        u[4, 4] = 0
        with pytest.raises(DegeneratePhaseError):
            extract_phases(u)
        fid, phases = score(u)
        np.testing.assert_array_equal(phases, [0, 0, 0])

    def test_range(self):
        assert wrap_phase(-np.pi) == np.pi
        assert wrap_phase(3 * np.pi) == np.pi


class TestIntrinsicFidelity:
    def test_ideal(self):
        assert intrinsic_fidelity(CCZ, [0, 0, 0]) == 1.0

    def test_identity(self):
        assert intrinsic_fidelity(np.eye(8), [0, 0, 0]) == 0.75

    @settings(max_examples=40, deadline=None)
    @given(phase_lists, phase_lists)
    def test_phase_compensation_invariance(self, base, delta):
        rng = np.random.default_rng(abs(hash(tuple(base))) % 2**32)
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        u, _ = np.linalg.qr(a)
        u = 0.9 * u + 0.1 * target_ccz(base)
        f0 = intrinsic_fidelity(u, extract_phases(u))
        moved = z_phase(delta) @ u
        assert abs(intrinsic_fidelity(moved, extract_phases(moved)) - f0) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(phase_lists)
    def test_one_iff_target(self, theta):
        u = target_ccz(theta)
        assert intrinsic_fidelity(u, extract_phases(u)) == pytest.approx(1.0, abs=1e-12)
        spoiled = u.copy()
        spoiled[7, 7] *= np.exp(0.01j)
        assert intrinsic_fidelity(spoiled, extract_phases(spoiled)) < 1 - 1e-6

    def test_sub_unitary_bound(self, rng):
        a = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
        u, _ = np.linalg.qr(a)
        idx = [0, 1, 4, 5, 16, 17, 20, 21]
        block = u[np.ix_(idx, idx)]
        assert abs(np.trace(block)) <= 8
        assert 0 <= score(block)[0] <= 1


class TestObjective:
    def test_closed_form_diagonal_evolution(self):
        # zero coupling and zero detuning: each basis state only picks up -eta phases
        eta = np.array([[0, 0.013, 0.3, 0.7], [0, -0.021, 0.25, 0.5], [0, 0.008, 0.2, 0.6]])
        chain = TransmonChain(eta, [0, 0])
        table = ControlTable(np.zeros((3, 7)), dt=1.3)
        theta = 7 * 1.3
        e1 = eta[:, 1]
        phase = np.array([2 * np.pi * theta * (b1 * e1[0] + b2 * e1[1] + b3 * e1[2])
                          for b1 in (0, 1) for b2 in (0, 1) for b3 in (0, 1)])
        u_diag = np.diag(np.exp(1j * phase))
        expected = intrinsic_fidelity(u_diag, extract_phases(u_diag))
        assert objective(chain, table) == pytest.approx(expected, abs=1e-12)
        # single-transmon phases are absorbed, so the gate is the identity up to z phases
        assert expected == pytest.approx(0.75, abs=1e-12)

    def test_bounded(self, chain, rng):
        for _ in range(5):
            table = ControlTable(rng.uniform(-2.5, 2.5, (3, 10)))
            assert -1e-12 <= objective(chain, table) <= 1 + 1e-12

    def test_matches_full_propagation(self, chain, rng):
        table = ControlTable(rng.uniform(-1, 1, (3, 12)))
        u = propagate(chain, table).u_comp
        assert objective(chain, table) == pytest.approx(intrinsic_fidelity(u, extract_phases(u)), abs=1e-12)

    def test_batch_matches_scalar(self, chain, rng):
        obj = CCZObjective(chain)
        xs = rng.uniform(-1, 1, (6, 30))
        np.testing.assert_allclose(obj.batch(xs), [obj(x) for x in xs], atol=1e-13)

    def test_refinement_never_worse(self, chain, rng):
        table = ControlTable(rng.uniform(-1, 1, (3, 12)))
        plain = objective(chain, table)
        assert objective(chain, table, refine=True) >= plain - 1e-15


def test_refine_phases_finds_optimum():
    theta = np.array([1.0, -2.0, 0.5])
    u = 0.5 * target_ccz(theta) + 0.5 * np.diag(np.exp(1j * np.array([0, 2.0, 1.0, 0.1, -1, 0.3, 0.2, 0.9])))
    best = refine_phases(u)
    f_best = intrinsic_fidelity(u, best)
    grid = np.linspace(-np.pi, np.pi, 41)
    brute = max(intrinsic_fidelity(u, [a, b, c]) for a in grid for b in grid for c in grid)
    assert f_best >= brute - 1e-6
