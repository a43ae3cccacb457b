import numpy as np
import pytest

from deformedqm.algebra import (
    LadderPair,
    ModelParams,
    QOscillatorParams,
    RelationPair,
    build_q_fock,
    deformed_commutator_residual,
    fock_weights,
    ladder_to_observables,
    transform_inhomogeneous_to_homogeneous,
)


def ladder_weights_oracle(q, n):
    # independent of fock_weights: closed geometric sum, q=1 by hand
    if q == 1.0:
        return [float(k) for k in range(n)]
    return [(q**k - 1.0) / (q - 1.0) for k in range(n)]


class TestModelParams:
    def test_defaults(self):
        p = ModelParams(beta=-1.0)
        assert p.hbar == 1.0

    def test_rejects_nonpositive_hbar(self):
        with pytest.raises(ValueError):
            ModelParams(beta=0.0, hbar=0.0)

    def test_rejects_infinite_beta(self):
        with pytest.raises(ValueError):
            ModelParams(beta=np.inf)


class TestQOscillatorParams:
    def test_k_computed_from_q_and_l(self):
        # q=3, hbar=1, L=1 -> K = 1
        p = QOscillatorParams(q=3.0, L=1.0)
        assert p.K == 1.0

    def test_constraint_holds_for_random_inputs(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            q = float(rng.uniform(0.1, 5.0))
            L = float(rng.uniform(0.2, 3.0))
            hbar = float(rng.uniform(0.5, 2.0))
            p = QOscillatorParams(q=q, L=L, hbar=hbar)
            assert p.K * p.L == pytest.approx(hbar * (q + 1) / 4, rel=1e-15)

    def test_violating_k_rejected(self):
        with pytest.raises(ValueError, match="K\\*L"):
            QOscillatorParams(q=3.0, L=1.0, K=2.0)

    def test_negative_q_rejected(self):
        with pytest.raises(ValueError):
            QOscillatorParams(q=-0.5)


class TestQFock:
    def test_q1_is_ordinary_oscillator(self):
        pair = build_q_fock(q=1.0, n=4)
        num = (pair.raising @ pair.lowering).real
        assert np.allclose(np.diag(num), [0.0, 1.0, 2.0, 3.0], atol=1e-15)

    def test_q2_number_diagonal(self):
        # recursion s_{k+1} = 1 + 2 s_k from the ground state
        pair = build_q_fock(q=2.0, n=5)
        num = np.diag(pair.raising @ pair.lowering).real
        assert np.allclose(num[:4], [0.0, 1.0, 3.0, 7.0], atol=1e-14)

    def test_qhalf_weights(self):
        pair = build_q_fock(q=0.5, n=3)
        num = np.diag(pair.raising @ pair.lowering).real
        assert np.allclose(num, [0.0, 1.0, 1.5], atol=1e-15)

    def test_weights_match_geometric_oracle(self):
        for q in (0.3, 0.5, 1.0, 2.0, 3.7):
            s = fock_weights(q, 12)
            assert np.allclose(s, ladder_weights_oracle(q, 12), rtol=1e-13)

    def test_relation_exact_on_interior(self):
        for q in (0.5, 1.0, 2.0, 5.0):
            for n in (2, 5, 16):
                pair = build_q_fock(q, n)
                assert pair.relation_residual() < 1e-12

    def test_raising_is_adjoint(self):
        pair = build_q_fock(q=2.0, n=6)
        assert np.array_equal(pair.raising, pair.lowering.conj().T)

    def test_small_dimension_rejected(self):
        with pytest.raises(ValueError):
            build_q_fock(q=2.0, n=1)

    def test_negative_q_rejected(self):
        with pytest.raises(ValueError):
            build_q_fock(q=-1.0, n=4)


class TestObservables:
    def test_hermitian_exactly(self):
        pair = build_q_fock(q=2.0, n=8)
        x, p = ladder_to_observables(pair, QOscillatorParams(q=2.0))
        assert np.array_equal(x, x.conj().T)
        assert np.array_equal(p, p.conj().T)

    def test_undeformed_canonical_commutator(self):
        # q=1, L=K=sqrt(hbar/2): [X,P] = i*hbar on the interior block
        L = np.sqrt(0.5)
        pair = build_q_fock(q=1.0, n=10)
        params = QOscillatorParams(q=1.0, L=L)
        assert params.K == pytest.approx(L)
        x, p = ladder_to_observables(pair, params)
        comm = x @ p - p @ x
        assert np.allclose(comm[:8, :8], 1j * np.eye(10)[:8, :8], atol=1e-14)

    def test_q_mismatch_rejected(self):
        pair = build_q_fock(q=2.0, n=4)
        with pytest.raises(ValueError, match="mismatch"):
            ladder_to_observables(pair, QOscillatorParams(q=3.0))


class TestDeformedCommutator:
    def test_q1_reduces_to_canonical(self):
        pair = build_q_fock(q=1.0, n=12)
        params = QOscillatorParams(q=1.0)
        x, p = ladder_to_observables(pair, params)
        assert deformed_commutator_residual(x, p, params, block_end=10) < 1e-12

    def test_q2_interior_block(self):
        pair = build_q_fock(q=2.0, n=12)
        params = QOscillatorParams(q=2.0)
        x, p = ladder_to_observables(pair, params)
        assert deformed_commutator_residual(x, p, params, block_end=10) < 1e-12

    def test_random_q_and_scales(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            q = float(rng.uniform(0.2, 4.0))
            L = float(rng.uniform(0.3, 2.0))
            hbar = float(rng.uniform(0.5, 2.0))
            pair = build_q_fock(q, 10)
            params = QOscillatorParams(q=q, L=L, hbar=hbar)
            x, p = ladder_to_observables(pair, params)
            assert deformed_commutator_residual(x, p, params, 8) < 1e-11

    def test_block_too_large_rejected(self):
        pair = build_q_fock(q=2.0, n=8)
        params = QOscillatorParams(q=2.0)
        x, p = ladder_to_observables(pair, params)
        with pytest.raises(ValueError, match="block_end"):
            deformed_commutator_residual(x, p, params, block_end=8)

    def test_top_levels_really_are_corrupted(self):
        # the guard is not vacuous: including the top rows breaks the identity
        pair = build_q_fock(q=2.0, n=8)
        params = QOscillatorParams(q=2.0)
        x, p = ladder_to_observables(pair, params)
        n = 8
        lhs = x @ p - p @ x
        rhs = 1j * (np.eye(n) + (params.q - 1) * (
            x @ x / (4 * params.L**2) + p @ p / (4 * params.K**2)))
        assert np.max(np.abs(lhs - rhs)) > 1.0


class TestRelationTransform:
    def test_cancellation_forces_zero(self):
        # A = c/(1-q) * B^{-1} diagonal pair -> transform returns a = 0
        B = np.diag([1.0, 3.0])
        A = (1.0 / (1.0 - 2.0)) * np.linalg.inv(B)
        pair = RelationPair(A=A, B=B, q=2.0, c=1.0, valid_block=2)
        assert pair.residual() < 1e-15
        out = transform_inhomogeneous_to_homogeneous(pair)
        assert np.allclose(out.A, 0.0, atol=1e-15)
        assert out.residual() < 1e-15

    def test_two_by_two_worked_example(self):
        # built from a_ij (b_j - q b_i) = c delta_ij, verified by direct
        # matrix arithmetic below
        A = np.array([[-1.0, 5.0], [0.0, -0.5]])
        B = np.diag([1.0, 2.0])
        pair = RelationPair(A=A, B=B, q=2.0, c=1.0, valid_block=2)
        assert pair.residual() < 1e-15
        out = transform_inhomogeneous_to_homogeneous(pair)
        assert np.allclose(out.A, [[0.0, 5.0], [0.0, 0.0]], atol=1e-15)
        res = out.A @ out.B - 2.0 * out.B @ out.A
        assert np.max(np.abs(res)) < 1e-14

    def test_q_one_rejected(self):
        pair = RelationPair(A=np.eye(2), B=np.eye(2), q=1.0, c=1.0,
                            valid_block=2)
        with pytest.raises(ValueError, match="q = 1"):
            transform_inhomogeneous_to_homogeneous(pair)

    def test_singular_b_rejected(self):
        pair = RelationPair(A=np.eye(2), B=np.diag([1.0, 0.0]), q=2.0, c=1.0,
                            valid_block=2)
        with pytest.raises(np.linalg.LinAlgError):
            transform_inhomogeneous_to_homogeneous(pair)

    def test_random_geometric_chains(self):
        # B = diag(b0 * q^k) admits free superdiagonal entries in A; the
        # transform must annihilate the inhomogeneity for all of them
        rng = np.random.default_rng(7)
        for _ in range(30):
            n = int(rng.integers(2, 7))
            q = float(rng.choice([0.5, 2.0, 3.0, 0.25]))
            c = float(rng.uniform(-2.0, 2.0))
            b0 = float(rng.uniform(0.5, 2.0))
            b = b0 * q ** np.arange(n)
            A = np.diag(c / (b * (1.0 - q)))
            A += np.diag(rng.normal(size=n - 1), k=1)
            pair = RelationPair(A=A, B=np.diag(b), q=q, c=c, valid_block=n)
            assert pair.residual() < 1e-12
            out = transform_inhomogeneous_to_homogeneous(pair)
            assert out.residual() < 1e-12
