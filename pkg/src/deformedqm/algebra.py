"""Deformed oscillator algebra on truncated Fock spaces.

Implements the homogeneous / inhomogeneous relation transform

    A@B - q*B@A = c*Id   <-->   a@b - q*b@a = 0,

the q-oscillator ladder pair with  a a+ - q a+ a = 1,  and the quadrature
observables  X = L(a + a+),  P = iK(a+ - a)  whose commutator closes on

    [X, P] = i*hbar*(1 + (q-1)*(X^2/(4L^2) + P^2/(4K^2)))

provided K*L = hbar*(q+1)/4.  All representations are finite N x N
truncations; the algebra holds exactly away from the top one or two Fock
levels, and every residual check takes an explicit interior block bound so
truncation artifacts stay visible.

Note on signs: writing P = iK(a - a+) instead flips the sign of [X, P] and
is incompatible with a positive K*L; the convention used here is the one
that closes the commutator identity above with K, L > 0 (it matches the
usual oscillator quadratures at q = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Global parameters: Planck constant and deformation strength.

    The sign of ``beta`` selects the regime: beta < 0 gives bounded
    momentum space, beta > 0 gives a minimal position uncertainty,
    beta = 0 is the undeformed canonical pair.
    """

    beta: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not np.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")


@dataclass(frozen=True)
class QOscillatorParams:
    """Length/momentum scales of the q-oscillator quadratures.

    K is computed from q and L through K*L = hbar*(q+1)/4.  An explicitly
    supplied K that violates this constraint is rejected.
    """

    q: float
    L: float = 1.0
    hbar: float = 1.0
    K: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.q > 0):
            raise ValueError(f"q must be a positive real, got {self.q}")
        if not (self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        if not (self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        k_required = self.hbar * (self.q + 1.0) / (4.0 * self.L)
        if self.K is None:
            object.__setattr__(self, "K", k_required)
        elif abs(self.K - k_required) > 1e-12 * abs(k_required):
            raise ValueError(
                f"K*L = {self.K * self.L} violates K*L = hbar*(q+1)/4 = "
                f"{k_required * self.L}"
            )


@dataclass(frozen=True, eq=False)
class LadderPair:
    """Mutually adjoint N x N ladder matrices with a a+ - q a+ a = 1.

    The relation holds exactly on Fock indices < dim - 1; the top level is
    corrupted by truncation.
    """

    lowering: np.ndarray
    raising: np.ndarray
    dim: int
    q: float

    def __post_init__(self):
        if not np.array_equal(self.raising, self.lowering.conj().T):
            raise ValueError("raising must be the conjugate transpose of lowering")

    def relation_residual(self) -> float:
        """Defect of a a+ - q a+ a = 1 over the valid block (indices < dim-1).

        Measured in the max-norm relative to the largest entry of the
        participating terms (floored at 1): the ladder weights grow like
        q^N, so an absolute norm would only report rounding at that scale.
        """
        a, ad = self.lowering, self.raising
        lhs = a @ ad
        rhs = self.q * (ad @ a)
        r = lhs - rhs - np.eye(self.dim)
        scale = max(1.0, np.max(np.abs(lhs)), np.max(np.abs(rhs)))
        m = self.dim - 1
        return float(np.max(np.abs(r[:m, :m])) / scale)


@dataclass(frozen=True, eq=False)
class RelationPair:
    """Matrices satisfying A@B - q*B@A = c*Id on a leading block.

    ``valid_block`` is the exclusive index bound below which the relation
    holds; pairs built from untruncated data use the full dimension.
    """

    A: np.ndarray
    B: np.ndarray
    q: float
    c: float
    valid_block: int

    def residual(self) -> float:
        """Relative max-norm of A@B - q*B@A - c*Id over the valid block."""
        n = self.A.shape[0]
        lhs = self.A @ self.B
        rhs = self.q * (self.B @ self.A)
        r = lhs - rhs - self.c * np.eye(n)
        scale = max(1.0, np.max(np.abs(lhs)), np.max(np.abs(rhs)))
        m = self.valid_block
        return float(np.max(np.abs(r[:m, :m])) / scale)


def transform_inhomogeneous_to_homogeneous(pair: RelationPair) -> RelationPair:
    """Absorb the inhomogeneity c of a relation pair into the A member.

    Given (A, B) with A@B - q*B@A = c*Id, returns (a, b) with b = B and

        a = A + c/(q-1) * B^{-1},

    which satisfies a@b - q*b@a = 0 on the same block.  Note the inverse:
    the shift must anticommute against B the same way the identity does,
    and B^{-1}@B - q*B@B^{-1} = (1-q)*Id cancels c exactly, whereas a
    plain B factor leaves a residual c*(Id - B^2) behind.

    Raises
    ------
    ValueError
        If q = 1 (the shift denominator vanishes; no such transform exists).
    numpy.linalg.LinAlgError
        If B is singular within numpy's solve tolerance.
    """
    if pair.q == 1.0:
        raise ValueError("q = 1: the transform denominator q - 1 vanishes")
    n = pair.B.shape[0]
    cond = np.linalg.cond(pair.B)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError(
            f"B is singular within tolerance (cond = {cond:.3e})"
        )
    b_inv = np.linalg.solve(pair.B, np.eye(n))
    a = pair.A + (pair.c / (pair.q - 1.0)) * b_inv
    return RelationPair(A=a, B=pair.B.copy(), q=pair.q, c=0.0,
                        valid_block=pair.valid_block)


def fock_weights(q: float, n: int) -> np.ndarray:
    """Ladder weights s_0..s_{n-1} from s_0 = 0, s_{k+1} = 1 + q*s_k.

    For q = 1 this is s_k = k, the ordinary oscillator; for q != 1 it is
    the geometric sum (q^k - 1)/(q - 1), evaluated by the recursion to
    keep the q -> 1 limit exact.
    """
    s = np.empty(n)
    s[0] = 0.0
    for k in range(1, n):
        s[k] = 1.0 + q * s[k - 1]
    return s


def build_q_fock(q: float, n: int) -> LadderPair:
    """Truncated Fock representation of a a+ - q a+ a = 1.

    The lowering matrix carries sqrt(s_k) on the first superdiagonal with
    s_0 = 0, s_{k+1} = 1 + q*s_k.  The defining relation then holds to
    machine precision on indices < n-1; the (n-1, n-1) entry is corrupted
    because the state above the truncation is missing.

    Parameters
    ----------
    q : float
        Deformation parameter, restricted to q > 0 so that the ladder
        amplitudes sqrt(s_k) stay real.
    n : int
        Fock-space dimension, at least 2.
    """
    if not (q > 0):
        raise ValueError(f"q must be positive so sqrt(s_k) is real, got {q}")
    if n < 2:
        raise ValueError(f"need dimension >= 2, got {n}")
    s = fock_weights(q, n)
    lowering = np.diag(np.sqrt(s[1:]), k=1).astype(complex)
    return LadderPair(lowering=lowering, raising=lowering.conj().T, dim=n, q=q)


def ladder_to_observables(pair: LadderPair, params: QOscillatorParams):
    """Hermitian quadratures X = L(a + a+), P = iK(a+ - a) of a ladder pair.

    Both matrices are exactly Hermitian by construction.  Raises
    ValueError when the deformation parameters of the pair and the scale
    parameters disagree.
    """
    if pair.q != params.q:
        raise ValueError(f"q mismatch: ladder pair has q={pair.q}, "
                         f"params have q={params.q}")
    a, ad = pair.lowering, pair.raising
    x = params.L * (a + ad)
    p = 1j * params.K * (ad - a)
    return x, p


def deformed_commutator_residual(x: np.ndarray, p: np.ndarray,
                                 params: QOscillatorParams,
                                 block_end: int) -> float:
    """Residual of [X,P] = i*hbar*(1 + (q-1)(X^2/4L^2 + P^2/4K^2)).

    Returns the max-norm of the identity's defect over the leading
    ``block_end`` x ``block_end`` block, relative to the largest entry of
    either side (floored at 1, same convention as
    ``LadderPair.relation_residual``).  The bound must leave out the top
    two Fock levels (block_end <= N-2): the quadratic terms reach two
    levels up, so truncation corrupts rows N-2 and N-1.
    """
    n = x.shape[0]
    if block_end > n - 2:
        raise ValueError(
            f"block_end = {block_end} exceeds N-2 = {n - 2}; "
            "truncation corrupts the top two levels"
        )
    q, hbar, L, K = params.q, params.hbar, params.L, params.K
    lhs = x @ p - p @ x
    rhs = 1j * hbar * (np.eye(n)
                       + (q - 1.0) * (x @ x / (4 * L**2) + p @ p / (4 * K**2)))
    r = lhs - rhs
    scale = max(1.0, np.max(np.abs(lhs)), np.max(np.abs(rhs)))
    return float(np.max(np.abs(r[:block_end, :block_end])) / scale)
