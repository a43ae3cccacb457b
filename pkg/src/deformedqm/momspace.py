"""Momentum-space grids and discretized operators for [x,p] = i*hbar*(1+beta*p^2).

States are wave functions psi(lambda) of the momentum eigenvalue.  The
momentum operator acts by multiplication and the position operator by

    x = i*hbar*((1 + beta*lambda^2) d/dlambda + beta*lambda),

with the inner product  <f|g> = integral over I of conj(f) g dlambda.  For
beta < 0 the natural interval is I_c = [-1/sqrt(|beta|), 1/sqrt(|beta|)]
(momentum space is bounded); for beta >= 0 it is the whole line.

Two discretization backends are provided:

* direct ``lambda`` grids: Gauss-Legendre nodes with a barycentric
  spectral differentiation matrix (or uniform nodes with 4th-order
  central differences), position assembled literally from the formula
  above and then symmetrized with respect to the weighted inner product;

* flattened ``u`` grids: the substitution u with du = dlambda/(1+beta*lambda^2)
  (artanh-based for beta < 0, arctan-based for beta > 0) turns the
  position operator into the flat derivative i*hbar*d/du acting on
  half-density components (1+beta*lambda^2)^(1/2) * psi.  The stored
  matrix acts on plain psi values, i.e. it is the flat derivative
  conjugated by the diagonal half-density factor, which is exactly
  Hermitian for the Jacobian-weighted quadrature.

The u backend is the precision workhorse; the lambda backend exists to
exercise the representation exactly as written, and the two are
cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import ModelParams
from .errors import GridMismatchError, WrongRegimeError

LAMBDA, U = "lambda", "u"
GAUSS_LEGENDRE, UNIFORM = "gauss_legendre", "uniform"

# truncation defaults; tails are below target tolerances for the smooth
# test-state families used throughout
DEFAULT_EPS = 1e-3            # edge shrink of finite intervals
DEFAULT_U_HALFWIDTH = 12.0    # in units of 1/sqrt(|beta|), beta < 0 u grids
DEFAULT_LAMBDA_HALFWIDTH = 100.0   # in units of 1/sqrt(beta), beta > 0 lambda grids
DEFAULT_FREE_HALFWIDTH = 20.0      # beta = 0 lambda grids


# ---------------------------------------------------------------------------
# coordinate flattening


@dataclass(frozen=True)
class CoordinateMap:
    """Bijection between momentum lambda and the flattening coordinate u.

    beta < 0:  u = artanh(sqrt(|beta|) lambda)/sqrt(|beta|),
               lambda in (-1/sqrt(|beta|), 1/sqrt(|beta|)) <-> u in R;
    beta > 0:  u = arctan(sqrt(beta) lambda)/sqrt(beta),
               lambda in R <-> u in (-pi/(2 sqrt(beta)), pi/(2 sqrt(beta))).

    In both regimes dlambda/du = 1 + beta*lambda^2.
    """

    beta: float

    def __post_init__(self):
        if self.beta == 0.0:
            raise ValueError("beta = 0 has no flattening map (u = lambda)")

    @property
    def sqrt_abs_beta(self) -> float:
        return math.sqrt(abs(self.beta))

    def u_of_lam(self, lam):
        r = self.sqrt_abs_beta
        if self.beta < 0:
            return np.arctanh(r * np.asarray(lam)) / r
        return np.arctan(r * np.asarray(lam)) / r

    def lam_of_u(self, u):
        r = self.sqrt_abs_beta
        if self.beta < 0:
            return np.tanh(r * np.asarray(u)) / r
        return np.tan(r * np.asarray(u)) / r

    def dlam_du(self, u):
        """Jacobian dlambda/du evaluated at u, equal to 1 + beta*lambda(u)^2."""
        lam = self.lam_of_u(u)
        return 1.0 + self.beta * np.asarray(lam) ** 2

    @property
    def u_halfwidth(self) -> float:
        """Half-length of the u interval (inf for beta < 0)."""
        if self.beta < 0:
            return math.inf
        return math.pi / (2.0 * math.sqrt(self.beta))


def flat_coordinate_map(beta: float) -> CoordinateMap:
    """Coordinate change under which x becomes the flat derivative i*hbar*d/du."""
    return CoordinateMap(beta)


# ---------------------------------------------------------------------------
# quadrature rules and differentiation matrices


def gauss_legendre_rule(n: int, lo: float, hi: float):
    """Gauss-Legendre nodes and weights on [lo, hi] (exact to degree 2n-1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid + half * x, half * w


def midpoint_rule(n: int, lo: float, hi: float):
    """Cell-centered uniform nodes; weights sum exactly to the interval length."""
    h = (hi - lo) / n
    return lo + h * (np.arange(n) + 0.5), np.full(n, h)


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Barycentric weights for polynomial interpolation on distinct nodes.

    Computed in log space to avoid over/underflow of the node-difference
    products at large N, then normalized to unit max magnitude.
    """
    x = np.asarray(nodes, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    logs = -np.sum(np.log(np.abs(diff)), axis=1)
    signs = np.prod(np.sign(diff), axis=1)
    return signs * np.exp(logs - logs.max())


def barycentric_diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """Spectral differentiation matrix on arbitrary distinct nodes.

    Differentiates the degree N-1 interpolating polynomial exactly.
    """
    x = np.asarray(nodes, dtype=float)
    b = barycentric_weights(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    d = (b[None, :] / b[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def fd4_diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """4th-order finite-difference first derivative on a uniform grid.

    Central stencils inside, one-sided 5-point stencils on the two rows at
    each end.
    """
    n = len(nodes)
    if n < 5:
        raise ValueError(f"need at least 5 uniform nodes, got {n}")
    h = nodes[1] - nodes[0]
    d = np.zeros((n, n))
    central = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    for i in range(2, n - 2):
        d[i, i - 2:i + 3] = central
    first = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    second = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12.0 * h)
    d[0, :5] = first
    d[1, :5] = second
    d[-1, -5:] = -first[::-1]
    d[-2, -5:] = -second[::-1]
    return d


def fourier_diff_matrix(n: int, length: float) -> np.ndarray:
    """Periodic spectral differentiation matrix on n equispaced nodes.

    Differentiates trigonometric interpolants exactly; for even n the
    sawtooth (Nyquist) mode lies in the kernel.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    j = np.arange(n)
    m = j[:, None] - j[None, :]
    d = np.zeros((n, n))
    off = m != 0
    if n % 2 == 0:
        d[off] = (np.pi / length) * (-1.0) ** m[off] / np.tan(np.pi * m[off] / n)
    else:
        d[off] = (np.pi / length) * (-1.0) ** m[off] / np.sin(np.pi * m[off] / n)
    return d


def differentiation_matrix(grid: "Grid") -> np.ndarray:
    """First-derivative matrix in the grid's own coordinate."""
    if grid.scheme == GAUSS_LEGENDRE:
        return barycentric_diff_matrix(grid.nodes)
    return fd4_diff_matrix(grid.nodes)


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature grid in momentum (lambda) or flattened (u) coordinates.

    ``weights`` are plain quadrature weights for the grid's own coordinate;
    the Jacobian dlambda/du needed to make u-grid sums equal
    lambda-integrals is exposed separately as ``jacobian`` and folded into
    ``measure``.  ``full_line`` marks beta < 0 lambda grids that extend
    beyond the bounded interval I_c (used only to exhibit the reducibility
    of the full-line representation).
    """

    coordinate: str
    scheme: str
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple
    beta: float
    full_line: bool = False

    def __post_init__(self):
        if self.coordinate not in (LAMBDA, U):
            raise ValueError(f"unknown coordinate {self.coordinate!r}")
        if self.scheme not in (GAUSS_LEGENDRE, UNIFORM):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly ascending")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        lo, hi = self.interval
        if nodes[0] <= lo or nodes[-1] >= hi:
            raise ValueError("nodes must lie strictly inside the interval")
        if self.beta < 0 and self.coordinate == LAMBDA and not self.full_line:
            bound = 1.0 / math.sqrt(-self.beta)
            if lo < -bound - 1e-12 or hi > bound + 1e-12:
                raise ValueError(
                    "beta < 0 lambda grids must stay inside the bounded "
                    f"momentum interval [-{bound}, {bound}]"
                )
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @cached_property
    def lam(self) -> np.ndarray:
        """Momentum eigenvalues at the nodes."""
        if self.coordinate == LAMBDA:
            return self.nodes
        out = flat_coordinate_map(self.beta).lam_of_u(self.nodes)
        out.flags.writeable = False
        return out

    @cached_property
    def jacobian(self) -> np.ndarray:
        """dlambda/du at the nodes (ones on lambda grids)."""
        if self.coordinate == LAMBDA:
            out = np.ones(self.size)
        else:
            out = 1.0 + self.beta * self.lam**2
        out.flags.writeable = False
        return out

    @cached_property
    def measure(self) -> np.ndarray:
        """Quadrature measure making node sums equal lambda-integrals."""
        out = self.weights * self.jacobian
        out.flags.writeable = False
        return out


def same_grid(a: Grid, b: Grid) -> bool:
    if a is b:
        return True
    return (a.coordinate == b.coordinate and a.scheme == b.scheme
            and a.beta == b.beta and np.array_equal(a.nodes, b.nodes)
            and np.array_equal(a.weights, b.weights))


def build_grid(params: ModelParams, n: int, coordinate: str = LAMBDA,
               scheme: str = GAUSS_LEGENDRE, truncation: float = None) -> Grid:
    """Quadrature grid for the bounded-interval (beta<0) or full-line regime.

    The meaning of ``truncation`` depends on regime and coordinate:

    * beta < 0, lambda: edge shrink eps in (0,1); the interval is
      [-(1-eps), (1-eps)] / sqrt(|beta|).  Default 1e-3.  The shrink keeps
      nodes away from the integrable (1-|beta| lambda^2)^(-1/2) edge
      singularity of the position eigenfunctions.
    * beta < 0, u: half-width U of the u interval [-U, U].
      Default 12/sqrt(|beta|).
    * beta > 0, lambda: half-width Lambda_max of [-Lambda_max, Lambda_max].
      Default 100/sqrt(beta).
    * beta > 0, u: edge shrink eps in [0,1) of the finite interval
      (-pi/(2 sqrt(beta)), pi/(2 sqrt(beta))).  Default 1e-3; eps = 0 is
      allowed (the integrands of interest are regular at these edges).
    * beta = 0: lambda only, half-width Lambda_max, default 20.
    """
    if n < 8:
        raise ValueError(f"need at least 8 nodes, got {n}")
    beta = params.beta
    if coordinate == U and beta == 0.0:
        raise ValueError("beta = 0 has no u coordinate; use lambda")
    if coordinate == LAMBDA:
        if beta < 0:
            eps = DEFAULT_EPS if truncation is None else truncation
            if not (0.0 < eps < 1.0):
                raise ValueError(f"edge shrink must be in (0,1), got {eps}")
            halfwidth = (1.0 - eps) / math.sqrt(-beta)
        elif beta > 0:
            halfwidth = (DEFAULT_LAMBDA_HALFWIDTH / math.sqrt(beta)
                         if truncation is None else truncation)
        else:
            halfwidth = (DEFAULT_FREE_HALFWIDTH if truncation is None
                         else truncation)
        if not halfwidth > 0:
            raise ValueError(f"half-width must be positive, got {halfwidth}")
    else:
        if beta < 0:
            halfwidth = (DEFAULT_U_HALFWIDTH / math.sqrt(-beta)
                         if truncation is None else truncation)
            if not halfwidth > 0:
                raise ValueError(f"half-width must be positive, got {halfwidth}")
        else:
            eps = DEFAULT_EPS if truncation is None else truncation
            if not (0.0 <= eps < 1.0):
                raise ValueError(f"edge shrink must be in [0,1), got {eps}")
            halfwidth = (1.0 - eps) * math.pi / (2.0 * math.sqrt(beta))
    rule = gauss_legendre_rule if scheme == GAUSS_LEGENDRE else midpoint_rule
    nodes, weights = rule(n, -halfwidth, halfwidth)
    pad = 2e-16 * halfwidth  # open interval: GL nodes never touch the ends
    return Grid(coordinate=coordinate, scheme=scheme, nodes=nodes,
                weights=weights, interval=(-halfwidth - pad, halfwidth + pad),
                beta=beta)


def build_full_line_grid(params: ModelParams, n: int, halfwidth: float = None,
                         scheme: str = GAUSS_LEGENDRE) -> Grid:
    """Lambda grid extending beyond I_c for the beta < 0 full-line picture.

    Only used to exhibit the step operators that commute with x and p and
    cut the full-line representation into three inequivalent parts.
    """
    if params.beta >= 0:
        raise WrongRegimeError("full-line grids are a beta < 0 construction")
    if n < 8:
        raise ValueError(f"need at least 8 nodes, got {n}")
    bound = 1.0 / math.sqrt(-params.beta)
    if halfwidth is None:
        halfwidth = 2.0 * bound
    if halfwidth <= bound:
        raise ValueError(
            f"half-width {halfwidth} must exceed the momentum bound {bound}")
    rule = gauss_legendre_rule if scheme == GAUSS_LEGENDRE else midpoint_rule
    nodes, weights = rule(n, -halfwidth, halfwidth)
    pad = 2e-16 * halfwidth
    return Grid(coordinate=LAMBDA, scheme=scheme, nodes=nodes, weights=weights,
                interval=(-halfwidth - pad, halfwidth + pad), beta=params.beta,
                full_line=True)


# ---------------------------------------------------------------------------
# wave functions and operators


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex state values psi(lambda_i) at the nodes of a grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.size,):
            raise ValueError(
                f"values shape {values.shape} does not match grid size "
                f"{self.grid.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("state values must be finite")
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return WaveFunction(self.values / n, self.grid)


def inner_product(f: WaveFunction, g: WaveFunction) -> complex:
    """<f|g> = integral of conj(f) g dlambda via the grid quadrature.

    On u grids the Jacobian dlambda/du is folded into the measure, so the
    value equals the lambda-integral in both coordinates.
    """
    if not same_grid(f.grid, g.grid):
        raise GridMismatchError("states live on different grids")
    return complex(np.sum(f.grid.measure * np.conj(f.values) * g.values))


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    """Square matrix acting on state values over a fixed grid."""

    matrix: np.ndarray
    grid: Grid
    hermitianized: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.grid.size, self.grid.size):
            raise ValueError("matrix shape does not match grid size")
        object.__setattr__(self, "matrix", m)

    def apply(self, psi: WaveFunction) -> WaveFunction:
        if not same_grid(psi.grid, self.grid):
            raise GridMismatchError("state and operator grids differ")
        return WaveFunction(self.matrix @ psi.values, self.grid)

    def weighted_adjoint(self) -> np.ndarray:
        """Adjoint with respect to the measure-weighted inner product."""
        w = self.grid.measure
        return (self.matrix.conj().T * w[None, :]) / w[:, None]

    def hermiticity_residual(self) -> float:
        """Relative max-norm distance from the weighted adjoint."""
        m = self.matrix
        scale = max(1.0, float(np.max(np.abs(m))))
        return float(np.max(np.abs(m - self.weighted_adjoint()))) / scale


def symmetrize(matrix: np.ndarray, grid: Grid) -> np.ndarray:
    """Average a matrix with its measure-weighted adjoint."""
    w = grid.measure
    adj = (matrix.conj().T * w[None, :]) / w[:, None]
    return 0.5 * (matrix + adj)


def momentum_operator(grid: Grid) -> DiscretizedOperator:
    """Multiplication by the momentum eigenvalue: diag(lambda_i)."""
    return DiscretizedOperator(np.diag(grid.lam.astype(complex)), grid,
                               hermitianized=True)


def position_operator(grid: Grid, params: ModelParams) -> DiscretizedOperator:
    """Discretized x = i*hbar*((1+beta*lambda^2) d/dlambda + beta*lambda).

    On lambda grids the formula is assembled literally and then
    symmetrized with respect to the weighted inner product (the continuum
    operator is symmetric; the raw one-sided discretization is not
    exactly so).  On u grids the operator is the flat derivative
    i*hbar*d/du conjugated by the half-density factor
    (dlambda/du)^(1/2), which keeps it exactly Hermitian for the
    Jacobian-weighted quadrature while acting on plain psi values.
    """
    if grid.size < 16:
        raise ValueError(f"need at least 16 nodes, got {grid.size}")
    if grid.beta != params.beta:
        raise GridMismatchError(
            f"grid was built for beta = {grid.beta}, params have {params.beta}")
    hbar = params.hbar
    d = differentiation_matrix(grid)
    if grid.coordinate == LAMBDA:
        lam = grid.nodes
        jac = 1.0 + grid.beta * lam**2
        raw = 1j * hbar * (jac[:, None] * d + np.diag(grid.beta * lam))
        return DiscretizedOperator(symmetrize(raw, grid), grid,
                                   hermitianized=True)
    # u grid: symmetrize the flat derivative against the plain weights,
    # then conjugate by the half-density diagonal
    w = grid.weights
    flat = 1j * hbar * d
    flat = 0.5 * (flat + (flat.conj().T * w[None, :]) / w[:, None])
    half = np.sqrt(grid.jacobian)
    mat = (flat * half[None, :]) / half[:, None]
    return DiscretizedOperator(mat, grid, hermitianized=True)


# ---------------------------------------------------------------------------
# residual checks


def _bump_family(grid: Grid):
    """Deterministic smooth test states compactly supported in the interior.

    Gaussian bumps (some phase-modulated) with widths tied to the interval
    so the family refines consistently under grid refinement.
    """
    lo, hi = grid.interval
    width = hi - lo
    t = grid.nodes
    states = []
    for frac, sigma_frac in ((0.42, 1 / 16), (0.5, 1 / 16), (0.58, 1 / 16),
                             (0.5, 1 / 24), (0.46, 1 / 20)):
        c = lo + frac * width
        sigma = sigma_frac * width
        bump = np.exp(-((t - c) ** 2) / (2 * sigma**2)).astype(complex)
        states.append(bump)
        states.append(bump * np.exp(1.5j * (t - c) / sigma))
    return states


def ccr_residual(x: DiscretizedOperator, p: DiscretizedOperator,
                 params: ModelParams, interior_margin: int = 4) -> float:
    """Defect of [x,p] = i*hbar*(1 + beta*p^2) on smooth interior states.

    Applies the commutator defect to a deterministic family of bump
    states and reports the largest entry over node indices at least
    ``interior_margin`` away from either end, normalized per state by its
    max magnitude.  Boundary rows of differentiation matrices are
    discretization artifacts and are excluded by the margin.
    """
    if not same_grid(x.grid, p.grid):
        raise GridMismatchError("operators live on different grids")
    if interior_margin < 2:
        raise ValueError("interior margin must be at least 2")
    grid = x.grid
    n = grid.size
    hbar, beta = params.hbar, params.beta
    xm, pm = x.matrix, p.matrix
    defect = (xm @ pm - pm @ xm
              - 1j * hbar * (np.eye(n) + beta * (pm @ pm)))
    sl = slice(interior_margin, n - interior_margin)
    worst = 0.0
    for psi in _bump_family(grid):
        r = defect @ psi
        worst = max(worst, float(np.max(np.abs(r[sl])) / np.max(np.abs(psi))))
    return worst


def commutant_step_operator(a_amp: complex, b_amp: complex,
                            grid: Grid) -> DiscretizedOperator:
    """Diagonal step operator commuting with both x and p away from its jumps.

    G(lambda) = a_amp * step(lambda - 1/sqrt(|beta|))
              + b_amp * step(lambda + 1/sqrt(|beta|))

    on a full-line beta < 0 grid.  G is constant except at the two steps,
    where it cuts momentum space (and with it the representation) into
    three unitarily inequivalent parts; commutators with x vanish on
    states supported away from the step points.
    """
    if grid.beta >= 0:
        raise WrongRegimeError("step operators are a beta < 0 construction")
    bound = 1.0 / math.sqrt(-grid.beta)
    lo, hi = grid.interval
    if lo >= -bound or hi <= bound:
        raise ValueError(
            f"grid interval ({lo}, {hi}) must strictly contain "
            f"[-{bound}, {bound}]")
    lam = grid.lam
    diag = (a_amp * (lam >= bound) + b_amp * (lam >= -bound)).astype(complex)
    herm = (np.imag(a_amp) == 0.0) and (np.imag(b_amp) == 0.0)
    return DiscretizedOperator(np.diag(diag), grid, hermitianized=herm)


# ---------------------------------------------------------------------------
# interpolation between grids


def interpolate(psi: WaveFunction, targets: np.ndarray) -> np.ndarray:
    """Evaluate the polynomial interpolant of a state at new points.

    Barycentric evaluation through the grid nodes; spectrally accurate on
    Gauss-Legendre grids (on uniform grids high-degree interpolation is
    ill-conditioned and this should not be used for large N).
    """
    x = psi.grid.nodes
    b = barycentric_weights(x)
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    out = np.empty(len(t), dtype=complex)
    for k, tk in enumerate(t):
        d = tk - x
        hit = np.nonzero(d == 0.0)[0]
        if hit.size:
            out[k] = psi.values[hit[0]]
            continue
        c = b / d
        out[k] = np.sum(c * psi.values) / np.sum(c)
    return out
