"""Discrete Gaussian orthogonal polynomial engine.

Monic polynomials orthogonal under w(x) = exp(-n pi^2 a x^2 / 2) summed over
the shifted lattice {(k - alpha)/n} with measure prefactor 1/n.  Everything
is carried in the weight-folded orthonormal form

    phi_k(x) = P_k(x) sqrt(w(x)/n) / sqrt(h_k),

so stored values stay O(1) at any degree; squared norms live in log domain
only.  The recurrence x phi_k = sqrt(B_{k+1}) phi_{k+1} + A_k phi_k
+ sqrt(B_k) phi_{k-1} yields A_k, B_k and log h_k = log h_{k-1} + log B_k.

Truncation windows start from the mass balance
X0 = (1/pi) sqrt(2 (k_max + ln(1/tail_tol)) / (n a)) and are certified by
doubling until every log h_k moves by less than 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CoverageError, PrecisionError, WindowError

DEFAULT_TAIL_TOL = 1e-30
_WINDOW_STABLE_TOL = 1e-12
_MAX_DOUBLINGS = 24


@dataclass(frozen=True)
class LatticeSpec:
    """Shifted regular lattice of mesh 1/n: nodes (k - alpha)/n, k integer."""

    n: int
    alpha: float = 0.0
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("lattice mesh parameter n must be >= 1")
        if not -0.5 <= self.alpha <= 0.5:
            raise ValueError("alpha must lie in [-1/2, 1/2]")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError("tail_tol must lie in (0, 1)")

    def nodes_in(self, half_width: float) -> np.ndarray:
        k = np.arange(math.floor(-half_width * self.n + self.alpha),
                      math.ceil(half_width * self.n + self.alpha) + 1)
        x = (k - self.alpha) / self.n
        return x[np.abs(x) <= half_width]


@dataclass(frozen=True)
class GaussianWeight:
    """w(x) = exp(-n pi^2 a x^2 / 2) with a > 0."""

    a: float
    n: int

    def __post_init__(self):
        if self.a <= 0.0:
            raise ValueError("weight parameter a must be positive")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.exp(-self.n * math.pi**2 * self.a * x * x / 2.0)


@dataclass
class OrthoSystem:
    """Recurrence data for one (n, alpha, a) family up to degree k_max.

    ``phi`` holds the orthonormal weight-folded values, one row per degree,
    on the retained nodes; these are exactly the psi-functions entering the
    Christoffel-Darboux kernel.
    """

    spec: LatticeSpec
    weight: GaussianWeight
    k_max: int
    log_h: np.ndarray
    A: np.ndarray
    B: np.ndarray
    nodes: np.ndarray
    node_weights: np.ndarray
    phi: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def alpha(self) -> float:
        return self.spec.alpha

    @property
    def a(self) -> float:
        return self.weight.a

    @property
    def span(self) -> float:
        return float(self.nodes[-1] - self.nodes[0])

    def node_index(self, x: float) -> int:
        i = int(np.argmin(np.abs(self.nodes - x)))
        if abs(self.nodes[i] - x) > 1e-9 / self.n:
            raise CoverageError(f"x={x} is not a retained node")
        return i


def stieltjes(nodes: np.ndarray, node_weights: np.ndarray, k_max: int,
              keep_phi: bool = True):
    """Discrete Stieltjes procedure in orthonormal weight-folded form.

    Returns (A, B, log_h, phi).  B_0 is stored as 0 by convention.  A loss
    of positivity in any computed B_k means double precision is exhausted
    for this family (saturation regime); the extended mode exists for that.
    """
    m = len(nodes)
    if k_max >= m:
        raise WindowError(f"degree {k_max} unreachable with {m} nodes")
    A = np.zeros(k_max + 1)
    B = np.zeros(k_max + 1)
    log_h = np.zeros(k_max + 1)
    phi = np.zeros((k_max + 1, m)) if keep_phi else None

    raw = np.sqrt(node_weights)
    h0 = float(raw @ raw)
    log_h[0] = math.log(h0)
    cur = raw / math.sqrt(h0)
    prev = np.zeros(m)
    A[0] = float(nodes @ (cur * cur))
    if keep_phi:
        phi[0] = cur
    sqrt_b_prev = 0.0
    for k in range(1, k_max + 1):
        u = (nodes - A[k - 1]) * cur - sqrt_b_prev * prev
        bk = float(u @ u)
        if not bk > 0.0:
            raise PrecisionError(
                f"B_{k} lost positivity; enable the extended-precision mode")
        B[k] = bk
        log_h[k] = log_h[k - 1] + math.log(bk)
        prev = cur
        sqrt_b_prev = math.sqrt(bk)
        cur = u / sqrt_b_prev
        A[k] = float(nodes @ (cur * cur))
        if keep_phi:
            phi[k] = cur
    return A, B, log_h, phi


def build_lattice(spec: LatticeSpec, weight: GaussianWeight, k_max: int,
                  half_width: float | None = None):
    """Retained nodes and measure-folded weights w(x)/n on a certified window.

    With ``half_width`` given, the adaptive search is skipped (used when
    several a-values must share one truncation, e.g. Toda differencing).
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    n = spec.n
    if half_width is not None:
        x = spec.nodes_in(half_width)
        if len(x) < k_max + 10:
            raise WindowError(f"only {len(x)} nodes at fixed width {half_width}")
        return x, weight(x) / n

    X = (1.0 / math.pi) * math.sqrt(
        2.0 * (k_max + math.log(1.0 / spec.tail_tol)) / (n * weight.a))
    x = spec.nodes_in(X)
    doublings = 0
    while len(x) < k_max + 10:
        if doublings >= _MAX_DOUBLINGS:
            raise WindowError(f"node count {len(x)} < {k_max + 10} at window cap")
        X *= 2.0
        x = spec.nodes_in(X)
        doublings += 1
    log_h = stieltjes(x, weight(x) / n, k_max, keep_phi=False)[2]
    while doublings < _MAX_DOUBLINGS:
        x2 = spec.nodes_in(2.0 * X)
        log_h2 = stieltjes(x2, weight(x2) / n, k_max, keep_phi=False)[2]
        if np.max(np.abs(log_h - log_h2)) < _WINDOW_STABLE_TOL:
            return x, weight(x) / n
        X *= 2.0
        x, log_h = x2, log_h2
        doublings += 1
    raise WindowError("window doubling cap exceeded without log_h stability")


def build_system(n: int, alpha: float, a: float, k_max: int,
                 tail_tol: float = DEFAULT_TAIL_TOL,
                 half_width: float | None = None,
                 precision: str = "standard") -> OrthoSystem:
    """Construct an OrthoSystem; results for default windows are memoized."""
    if half_width is None and precision == "standard":
        return _build_cached(n, alpha, a, k_max, tail_tol)
    return _build(n, alpha, a, k_max, tail_tol, half_width, precision)


@lru_cache(maxsize=128)
def _build_cached(n, alpha, a, k_max, tail_tol):
    return _build(n, alpha, a, k_max, tail_tol, None, "standard")


def _build(n, alpha, a, k_max, tail_tol, half_width, precision):
    spec = LatticeSpec(n=n, alpha=alpha, tail_tol=tail_tol)
    weight = GaussianWeight(a=a, n=n)
    nodes, node_weights = build_lattice(spec, weight, k_max, half_width)
    if precision == "standard":
        A, B, log_h, phi = stieltjes(nodes, node_weights, k_max)
    elif precision == "extended":
        A, B, log_h = _stieltjes_extended(nodes, n, alpha, a, k_max)
        phi = stieltjes(nodes, node_weights, k_max)[3]
    else:
        raise ValueError("precision must be 'standard' or 'extended'")
    return OrthoSystem(spec=spec, weight=weight, k_max=k_max, log_h=log_h,
                       A=A, B=B, nodes=nodes, node_weights=node_weights,
                       phi=phi)


def _stieltjes_extended(nodes, n, alpha, a, k_max, prec_bits: int = 120):
    """Software-float Stieltjes (>= 113-bit significand) for a ~ 1 saturation.

    Same recurrence as the double path; node weights are re-evaluated in
    extended precision from (n, a) rather than converted.
    """
    from mpmath import mp, mpf

    with mp.workprec(prec_bits):
        x = [mpf(float(v)) for v in nodes]
        coef = mpf(n) * mp.pi**2 * mpf(repr(a)) / 2
        w = [mp.exp(-coef * xi * xi) / n for xi in x]
        m = len(x)
        A = [mp.zero] * (k_max + 1)
        B = [mp.zero] * (k_max + 1)
        log_h = [mp.zero] * (k_max + 1)
        raw = [mp.sqrt(wi) for wi in w]
        h0 = mp.fsum(r * r for r in raw)
        log_h[0] = mp.log(h0)
        root = mp.sqrt(h0)
        cur = [r / root for r in raw]
        prev = [mp.zero] * m
        A[0] = mp.fsum(xi * c * c for xi, c in zip(x, cur))
        sqrt_b_prev = mp.zero
        for k in range(1, k_max + 1):
            u = [(xi - A[k - 1]) * c - sqrt_b_prev * p
                 for xi, c, p in zip(x, cur, prev)]
            bk = mp.fsum(ui * ui for ui in u)
            if bk <= 0:
                raise PrecisionError(f"B_{k} nonpositive even at {prec_bits} bits")
            B[k] = bk
            log_h[k] = log_h[k - 1] + mp.log(bk)
            prev = cur
            sqrt_b_prev = mp.sqrt(bk)
            cur = [ui / sqrt_b_prev for ui in u]
            A[k] = mp.fsum(xi * c * c for xi, c in zip(x, cur))
        return (np.array([float(v) for v in A]),
                np.array([float(v) for v in B]),
                np.array([float(v) for v in log_h]))


def rescale_check(system: OrthoSystem, direction: int) -> float:
    """Max defect of the lattice rescaling identities against a companion.

    h_{n,j}(a) = xi^{2j+1} h_{n+-1,j}(a xi) is checked relatively;
    A_{n,j}(a) = xi A_{n+-1,j}(a xi) is checked on the lattice-span scale
    (A vanishes identically on symmetric lattices, so a relative defect
    would be 0/0 there).
    """
    if direction not in (+1, -1):
        raise ValueError("direction must be +1 or -1")
    n = system.n
    xi = 1.0 + direction / n
    companion = build_system(n + direction, system.alpha, system.a * xi,
                             system.k_max, system.spec.tail_tol)
    j = np.arange(system.k_max + 1)
    h_defect = np.abs(np.expm1(system.log_h - companion.log_h
                               - (2 * j + 1) * math.log(xi)))
    a_defect = np.abs(system.A - xi * companion.A) / system.span
    return float(max(h_defect.max(), a_defect.max()))


def partition_and_free_energy(n: int, alpha: float, a: float,
                              tail_tol: float = DEFAULT_TAIL_TOL,
                              half_width: float | None = None):
    """log Z = log n! + sum_{k<n} log h_k and F = -log Z / n^2."""
    system = build_system(n, alpha, a, n - 1, tail_tol, half_width)
    log_z = math.lgamma(n + 1) + float(np.sum(system.log_h[:n]))
    return log_z, -log_z / n**2


def gue_free_energy(n: int) -> float:
    """GUE free energy from monic Hermite norms sqrt(pi) k! 2^{-k}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    log_z = math.lgamma(n + 1) + sum(
        0.5 * math.log(math.pi) + math.lgamma(k + 1) - k * math.log(2.0)
        for k in range(n))
    return -log_z / n**2


def cd_kernel(system: OrthoSystem, x: float, y: float, n_particles: int) -> float:
    """Christoffel-Darboux kernel K(x, y) = sum_{k<n} phi_k(x) phi_k(y)."""
    if n_particles > system.k_max + 1:
        raise ValueError("n_particles exceeds computed degrees")
    i = system.node_index(x)
    j = system.node_index(y)
    return float(system.phi[:n_particles, i] @ system.phi[:n_particles, j])


def cd_kernel_matrix(system: OrthoSystem, n_particles: int) -> np.ndarray:
    """Full kernel matrix on the retained nodes (rank-n_particles projection)."""
    if n_particles > system.k_max + 1:
        raise ValueError("n_particles exceeds computed degrees")
    phi = system.phi[:n_particles]
    return phi.T @ phi


def correlation_det(system: OrthoSystem, points, n_particles: int) -> float:
    """m-point correlation function det[K(x_i, x_j)]."""
    m = len(points)
    K = np.empty((m, m))
    idx = [system.node_index(p) for p in points]
    for r, i in enumerate(idx):
        for c, j in enumerate(idx):
            K[r, c] = system.phi[:n_particles, i] @ system.phi[:n_particles, j]
    return float(np.linalg.det(K))


def toda_residual(n: int, alpha: float, a: float, delta_a: float,
                  tail_tol: float = DEFAULT_TAIL_TOL):
    """Second a-difference of log Z against the recurrence-coefficient form.

    Returns (lhs, rhs, defect) with rhs = (n pi^2 / 2)^2 B_n (B_{n-1}
    + B_{n+1} + (A_n + A_{n-1})^2).  All three partition evaluations share
    the truncation window certified at the smallest a, so the identity is
    exact per measure and the defect is pure O(delta_a^2) differencing bias.
    """
    if a - delta_a <= 0.0:
        raise ValueError("a - delta_a must stay positive")
    spec = LatticeSpec(n=n, alpha=alpha, tail_tol=tail_tol)
    wmin = GaussianWeight(a=a - delta_a, n=n)
    nodes, _ = build_lattice(spec, wmin, n + 1)
    width = float(np.max(np.abs(nodes))) + 1e-9
    lz = [partition_and_free_energy(n, alpha, av, tail_tol, half_width=width)[0]
          for av in (a - delta_a, a, a + delta_a)]
    lhs = (lz[2] - 2.0 * lz[1] + lz[0]) / delta_a**2
    system = build_system(n, alpha, a, n + 1, tail_tol, half_width=width)
    A, B = system.A, system.B
    rhs = (n * math.pi**2 / 2.0)**2 * B[n] * (
        B[n - 1] + B[n + 1] + (A[n] + A[n - 1])**2)
    return lhs, rhs, abs(lhs - rhs)
