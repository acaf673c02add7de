"""Weierstrass elliptic machinery on rectangular lattices Z + tau*Z, tau = i*t.

The nome q = exp(i*pi*tau) = exp(-pi*t) doubles as the inner radius of the
annulus q < |z| < 1 that the slit construction lives on.  P is computed by
row-summing the lattice: each horizontal row collapses to pi^2/sin^2, and the
remaining sum over rows converges like q^(2|n|), so a 200-term cap keeps
absolute error under 1e-12 for q <= 0.9.  The theta functions use the
modular-flipped Gaussian-comb form instead of the q-series, which keeps them
cancellation-free for nearly real arguments all the way up the nome range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EllipticParams",
    "wp",
    "wp_prime",
    "theta1",
    "theta1_prime",
    "theta3",
    "theta3_prime",
    "LatticePointError",
]

MAX_ROWS = 200
TERM_STOP = 1e-16
POLE_TOL = 1e-10
Q_MAX = 0.95


class LatticePointError(ValueError):
    """P evaluated at (or too near) a lattice point."""


@dataclass
class EllipticParams:
    """Lattice data derived from the nome q in (0, 0.95]."""

    q: float
    t: float = field(init=False)
    e1: float = field(init=False)
    e2: float = field(init=False)
    e3: float = field(init=False)
    g2: float = field(init=False)
    g3: float = field(init=False)
    theta0: tuple = field(init=False)  # null values (theta_2, theta_3, theta_4)

    def __post_init__(self):
        if not (0.0 < self.q <= Q_MAX):
            raise ValueError(f"nome must satisfy 0 < q <= {Q_MAX}, got {self.q}")
        self.t = -math.log(self.q) / math.pi  # tau = i*t
        # branch values through theta null series: the identity e1+e2+e3 = 0
        # then cancels symbolically instead of between large row sums
        t2, t3, t4 = _theta_nulls(self.q)
        self.theta0 = (t2, t3, t4)
        k = math.pi ** 2 / 3.0
        self.e1 = k * (t3 ** 4 + t4 ** 4)
        self.e2 = k * (t2 ** 4 - t4 ** 4)
        self.e3 = -k * (t2 ** 4 + t3 ** 4)
        self.g2, self.g3 = _invariants(self.q)

    @property
    def tau(self):
        return 1j * self.t

    @property
    def ring_radius(self):
        """Outer radius R of the symmetric annulus K_R matching q < |z| < 1."""
        return self.q ** -0.5


def _reduce(u, t):
    """Translate u by lattice vectors into Re in [-1/2, 1/2), Im in [-t/2, t/2)."""
    u = np.asarray(u, dtype=complex)
    n = np.floor(u.imag / t + 0.5)
    u = u - 1j * t * n
    m = np.floor(u.real + 0.5)
    return u - m


def _row_sum(u, t, fn):
    """Sum fn(pi*(u + n*i*t)) over rows n, stopping on relative stagnation."""
    total = fn(math.pi * u)
    for n in range(1, MAX_ROWS + 1):
        shift = 1j * t * n
        term = fn(math.pi * (u + shift)) + fn(math.pi * (u - shift))
        total = total + term
        if np.max(np.abs(term)) < TERM_STOP * max(np.max(np.abs(total)), 1.0):
            break
    return total


def _sin_m2(w):
    s = np.sin(w)
    return 1.0 / (s * s)


def _cos_sin_m3(w):
    s = np.sin(w)
    return np.cos(w) / (s * s * s)


def _lattice_constant(t):
    # pi^2/3 + sum_{n != 0} pi^2 / sin^2(pi n i t); the sine of an imaginary
    # argument gives -sinh^2, so the row constants are negative
    total = math.pi ** 2 / 3.0
    for n in range(1, MAX_ROWS + 1):
        term = 2.0 * math.pi ** 2 / math.sinh(math.pi * n * t) ** 2
        total -= term
        if term < TERM_STOP * max(abs(total), 1.0):
            break
    return total


def wp(u, params):
    """Weierstrass P at u (scalar or ndarray) on the lattice Z + i*t*Z."""
    t = params.t
    arr = np.asarray(u, dtype=complex)
    scalar = arr.ndim == 0
    v = _reduce(arr.reshape(-1) if not scalar else arr.reshape(1), t)
    dist = np.abs(v)
    if np.any(dist < POLE_TOL):
        bad = complex(np.asarray(arr).reshape(-1)[int(np.argmin(dist))])
        raise LatticePointError(f"P evaluated within {POLE_TOL} of a lattice point (u={bad})")
    out = math.pi ** 2 * _row_sum(v, t, _sin_m2) - _lattice_constant(t)
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(u))


def wp_prime(u, params):
    """Derivative of P; same conventions and guards as wp."""
    t = params.t
    arr = np.asarray(u, dtype=complex)
    scalar = arr.ndim == 0
    v = _reduce(arr.reshape(-1) if not scalar else arr.reshape(1), t)
    dist = np.abs(v)
    if np.any(dist < POLE_TOL):
        bad = complex(np.asarray(arr).reshape(-1)[int(np.argmin(dist))])
        raise LatticePointError(f"P' evaluated within {POLE_TOL} of a lattice point (u={bad})")
    out = -2.0 * math.pi ** 3 * _row_sum(v, t, _cos_sin_m3)
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(u))


def _theta_nulls(q):
    """Theta constants theta_2, theta_3, theta_4 at argument 0, nome q.

    Product forms: every factor is positive, so the tiny theta_4 near q -> 1
    keeps full relative precision where the alternating sum would cancel to
    noise (theta_4(0.9) ~ 2e-9 while its series terms are O(1)).
    """
    n = np.arange(1, 600)
    q2n = q ** (2 * n)
    q2n = q2n[q2n > 1e-19]
    qodd = q ** (2 * n - 1)
    qodd = qodd[qodd > 1e-19]
    p0 = float(np.prod(1.0 - q2n))
    t2 = 2.0 * q ** 0.25 * p0 * float(np.prod((1.0 + q2n) ** 2))
    t3 = p0 * float(np.prod((1.0 + qodd) ** 2))
    t4 = p0 * float(np.prod((1.0 - qodd) ** 2))
    return t2, t3, t4


def _gauss_comb(v, q, half_step, deriv):
    """Theta sum in heat-kernel form: t^(-1/2) * sum_m s(m) exp(-(v - pi*m)^2 / (pi*t)).

    m runs over Z (s = 1, giving theta_3) or Z + 1/2 (s(m) = sin(pi*m),
    giving theta_1).  This is the q-series after the modular flip tau ->
    -1/tau with the square completed, so the exponents stay fused: no
    0 * inf from q'^(n^2) against sinh overflow, and -- unlike the direct
    series -- no cancellation for nearly real v as q -> 1.  Gaussians decay
    in O(sqrt(t)) lattice steps, so a handful of terms suffice at every q.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"nome must satisfy 0 < q < 1, got {q}")
    t = -math.log(q) / math.pi
    arr = np.asarray(v, dtype=complex)
    x = arr.real
    # keep every Gaussian down to 1e-18 relative to the largest (~exp(y^2/(pi t)))
    width = math.sqrt(math.pi * t * 42.0 + float(np.max(arr.imag ** 2, initial=0.0)))
    lo = math.floor((float(np.min(x, initial=0.0)) - width) / math.pi - half_step)
    hi = math.ceil((float(np.max(x, initial=0.0)) + width) / math.pi - half_step)
    total = np.zeros(arr.shape, dtype=complex)
    for n in range(lo, hi + 1):
        m = n + half_step
        sign = 1.0 if not half_step else (1.0 if n % 2 == 0 else -1.0)
        d = arr - math.pi * m
        term = np.exp(-d * d / (math.pi * t))
        if deriv:
            term = term * (-2.0 * d / (math.pi * t))
        total = total + sign * term
    return total / math.sqrt(t)


def theta1(v, q):
    """Jacobi theta_1(v, q); vectorized over complex v."""
    out = _gauss_comb(v, q, 0.5, deriv=False)
    return out if np.ndim(v) else complex(out)


def theta1_prime(v, q):
    """d/dv of theta1."""
    out = _gauss_comb(v, q, 0.5, deriv=True)
    return out if np.ndim(v) else complex(out)


def theta3(v, q):
    """Jacobi theta_3(v, q); vectorized over complex v."""
    out = _gauss_comb(v, q, 0.0, deriv=False)
    return out if np.ndim(v) else complex(out)


def theta3_prime(v, q):
    """d/dv of theta3."""
    out = _gauss_comb(v, q, 0.0, deriv=True)
    return out if np.ndim(v) else complex(out)


def _invariants(q):
    """g2, g3 from the Eisenstein series E4, E6 in p = q^2."""
    p = q * q
    k = np.arange(1, 2000)
    pk = p ** k
    mask = pk > 1e-20
    k, pk = k[mask], pk[mask]
    e4 = 1.0 + 240.0 * np.sum(k ** 3 * pk / (1.0 - pk))
    e6 = 1.0 - 504.0 * np.sum(k ** 5 * pk / (1.0 - pk))
    g2 = (4.0 * math.pi ** 4 / 3.0) * e4
    g3 = (8.0 * math.pi ** 6 / 27.0) * e6
    return float(g2), float(g3)
