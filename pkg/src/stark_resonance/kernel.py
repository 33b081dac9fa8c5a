"""Stark resolvent kernels for two attractive point interactions.

Hamiltonian (units with hbar = 1, 2m = 1)::

    H = -d^2/dx^2 - F x + alpha1 delta(x - x1) + alpha2 delta(x - x2)

The free kernel of ``[H0 - z]^-1`` with ``H0 = -d^2/dx^2 - F x`` is::

    K0+-(x, y; z) = pi / F^(1/3) * Ci+-(s(max(x, y))) * Ai(s(min(x, y))),
    s(x) = -(F x + z) / F^(2/3)

Ai and Ci+- are entire, so this single expression is already the analytic
continuation of the upper-half-plane resolvent to all complex z. Resonances
are found by evaluating the same formulas at Im z < 0; there is no second
Riemann sheet to manage.

With ``k[j, l] = K0(x_j, x_l; z)`` the point interactions enter through::

    D(z) = (1 + alpha1 k11)(1 + alpha2 k22) / (alpha1 alpha2) - k12 k21
    M(z) = [[1/alpha2 + k22, -k12], [-k21, 1/alpha1 + k11]]

``D`` is the determinant of ``diag(1/alpha) + k`` and ``M`` its adjugate, so
the full kernel is ``K = K0 - sum_nm K0(x, x_n) M_nm K0(x_m, y) / D``. The
minus sign is what makes ``K`` satisfy the derivative jump
``alpha_n K(x_n, y)`` at each interaction point.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import airy
from .errors import AiryRangeError, InvalidParameters, PoleError

__all__ = [
    "ModelParams",
    "k0",
    "kmatrix",
    "d_function",
    "m_matrix",
    "full_kernel",
    "POLE_TOLERANCE",
]

POLE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ModelParams:
    """Delta strengths, positions and field strength.

    ``alpha1 <= alpha2 < 0`` puts the deeper well at ``x1``; equality is
    allowed for the symmetric limit.
    """

    alpha1: float
    alpha2: float
    x1: float
    x2: float
    F: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "x1", "x2", "F"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
        if not self.alpha2 < 0:
            raise InvalidParameters(f"alpha2 must be negative, got {self.alpha2}")
        if not self.alpha1 <= self.alpha2:
            raise InvalidParameters(
                f"need alpha1 <= alpha2 < 0, got alpha1={self.alpha1}, alpha2={self.alpha2}"
            )
        if not self.x1 < self.x2:
            raise InvalidParameters(f"need x1 < x2, got x1={self.x1}, x2={self.x2}")
        if not self.F > 0:
            raise InvalidParameters(f"field strength F must be positive, got {self.F}")

    @property
    def a(self):
        """Well separation ``x2 - x1``."""
        return self.x2 - self.x1

    @property
    def alphas(self):
        return np.array([self.alpha1, self.alpha2])

    @property
    def positions(self):
        return np.array([self.x1, self.x2])

    def with_field(self, F):
        return replace(self, F=float(F))

    @classmethod
    def from_separation(cls, alpha1, alpha2, a, F, x1=0.0):
        return cls(alpha1=alpha1, alpha2=alpha2, x1=x1, x2=x1 + a, F=F)


def _scaled_argument(x, z, F):
    c2 = F ** (2.0 / 3.0)
    return -(F * np.asarray(x, dtype=float) + z) / c2


def _product(m1, e1, m2, e2, prefactor):
    exponent = np.asarray(e1 + e2)
    if np.any(exponent.real > airy.LOG_MAX):
        raise AiryRangeError("kernel value exceeds the double-precision range")
    value = prefactor * m1 * m2 * np.exp(exponent)
    return value[()] if np.ndim(value) == 0 else value


def k0(x, y, z, params, sign="+"):
    """Free Stark kernel ``K0+-(x, y; z)``; broadcasts over ``x`` and ``y``."""
    F = params.F
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    m_ci, e_ci = airy.ci_scaled(_scaled_argument(hi, z, F), sign)
    m_ai, e_ai = airy.ai_scaled(_scaled_argument(lo, z, F))
    return _product(m_ci, e_ci, m_ai, e_ai, np.pi / F ** (1.0 / 3.0))


def kmatrix(params, z, sign="+"):
    """The symmetric 2x2 matrix ``k[j, l] = K0(x_j, x_l; z)``.

    Four Airy evaluations: Ai and Ci at the two scaled positions.
    """
    s = _scaled_argument(params.positions, z, params.F)
    m_ai, e_ai = airy.ai_scaled(s)
    m_ci, e_ci = airy.ci_scaled(s, sign)
    pre = np.pi / params.F ** (1.0 / 3.0)
    k11 = _product(m_ci[0], e_ci[0], m_ai[0], e_ai[0], pre)
    k22 = _product(m_ci[1], e_ci[1], m_ai[1], e_ai[1], pre)
    # x1 < x2, so the outgoing factor sits at x2
    k12 = _product(m_ci[1], e_ci[1], m_ai[0], e_ai[0], pre)
    return np.array([[k11, k12], [k12, k22]], dtype=complex)


def _d_from_k(params, k):
    a1, a2 = params.alpha1, params.alpha2
    return (1 + a1 * k[0, 0]) * (1 + a2 * k[1, 1]) / (a1 * a2) - k[0, 1] * k[1, 0]


def _m_from_k(params, k):
    return np.array(
        [
            [1 / params.alpha2 + k[1, 1], -k[0, 1]],
            [-k[1, 0], 1 / params.alpha1 + k[0, 0]],
        ],
        dtype=complex,
    )


def d_function(params, z, sign="+"):
    """Krein determinant ``D+-(z)``; resonances are the zeros of ``D+`` with Im z < 0."""
    return complex(_d_from_k(params, kmatrix(params, z, sign)))


def m_matrix(params, z, sign="+"):
    return _m_from_k(params, kmatrix(params, z, sign))


def full_kernel(x, y, params, z, sign="+", pole_tolerance=POLE_TOLERANCE):
    """Resolvent kernel of the full Hamiltonian, ``K0 - R / D``.

    Raises :class:`PoleError` when ``|D(z)|`` is below ``pole_tolerance``,
    which means ``z`` is numerically a resonance (or bound state).
    """
    k = kmatrix(params, z, sign)
    d = _d_from_k(params, k)
    if abs(d) < pole_tolerance:
        raise PoleError(f"|D(z)| = {abs(d):.3e} at z = {z}: z is at a pole")
    m = _m_from_k(params, k)
    left = [k0(x, xn, z, params, sign) for xn in params.positions]
    right = [k0(xm, y, z, params, sign) for xm in params.positions]
    correction = sum(left[n] * m[n, j] * right[j] for n in range(2) for j in range(2))
    return k0(x, y, z, params, sign) - correction / d
