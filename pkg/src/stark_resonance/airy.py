"""Airy functions of complex argument.

Ai, Bi and their derivatives are entire, so no branch bookkeeping is needed
by callers. Values come from the AMOS routines wrapped by
:func:`scipy.special.airy`; this module adds

* canonicalisation of signed zeros (AMOS returns the value on the far side of
  the negative real axis when the imaginary part is ``-0.0``),
* an explicit overflow guard raising :class:`AiryRangeError` instead of
  returning ``inf``/``nan``,
* the outgoing combinations ``Ci+-(z) = Bi(z) +- i Ai(z)`` evaluated through
  the rotation identity ``Ci+-(z) = 2 exp(+-i pi/6) Ai(z exp(+-2 pi i/3))``, a
  single Ai evaluation with no cancellation between Bi and i Ai,
* exponentially scaled forms ``(mantissa, exponent)`` used by the resolvent
  kernel when arguments are far outside the double-precision range.

All functions accept scalars or numpy arrays and are pure.
"""

import numpy as np
from scipy import special

from .errors import AiryRangeError

__all__ = [
    "airy_ai",
    "airy_ai_prime",
    "airy_bi",
    "airy_bi_prime",
    "airy_all",
    "ci",
    "ci_prime",
    "ai_scaled",
    "ci_scaled",
    "zeta",
    "LOG_MAX",
]

LOG_MAX = float(np.log(np.finfo(float).max))
# headroom for the algebraic prefactors z**(+-1/4)
_MARGIN = 4.0

_ROTATION = {+1: np.exp(2j * np.pi / 3), -1: np.exp(-2j * np.pi / 3)}
_PHASE = {+1: 2.0 * np.exp(1j * np.pi / 6), -1: 2.0 * np.exp(-1j * np.pi / 6)}


def sign_of(sign):
    """Normalise ``'+'``/``'-'``/``+1``/``-1`` to ``+1`` or ``-1``."""
    if sign in ("+", 1, +1.0):
        return +1
    if sign in ("-", -1, -1.0):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _as_complex(z):
    # adding +0j turns a -0.0 imaginary part into +0.0
    return np.asarray(z, dtype=complex) + 0j


def _unwrap(values):
    return values[()] if values.ndim == 0 else values


def zeta(z):
    """Principal ``(2/3) z**(3/2)``, the exponent of the Airy asymptotics."""
    z = _as_complex(z)
    return _unwrap(2.0 / 3.0 * z ** 1.5)


def _guard(z, which):
    re_zeta = np.real(zeta(z))
    if which == "ai":
        exponent = -re_zeta
    else:
        exponent = np.abs(re_zeta)
    if np.any(exponent > LOG_MAX - _MARGIN):
        worst = np.max(exponent)
        raise AiryRangeError(
            f"Airy {which} exponent {worst:.1f} exceeds the double-precision range"
        )


def airy_all(z):
    """Return ``(Ai, Ai', Bi, Bi')`` at ``z``."""
    z = _as_complex(z)
    _guard(z, "ai")
    _guard(z, "bi")
    values = special.airy(z)
    for v in values:
        if not np.all(np.isfinite(v)):
            raise AiryRangeError("Airy evaluation returned a non-finite value")
    return tuple(_unwrap(np.asarray(v)) for v in values)


def _one(z, index, which):
    z = _as_complex(z)
    _guard(z, which)
    value = np.asarray(special.airy(z)[index])
    if not np.all(np.isfinite(value)):
        raise AiryRangeError("Airy evaluation returned a non-finite value")
    return _unwrap(value)


def airy_ai(z):
    """Ai(z) for complex z.

    >>> round(float(airy_ai(0).real), 10)
    0.3550280539
    """
    return _one(z, 0, "ai")


def airy_ai_prime(z):
    return _one(z, 1, "ai")


def airy_bi(z):
    return _one(z, 2, "bi")


def airy_bi_prime(z):
    return _one(z, 3, "bi")


def ci(z, sign="+"):
    """``Bi(z) + i Ai(z)`` for ``sign='+'``, ``Bi(z) - i Ai(z)`` for ``'-'``."""
    s = sign_of(sign)
    w = _as_complex(z) * _ROTATION[s]
    return _PHASE[s] * airy_ai(w)


def ci_prime(z, sign="+"):
    s = sign_of(sign)
    w = _as_complex(z) * _ROTATION[s]
    return _PHASE[s] * _ROTATION[s] * airy_ai_prime(w)


def ai_scaled(z):
    """Return ``(m, e)`` with ``Ai(z) = m * exp(e)``.

    ``m`` stays of order ``|z|**(-1/4)`` everywhere, so products of Airy
    values can be formed in log space without intermediate overflow.
    """
    z = _as_complex(z)
    m = np.asarray(special.airye(z)[0])
    e = -np.asarray(zeta(z))
    return _unwrap(m), _unwrap(e)


def ci_scaled(z, sign="+"):
    """Return ``(m, e)`` with ``Ci+-(z) = m * exp(e)``.

    The exponent is ``+-zeta(z)`` chosen by whether the rotated argument
    wrapped across the negative real axis, so that for ``Ci(z) * Ai(z)`` the
    two exponents cancel exactly rather than to rounding.
    """
    s = sign_of(sign)
    z = _as_complex(z)
    w = z * _ROTATION[s] + 0j
    m = _PHASE[s] * np.asarray(special.airye(w)[0])
    theta, theta_w = np.angle(z), np.angle(w)
    wrapped = theta_w < theta if s > 0 else theta_w > theta
    zeta_z = np.asarray(zeta(z))
    zeta_w = np.where(wrapped, zeta_z, -zeta_z)
    return _unwrap(m), _unwrap(-zeta_w)
