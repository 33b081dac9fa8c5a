"""Survival amplitude of a Gaussian wavepacket.

For large times ``A(t) = <psi0| exp(-i t H) psi0>`` is dominated by::

    A(t) ~ <psi0| exp(-i t H0) psi0> + sum_j c_j exp(-i t E_j)
    c_j  = R_j sum_nm M_nm(E_j) q_nj p_mj

where ``R_j`` is the residue of ``1/D+`` at ``E_j`` and ``q``/``p`` are
overlaps of the free kernel with the initial state. The free term has a
closed form for a Gaussian under a constant force. The residue sum is only
meaningful once the free term has died out (``t >~ 100`` for the standard
parameters); it is evaluated wherever asked.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec, trapezoid

from .errors import QuadratureError, WindowTooShortError
from .kernel import k0, m_matrix
from .resonances import find_pair

__all__ = [
    "GaussianState",
    "SurvivalSeries",
    "qp_integrals",
    "coefficients",
    "free_term",
    "amplitude",
    "beat_envelope",
    "oscillation_metric",
    "local_minima",
    "time_grid",
]


@dataclass(frozen=True)
class GaussianState:
    """``psi0(x) = (2 pi sigma^2)^(-1/4) exp(-(x - center)^2 / (4 sigma^2))``, unit norm."""

    center: float = 0.0
    sigma: float = 0.5

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not np.isfinite(self.center):
            raise ValueError(f"center must be finite, got {self.center}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        norm = (2 * np.pi * self.sigma ** 2) ** -0.25
        return norm * np.exp(-((x - self.center) ** 2) / (4 * self.sigma ** 2))


@dataclass
class SurvivalSeries:
    times: np.ndarray
    amplitude: np.ndarray
    resonance_part: np.ndarray
    free_part: np.ndarray
    coefficients: tuple
    energies: tuple

    @property
    def omega(self):
        e1, e2 = self.energies
        return e2.real - e1.real

    @property
    def pseudo_period(self):
        return 2 * np.pi / abs(self.omega)


def qp_integrals(params, energy, state, *, half_width=12.0, rtol=1e-12):
    """Overlaps ``q_n = int K0+(x, x_n; E) psi0(x) dx`` and ``p_m = int K0+(x_m, y; E) psi0(y) dy``.

    Integrated adaptively (Gauss-Kronrod, :func:`scipy.integrate.quad_vec`) on
    ``center +- half_width * sigma`` with the kernel kinks at ``x_n`` as
    breakpoints. The default of 12 sigma is wider than the Gaussian alone
    needs: ``K0(x, x2)`` grows towards ``x2`` fast enough that an 8 sigma
    cut still leaves ~1e-7 relative error in the weights. ``psi0`` is real,
    so ``q`` and ``p`` coincide by kernel symmetry; both are computed and
    compared.

    Returns ``(q, p)``, each an array of length 2.
    """
    lo = state.center - half_width * state.sigma
    hi = state.center + half_width * state.sigma
    xs = params.positions
    points = [x for x in xs if lo < x < hi] or None

    def integrand(x):
        psi = state(x)
        return np.array(
            [
                k0(x, xs[0], energy, params) * psi,
                k0(x, xs[1], energy, params) * psi,
                k0(xs[0], x, energy, params) * psi,
                k0(xs[1], x, energy, params) * psi,
            ]
        )

    result, err, info = quad_vec(
        integrand, lo, hi, epsabs=0.0, epsrel=rtol, points=points, full_output=True, limit=500
    )
    if info.status != 0 or err > 1e3 * rtol * np.linalg.norm(result):
        raise QuadratureError(f"overlap quadrature did not converge (error estimate {err:.2e})")
    q, p = result[:2], result[2:]
    if not np.allclose(q, p, rtol=1e-9, atol=1e-15):
        raise QuadratureError(f"q and p overlaps disagree: {q} vs {p}")
    return q, p


def coefficients(params, resonances, state, **quad_kwargs):
    """Residue weights ``c_j = R_j sum_nm M_nm(E_j) q_nj p_mj`` for each resonance."""
    out = []
    for res in resonances:
        q, p = qp_integrals(params, res.energy, state, **quad_kwargs)
        m = m_matrix(params, res.energy)
        out.append(complex(res.residue * (q @ m @ p)))
    return tuple(out)


def free_term(state, F, t):
    """``<psi0| exp(-i t H0) psi0>`` for ``H0 = -d^2/dx^2 - F x``, in closed form.

    The Gaussian double integral over the constant-force propagator gives::

        (1 + i t / (2 sigma^2))^(-1/2)
            * exp(i F t c - i F^2 t^3 / 12 - F^2 sigma^2 t^2 / 2)

    with ``c`` the packet centre. Equals 1 at ``t = 0``.
    """
    t = np.asarray(t, dtype=float)
    s2 = state.sigma ** 2
    phase = 1j * F * t * state.center - 1j * F ** 2 * t ** 3 / 12 - F ** 2 * s2 * t ** 2 / 2
    value = (1 + 1j * t / (2 * s2)) ** -0.5 * np.exp(phase)
    return value[()] if value.ndim == 0 else value


def amplitude(params, state, times, resonances=None, coeffs=None):
    """Evaluate ``A(t)`` on ``times`` and keep the free and resonance parts apart."""
    times = np.asarray(times, dtype=float)
    if resonances is None:
        resonances = find_pair(params)
    if coeffs is None:
        coeffs = coefficients(params, resonances, state)
    energies = tuple(r.energy for r in resonances)
    res_part = sum(c * np.exp(-1j * times * e) for c, e in zip(coeffs, energies))
    free = np.asarray(free_term(state, params.F, times), dtype=complex)
    return SurvivalSeries(
        times=times,
        amplitude=free + res_part,
        resonance_part=res_part,
        free_part=free,
        coefficients=tuple(coeffs),
        energies=energies,
    )


def beat_envelope(resonances, coeffs, t):
    """``exp(-t |Im E1|) |c1 + c2 exp(-i omega t)|`` with ``omega = Re E2 - Re E1``."""
    e1, e2 = (complex(getattr(r, "energy", r)) for r in resonances)
    c1, c2 = coeffs
    t = np.asarray(t, dtype=float)
    omega = e2.real - e1.real
    return np.exp(-t * abs(e1.imag)) * np.abs(c1 + c2 * np.exp(-1j * omega * t))


def oscillation_metric(series, window):
    """Beating contrast of ``|A(t)|`` on ``window = (t_lo, t_hi)``.

    The mean decay rate ``r`` comes from a least-squares line through
    ``log|A|``, weighted by the sample spacing so that log-spaced grids do not
    overweight early times; the envelope-free signal ``s = |A| exp(r t)`` then gives
    ``(max s - min s) / mean s`` with the mean taken over time. A pure
    exponential scores 0.
    """
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise ValueError(f"empty window {window}")
    times = series.times
    mask = (times >= t_lo) & (times <= t_hi)
    if mask.sum() < 3:
        raise WindowTooShortError(f"fewer than 3 samples in window {window}")
    omega = abs(series.omega) if series.energies else 0.0
    if omega > 0 and (t_hi - t_lo) < 2 * (2 * np.pi / omega):
        raise WindowTooShortError(
            f"window {window} spans fewer than 2 pseudo-periods ({2 * np.pi / omega:.3g})"
        )
    t = times[mask]
    mag = np.abs(series.amplitude[mask])
    # weight by trapezoid intervals so the fit is a time average, not a sample average
    dt = np.gradient(t)
    slope, _ = np.polyfit(t, np.log(mag), 1, w=np.sqrt(dt))
    s = mag * np.exp(-slope * (t - t[0]))
    mean = trapezoid(s, t) / (t[-1] - t[0])
    return float((s.max() - s.min()) / mean)


def local_minima(times, values):
    """Times of interior local minima, refined by a parabola through each
    minimum and its two neighbours."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    idx = np.nonzero((y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:]))[0] + 1
    out = []
    for i in idx:
        x0, x1, x2 = t[i - 1], t[i], t[i + 1]
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2 ** 2 * (y0 - y1) + x1 ** 2 * (y2 - y0) + x0 ** 2 * (y1 - y2)) / denom
        out.append(-b / (2 * a) if a > 0 else x1)
    return np.array(out)


def time_grid(t_min=1e2, t_max=1e4, points=2000, spacing="log"):
    """Sample times; log spacing by default."""
    if not 0 <= t_min < t_max:
        raise ValueError(f"need 0 <= t_min < t_max, got {t_min}, {t_max}")
    if spacing == "log":
        return np.geomspace(t_min, t_max, points)
    if spacing == "linear":
        return np.linspace(t_min, t_max, points)
    raise ValueError(f"spacing must be 'log' or 'linear', got {spacing!r}")
