"""Crossing type, Agmon barrier lengths and the critical field.

Two resonance branches either cross exactly in their imaginary parts while
the real parts avoid each other (type I), or the other way round (type II).
Semiclassically the type is fixed by comparing the inner barrier length with
twice the outer one, which for the delta model reduces to comparing
``alpha1/alpha2`` with the cube root of 3. Only type I produces a field
``F_C`` at which both resonances have the same width.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import (
    InconclusiveError,
    InvalidParameters,
    NoBarrierError,
    NoSignChangeError,
)
from .resonances import BranchTrack, find_pair, track_branches

__all__ = [
    "CrossingType",
    "CrossingReport",
    "SemiclassicalVerdict",
    "agmon_lengths",
    "semiclassical_fc",
    "classify_semiclassical",
    "classify_numeric",
    "critical_field",
    "continued_pair",
    "semiclassical_report",
    "THRESHOLD_RATIO",
]

log = logging.getLogger(__name__)

THRESHOLD_RATIO = 3.0 ** (1.0 / 3.0)
THRESHOLD_BAND = 0.02


class CrossingType(str, enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"

    def __str__(self):
        return self.value


class SemiclassicalVerdict(NamedTuple):
    crossing_type: CrossingType
    ratio: float
    near_threshold: bool
    rho_inner: float
    rho_outer: float


@dataclass
class CrossingReport:
    crossing_type: CrossingType
    f_critical: Optional[float]
    e_common: Optional[tuple]
    rho_inner: float
    rho_outer: float
    semiclassical_fc: float
    method: str
    track: Optional[BranchTrack] = field(default=None, repr=False)


def agmon_lengths(params, E):
    """Agmon lengths ``(rho_inner, rho_outer)`` of the linear barriers at energy ``E``.

    Between and beyond the deltas the potential is ``-F x``; the inner barrier
    spans ``[x1, x2]`` and the outer one ``[x2, -E/F]``::

        rho_inner = 2/(3F) [(-E - F x1)^(3/2) - (-E - F x2)^(3/2)]
        rho_outer = 2/(3F) (-E - F x2)^(3/2)
    """
    E = float(np.real(E))
    F = params.F
    outer = -E - F * params.x2
    if outer < 0:
        raise NoBarrierError(f"no outer barrier: E={E} >= -F x2 = {-F * params.x2}")
    inner = -E - F * params.x1
    rho_outer = 2.0 / (3.0 * F) * outer ** 1.5
    rho_inner = 2.0 / (3.0 * F) * (inner ** 1.5 - outer ** 1.5)
    return rho_inner, rho_outer


def semiclassical_fc(params):
    """``(alpha1^2 - alpha2^2) / (4 a)``: the field aligning the two well levels."""
    fc = (params.alpha1 ** 2 - params.alpha2 ** 2) / (4.0 * params.a)
    if fc < 0:
        raise InvalidParameters("the deeper well must sit at x1 (|alpha1| >= |alpha2|)")
    return fc


def classify_semiclassical(params):
    """Type from the ratio rule ``alpha1/alpha2 < 3^(1/3)``.

    ``near_threshold`` is set within 2% of the threshold, where the
    asymptotic rule should defer to :func:`classify_numeric`. The Agmon lengths
    are evaluated at the semiclassical crossing (``E = -alpha1^2/4`` and
    ``F = F_C``); they are NaN for equal wells where no crossing field exists.
    """
    ratio = params.alpha1 / params.alpha2
    kind = CrossingType.TYPE_I if ratio < THRESHOLD_RATIO else CrossingType.TYPE_II
    near = abs(ratio / THRESHOLD_RATIO - 1.0) <= THRESHOLD_BAND
    fc = semiclassical_fc(params)
    if fc > 0:
        rho_i, rho_e = agmon_lengths(params.with_field(fc), -params.alpha1 ** 2 / 4)
    else:
        rho_i = rho_e = float("nan")
    return SemiclassicalVerdict(kind, ratio, near, rho_i, rho_e)


def _sign_changes(values):
    values = values[np.isfinite(values)]
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def classify_numeric(track):
    """Type I if ``Im E1 - Im E2`` changes sign along the track and
    ``Re E1 - Re E2`` does not; type II for the converse."""
    diff = track.energies[:, 0] - track.energies[:, 1]
    im_changes = _sign_changes(diff.imag)
    re_changes = _sign_changes(diff.real)
    if im_changes and not re_changes:
        return CrossingType.TYPE_I
    if re_changes and not im_changes:
        return CrossingType.TYPE_II
    raise InconclusiveError(
        f"sign changes: Im {im_changes}, Re {re_changes}; "
        "widen or refine the sweep so it spans exactly one crossing"
    )


def _interp_seeds(track, k, F):
    f0, f1 = track.f_grid[k], track.f_grid[k + 1]
    w = (F - f0) / (f1 - f0)
    e = (1 - w) * track.energies[k] + w * track.energies[k + 1]
    return complex(e[0]), complex(e[1])


def critical_field(params, bracket, *, n_grid=9, xtol=1e-12):
    """Locate ``F_C`` where ``Im E1(F) = Im E2(F)`` inside ``bracket``.

    Branches are first tracked on a coarse grid to fix the labels; the sign
    change of ``g(F) = Im E1 - Im E2`` is then refined with Brent's method
    (secant/inverse-quadratic steps with a bisection safeguard). Each trial
    field is seeded by interpolating the tracked branches, so labels cannot
    swap during the refinement.
    """
    lo, hi = (float(b) for b in bracket)
    if not 0 < lo < hi:
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    track = track_branches(params, np.linspace(lo, hi, n_grid))
    g = track.energies[:, 0].imag - track.energies[:, 1].imag
    ks = [
        k
        for k in range(n_grid - 1)
        if np.isfinite(g[k]) and np.isfinite(g[k + 1]) and g[k] * g[k + 1] <= 0
    ]
    if not ks:
        raise NoSignChangeError(
            f"Im E1 - Im E2 keeps its sign on [{lo}, {hi}]: not a type I crossing there"
        )
    k = ks[0]

    def pair(F):
        return find_pair(params.with_field(F), _interp_seeds(track, k, F))

    def gap(F):
        r1, r2 = pair(F)
        return r1.energy.imag - r2.energy.imag

    f_c = brentq(gap, track.f_grid[k], track.f_grid[k + 1], xtol=xtol, rtol=1e-15)
    r1, r2 = pair(f_c)
    log.info("F_C = %.10f, E1 = %s, E2 = %s", f_c, r1.energy, r2.energy)
    rho_i, rho_e = agmon_lengths(params.with_field(f_c), r1.energy.real)
    return CrossingReport(
        crossing_type=CrossingType.TYPE_I,
        f_critical=f_c,
        e_common=(r1, r2),
        rho_inner=rho_i,
        rho_outer=rho_e,
        semiclassical_fc=semiclassical_fc(params),
        method="numeric",
        track=track,
    )


def continued_pair(params, f_start=None, n_steps=12):
    """Resonances at ``params.F`` labelled by continuation from ``f_start``.

    :func:`find_pair` labels roots by closeness to the single-well seeds, which
    past a type I crossing names the branches the other way round from the
    smooth curves. Tracking from a weak field (default half the semiclassical
    ``F_C``) keeps ``E1`` on the branch that starts as the deep-well level.
    """
    if f_start is None:
        fc = semiclassical_fc(params)
        f_start = 0.5 * fc if fc > 0 else 0.5 * params.F
    f_start = min(f_start, params.F)
    if f_start == params.F:
        return find_pair(params)
    track = track_branches(params, np.linspace(f_start, params.F, n_steps + 1))
    last = track.energies[-1]
    if not np.all(np.isfinite(last)):
        raise InconclusiveError("branch tracking failed before reaching the target field")
    r1, r2 = find_pair(params, (last[0], last[1]))
    return r1, r2


def semiclassical_report(params):
    """A :class:`CrossingReport` built from the asymptotic rules only."""
    verdict = classify_semiclassical(params)
    return CrossingReport(
        crossing_type=verdict.crossing_type,
        f_critical=None,
        e_common=None,
        rho_inner=verdict.rho_inner,
        rho_outer=verdict.rho_outer,
        semiclassical_fc=semiclassical_fc(params),
        method="semiclassical",
    )
