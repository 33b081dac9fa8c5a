"""Resonance search: zeros of the continued Krein determinant ``D+``.

Roots are polished with Newton's method (central-difference derivative) and
fall back to Muller's method when Newton stalls. The second resonance of a
pair is searched on ``D+(z) / (z - E1)`` so it cannot re-converge onto the
first one; the two roots may differ by many orders of magnitude in width,
which is why they are not searched simultaneously.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoincidentRootsError,
    ContourError,
    ConvergenceError,
    DegenerateRootError,
    StarkError,
    UpperHalfPlaneError,
)
from .kernel import d_function

__all__ = [
    "Resonance",
    "BranchTrack",
    "initial_guesses",
    "find_resonance",
    "find_pair",
    "residue",
    "count_zeros",
    "track_branches",
    "track_branches_parallel",
]

log = logging.getLogger(__name__)

NEWTON_STEP = 1e-7
ROOT_TOLERANCE = 1e-14
RESIDUAL_TOLERANCE = 1e-12
DEGENERATE_TOLERANCE = 1e-10
COINCIDENT_TOLERANCE = 1e-8
CONTINUITY_FACTOR = 50.0


@dataclass(frozen=True)
class Resonance:
    """A zero ``energy`` of ``D+`` below the real axis.

    ``residue`` is the residue of ``1/D+`` at ``energy``; ``label`` is the
    branch identity (1 or 2).
    """

    energy: complex
    residue: complex
    label: int

    def __post_init__(self):
        if self.residue == 0:
            raise DegenerateRootError("a simple pole has nonzero residue")


@dataclass
class BranchTrack:
    """Two resonance branches sampled along a field grid.

    ``energies[k, b]`` is branch ``b`` (0 for E1, 1 for E2) at ``f_grid[k]``;
    failed points hold NaN and are listed in ``broken``. ``continuity_gaps``
    lists indices ``k`` where the step from ``k - 1`` to ``k`` is an outlier.
    """

    f_grid: np.ndarray
    energies: np.ndarray
    continuity_gaps: list = field(default_factory=list)
    broken: list = field(default_factory=list)

    def branch(self, label):
        return self.energies[:, label - 1]


def initial_guesses(params, delta=1e-3):
    """Seeds at the single-well ground states, Stark-shifted, just below the axis.

    For ``x1 = 0`` these are ``-alpha1^2/4`` and ``-alpha2^2/4 - F a``.
    """
    e1 = -params.alpha1 ** 2 / 4 - params.F * params.x1
    e2 = -params.alpha2 ** 2 / 4 - params.F * params.x2
    return complex(e1, -delta), complex(e2, -delta)


def _muller(f, z0, z1, z2, tol, maxiter):
    f0, f1, f2 = f(z0), f(z1), f(z2)
    for _ in range(maxiter):
        h1, h2 = z1 - z0, z2 - z1
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = np.sqrt(b * b - 4 * f2 * a + 0j)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            raise ConvergenceError("Muller iteration hit a flat region")
        dz = -2 * f2 / den
        z0, z1, z2 = z1, z2, z2 + dz
        f0, f1, f2 = f1, f2, f(z2)
        if abs(dz) <= tol * max(1.0, abs(z2)) or f2 == 0:
            return z2
    raise ConvergenceError("Muller iteration did not converge")


def _newton(f, z, tol, maxiter):
    fz = f(z)
    best, f_best = z, abs(fz)
    failures = 0
    for it in range(maxiter):
        if fz == 0:
            return z, it
        h = NEWTON_STEP * max(1.0, abs(z))
        df = (f(z + h) - f(z - h)) / (2 * h)
        if df == 0 or not np.isfinite(df):
            break
        step = fz / df
        z = z - step
        fz = f(z)
        if abs(step) <= tol * max(1.0, abs(z)):
            return z, it + 1
        if abs(fz) < f_best:
            best, f_best = z, abs(fz)
            failures = 0
        else:
            failures += 1
            if failures >= 3:
                break
    log.debug("Newton stalled near %s; switching to Muller", best)
    h = 1e-4 * max(1.0, abs(best))
    return _muller(f, best - h, best + h, best, tol, maxiter), maxiter


def residue(params, energy, step=1e-5):
    """Residue of ``1/D+`` at a simple zero, ``1/D+'(E)``.

    The derivative uses a fourth-order central difference.
    """
    h = step * max(1.0, abs(energy))
    d = lambda z: d_function(params, z)  # noqa: E731
    dd = (-d(energy + 2 * h) + 8 * d(energy + h) - 8 * d(energy - h) + d(energy - 2 * h)) / (
        12 * h
    )
    if abs(dd) < DEGENERATE_TOLERANCE:
        raise DegenerateRootError(f"|D'(E)| = {abs(dd):.3e} at E = {energy}")
    return 1.0 / dd


def find_resonance(params, seed, *, deflate=(), label=1, tol=ROOT_TOLERANCE, maxiter=100):
    """Converge from ``seed`` to a zero of ``D+`` and return it as a :class:`Resonance`.

    ``deflate`` lists roots already found; the search runs on ``D+`` divided by
    ``(z - r)`` for each of them.
    """
    deflate = tuple(complex(r) for r in deflate)

    def f(z):
        value = d_function(params, z)
        for r in deflate:
            value = value / (z - r)
        return value

    try:
        energy, _ = _newton(f, complex(seed), tol, maxiter)
    except StarkError as exc:
        raise ConvergenceError(f"root search from {seed} failed: {exc}") from exc
    energy = complex(energy)
    if not (np.isfinite(energy.real) and np.isfinite(energy.imag)):
        raise ConvergenceError(f"root search from {seed} diverged")
    # Im E can round to ~+1e-17 when the true width underflows
    if energy.imag > 1e-13 * max(1.0, abs(energy)):
        raise UpperHalfPlaneError(f"converged to {energy} in the upper half-plane")
    res = residue(params, energy)
    scaled = abs(d_function(params, energy) * res) / max(1.0, abs(energy))
    if scaled > RESIDUAL_TOLERANCE:
        raise ConvergenceError(f"scaled residual {scaled:.2e} at {energy} above tolerance")
    return Resonance(energy=energy, residue=complex(res), label=label)


def find_pair(params, seeds=None, **kwargs):
    """The two narrow resonances ``(E1, E2)``.

    Labels follow proximity to ``seeds`` (default :func:`initial_guesses`):
    the assignment with the smaller total seed distance wins.
    """
    s1, s2 = initial_guesses(params) if seeds is None else (complex(s) for s in seeds)
    r1 = find_resonance(params, s1, **kwargs)
    r2 = find_resonance(params, s2, deflate=(r1.energy,), **kwargs)
    if abs(r1.energy - r2.energy) < COINCIDENT_TOLERANCE:
        raise CoincidentRootsError(f"roots {r1.energy} and {r2.energy} coincide")
    straight = abs(r1.energy - s1) + abs(r2.energy - s2)
    crossed = abs(r1.energy - s2) + abs(r2.energy - s1)
    if crossed < straight:
        r1, r2 = r2, r1
    return (
        Resonance(r1.energy, r1.residue, 1),
        Resonance(r2.energy, r2.residue, 2),
    )


# --- argument principle -------------------------------------------------------

def _edge_phase(f, p, q, fp, fq, depth, max_depth, zero_tol):
    m = 0.5 * (p + q)
    fm = f(m)
    if abs(fm) < zero_tol:
        raise ContourError(f"contour passes through a zero near {m}")
    d1 = np.angle(fm / fp)
    d2 = np.angle(fq / fm)
    # small phase steps alone can hide a full turn between samples; near-linear
    # behaviour relative to |f| rules that out for an analytic f
    chord = abs(fm - 0.5 * (fp + fq)) / min(abs(fp), abs(fq), abs(fm))
    if abs(d1) < np.pi / 8 and abs(d2) < np.pi / 8 and chord < 0.05:
        return d1 + d2
    if depth >= max_depth:
        raise ContourError(f"contour refinement exhausted near {m}")
    return _edge_phase(f, p, m, fp, fm, depth + 1, max_depth, zero_tol) + _edge_phase(
        f, m, q, fm, fq, depth + 1, max_depth, zero_tol
    )


def _winding(f, rect, max_depth, zero_tol, pieces=32):
    re_min, re_max, im_min, im_max = rect
    corners = [
        complex(re_min, im_min),
        complex(re_max, im_min),
        complex(re_max, im_max),
        complex(re_min, im_max),
    ]
    nodes = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        nodes.extend(a + (b - a) * np.arange(pieces) / pieces)
    nodes.append(nodes[0])
    values = [f(z) for z in nodes]
    for z, v in zip(nodes, values):
        if abs(v) < zero_tol:
            raise ContourError(f"contour node {z} is at a zero")
    total = 0.0
    for i in range(len(nodes) - 1):
        total += _edge_phase(
            f, nodes[i], nodes[i + 1], values[i], values[i + 1], 0, max_depth, zero_tol
        )
    turns = total / (2 * np.pi)
    n = round(turns)
    if abs(turns - n) > 1e-6:
        raise ContourError(f"non-integer winding {turns}")
    return int(n)


def count_zeros(params, rect, *, max_depth=60, zero_tol=1e-14, retries=5, seed=0):
    """Number of zeros of ``D+`` inside ``rect = (re_min, re_max, im_min, im_max)``.

    The winding number of ``D+`` along the boundary is accumulated on an
    adaptively bisected contour. If the contour runs through a zero the box is
    jittered outward by a tiny random amount and the count retried.
    """
    f = lambda z: d_function(params, z)  # noqa: E731
    rng = np.random.default_rng(seed)
    box = tuple(float(v) for v in rect)
    if not (box[0] < box[1] and box[2] < box[3]):
        raise ValueError(f"degenerate rectangle {rect}")
    last = None
    for _ in range(retries + 1):
        try:
            return _winding(f, box, max_depth, zero_tol)
        except ContourError as exc:
            last = exc
            scale = max(box[1] - box[0], box[3] - box[2])
            jitter = rng.uniform(1e-7, 1e-5, size=4) * scale
            box = (box[0] - jitter[0], box[1] + jitter[1], box[2] - jitter[2], box[3] + jitter[3])
            log.info("contour hit a zero; retrying with %s", box)
    raise ContourError(f"contour through zero after {retries} retries: {last}")


# --- branch tracking ----------------------------------------------------------

def _flag_gaps(f_grid, energies, factor=CONTINUITY_FACTOR):
    gaps = set()
    df = np.diff(f_grid)
    for b in range(2):
        rates = np.abs(np.diff(energies[:, b])) / df
        finite = np.isfinite(rates)
        if finite.sum() < 2:
            continue
        bound = factor * np.median(rates[finite])
        for k in np.nonzero(finite & (rates > bound))[0]:
            gaps.add(int(k) + 1)
    return sorted(gaps)


def track_branches(params_base, f_grid, seeds=None):
    """Follow both resonances along ``f_grid``, seeding each point from the last.

    Labels propagate by nearest continuation, so each branch is a smooth curve
    through avoided crossings. Solver failures leave NaN in ``energies``.
    """
    f_grid = np.asarray(f_grid, dtype=float)
    if f_grid.ndim != 1 or f_grid.size == 0:
        raise ValueError("f_grid must be a non-empty 1-d sequence")
    if np.any(f_grid <= 0) or np.any(np.diff(f_grid) <= 0):
        raise ValueError("f_grid must be positive and strictly increasing")
    energies = np.full((f_grid.size, 2), np.nan + 0j)
    broken = []
    prev = None if seeds is None else tuple(complex(s) for s in seeds)
    for k, F in enumerate(f_grid):
        params = params_base.with_field(F)
        guess = initial_guesses(params) if prev is None else prev
        try:
            r1, r2 = find_pair(params, guess)
        except StarkError as exc:
            log.warning("resonance solve failed at F=%g: %s", F, exc)
            broken.append(k)
            continue
        energies[k] = (r1.energy, r2.energy)
        prev = (r1.energy, r2.energy)
    return BranchTrack(
        f_grid=f_grid,
        energies=energies,
        continuity_gaps=_flag_gaps(f_grid, energies),
        broken=broken,
    )


def _track_chunk(args):
    params_base, grid = args
    return track_branches(params_base, grid)


def track_branches_parallel(params_base, f_grid, jobs):
    """Data-parallel :func:`track_branches`.

    The grid is split into ``jobs`` chunks, each overlapping its predecessor by
    one point. Chunks are tracked independently and stitched: where the overlap
    point shows the two labels exchanged, the whole chunk is relabelled. An
    overlap whose roots disagree is recorded as a continuity gap.
    """
    f_grid = np.asarray(f_grid, dtype=float)
    jobs = max(1, min(int(jobs), f_grid.size // 2))
    if jobs == 1:
        return track_branches(params_base, f_grid)
    bounds = np.linspace(0, f_grid.size, jobs + 1).astype(int)
    chunks = [f_grid[max(0, lo - 1):hi] for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        tracks = list(pool.map(_track_chunk, [(params_base, c) for c in chunks]))

    energies = [tracks[0].energies]
    broken = list(tracks[0].broken)
    stitch_gaps = []
    offset = tracks[0].f_grid.size
    for track in tracks[1:]:
        tail = energies[-1][-1]
        head = track.energies[0]
        e = track.energies.copy()
        straight = np.abs(head - tail).sum()
        crossed = np.abs(head[::-1] - tail).sum()
        if crossed < straight:
            e = e[:, ::-1]
        if not np.isfinite(min(straight, crossed)) or min(straight, crossed) > 1e-8:
            stitch_gaps.append(offset)
        energies.append(e[1:])
        broken.extend(offset - 1 + k for k in track.broken if k > 0)
        offset += track.f_grid.size - 1
    energies = np.concatenate(energies)
    gaps = sorted(set(_flag_gaps(f_grid, energies)) | set(stitch_gaps))
    return BranchTrack(f_grid=f_grid, energies=energies, continuity_gaps=gaps, broken=broken)


def winding_rectangle(center, half_width, half_height=None):
    """Convenience: a rectangle centred on ``center``."""
    half_height = half_width if half_height is None else half_height
    return (
        center.real - half_width,
        center.real + half_width,
        center.imag - half_height,
        center.imag + half_height,
    )
