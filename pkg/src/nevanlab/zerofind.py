"""Zeros of exponential-polynomial sums inside disks, with multiplicities.

Strategy: winding number of the boundary circle by phase-increment
accumulation (step control: every wrapped increment below pi/2), then a
quadtree over the bounding square.  Boxes of winding one are polished by
Newton; boxes of winding >= 2 shrink until either the zeros separate or
the box width passes the cluster scale, at which point the location is
polished on a higher derivative and the multiplicity is assigned by
derivative probing.  The final divisor is checked against the circle
winding number exactly.

Zeros on or near a contour are handled by perturbation: the disk radius
grows by up to a factor 1+1e-3 (in eight sub-steps), and individual boxes
inflate by irrational-ish factors so symmetric configurations cannot pin
a zero to a boundary twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import ExpPolySum

MAX_CONTOUR_NODES = 1 << 16
MAX_STEP = np.pi / 2
RADIUS_GROWTH = (1 + 1e-3) ** (1 / 8)  # eight retries stay within r*(1+1e-3)
NEWTON_MAX_ITER = 60
NEWTON_TOL = 1e-12
CLUSTER_WIDTH = 1e-7
MULTIPLICITY_CAP = 12
PROBE_REL_TOL = 1e-8
CONTOUR_CLEARANCE = 1e-6
MERGE_DISTANCE = 1e-8


class ZeroFindError(RuntimeError):
    """Diagnostic failure of the zero search (never a silent wrong answer)."""


class WindingInconsistency(ZeroFindError):
    """Sum of found multiplicities disagrees with the boundary winding."""


class MultiplicityCapExceeded(ZeroFindError):
    """A zero's multiplicity exceeds the derivative probe cap."""


class _ContourFailure(Exception):
    """Phase step control failed: a zero sits (numerically) on the contour."""


@dataclass(frozen=True)
class DivisorOnC:
    """Finite divisor on C: (location, multiplicity) pairs.

    Locations are pairwise distinct (separation > 1e-8) and sorted by
    (real, imaginary) parts, so equal inputs give byte-equal outputs.
    """

    points: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        pts = sorted(self.points, key=lambda t: (t[0].real, t[0].imag))
        object.__setattr__(self, "points", tuple((complex(a), int(m)) for a, m in pts))
        for _, m in self.points:
            if m < 1:
                raise ValueError("multiplicities must be >= 1")
        for (a, _), (b, _) in zip(self.points, self.points[1:]):
            if abs(a - b) <= MERGE_DISTANCE:
                raise ValueError(f"divisor points {a} and {b} too close")

    @property
    def total_degree(self) -> int:
        return sum(m for _, m in self.points)


def exp_phase_rate(h: ExpPolySum, radius: float) -> float:
    """Upper bound on |d/ds Im q_j| along any unit-speed path in |z| <= radius.

    Phase steps from the exponent polynomials can exceed 2 pi between
    samples and wrap invisibly, so the initial contour grid must already
    resolve them; the polynomial factors' argument variation is caught by
    the step control plus the halving verification instead.
    """
    rate = 0.0
    for _, q in h.terms:
        if q.size >= 2:
            ks = np.arange(1, q.size)
            rate = max(rate, float(np.sum(ks * np.abs(q[1:]) * radius ** (ks - 1))))
    return rate


def _initial_nodes(perimeter: float, rate: float, floor: int = 16) -> int:
    """Node count keeping the exponential phase step under pi/2 per segment."""
    n = int(perimeter * rate / (np.pi / 2)) + 1
    return int(min(max(n, floor), 1 << 13))


def _adaptive_winding(h: ExpPolySum, to_point, params: np.ndarray,
                      max_nodes: int = MAX_CONTOUR_NODES) -> int:
    """Winding number of h along a closed contour param -> point, params in [0,1).

    Refines by parameter bisection until every wrapped phase step is below
    pi/2, then verifies by halving every segment until the winding count
    stabilizes (a wrapped step can hide full turns; global halving exposes
    them).  Raises _ContourFailure when the node budget runs out, the
    contour hits a zero, or the count refuses to settle.
    """
    params = np.sort(np.asarray(params, dtype=np.float64))
    lm, ph = h.eval_scaled(to_point(params))
    if np.any(np.isinf(lm)):
        raise _ContourFailure("zero on contour node")

    #: adjacent log-magnitude variation that forces refinement: a zero close
    #: to the contour dents |h| long before the phase step control can see
    #: its (possibly wrapped-away) full swing
    MAG_STEP = 1.6

    def refine_until_clean(params, lm, ph):
        while True:
            closed_ph = np.append(ph, ph[0])
            d = np.diff(closed_ph)
            d = np.mod(d + np.pi, 2 * np.pi) - np.pi
            bad_phase = np.abs(d) >= MAX_STEP
            closed_lm = np.append(lm, lm[0])
            dm = np.diff(closed_lm)
            bad_jump = np.abs(dm) >= MAG_STEP
            # local magnitude dips: node i far below its neighbors' mean
            prev_lm = np.roll(lm, 1)
            next_lm = np.roll(lm, -1)
            dip = (prev_lm + next_lm) / 2.0 - lm >= MAG_STEP
            bad_dip = dip | np.roll(dip, -1)  # refine both segments at a dip
            bad = np.nonzero(bad_phase | bad_jump | bad_dip)[0]
            if bad.size == 0:
                total = float(np.sum(d))
                return params, lm, ph, total
            if params.size + bad.size > max_nodes:
                raise _ContourFailure("node budget exhausted")
            nxt = np.append(params[1:], params[0] + 1.0)
            widths = nxt[bad] - params[bad]
            if np.min(widths) < 1e-12:
                # a feature pinned to a vanishing segment: the contour runs
                # (numerically) through a zero; refinement cannot win
                raise _ContourFailure("contour feature pinned to a point")
            mid = np.mod((params[bad] + nxt[bad]) / 2.0, 1.0)
            lm2, ph2 = h.eval_scaled(to_point(mid))
            if np.any(np.isinf(lm2)):
                raise _ContourFailure("zero on refined contour node")
            params = np.concatenate([params, mid])
            lm = np.concatenate([lm, lm2])
            ph = np.concatenate([ph, ph2])
            order = np.argsort(params)
            params = params[order]
            lm = lm[order]
            ph = ph[order]

    params, lm, ph, total = refine_until_clean(params, lm, ph)
    for _ in range(12):
        if params.size * 2 > max_nodes:
            raise _ContourFailure("node budget exhausted during verification")
        nxt = np.append(params[1:], params[0] + 1.0)
        mid = np.mod((params + nxt) / 2.0, 1.0)
        lm2, ph2 = h.eval_scaled(to_point(mid))
        if np.any(np.isinf(lm2)):
            raise _ContourFailure("zero on verification node")
        params2 = np.concatenate([params, mid])
        lm2_all = np.concatenate([lm, lm2])
        ph2_all = np.concatenate([ph, ph2])
        order = np.argsort(params2)
        params2, lm2_all, ph2_all, total2 = refine_until_clean(
            params2[order], lm2_all[order], ph2_all[order]
        )
        if abs(total2 - total) < 1e-6:
            w = round(total2 / (2 * np.pi))
            if abs(total2 / (2 * np.pi) - w) > 1e-3 or w < 0:
                raise _ContourFailure("inconsistent winding after verification")
            return int(w)
        params, lm, ph, total = params2, lm2_all, ph2_all, total2
    raise _ContourFailure("winding did not stabilize under halving")


def _circle_winding(h: ExpPolySum, radius: float, center: complex = 0j) -> int:
    def to_point(t):
        return center + radius * np.exp(2j * np.pi * t)

    rate = exp_phase_rate(h, abs(center) + radius)
    n0 = _initial_nodes(2 * np.pi * radius, rate, floor=64)
    return _adaptive_winding(h, to_point, np.arange(n0) / n0)


def _box_to_point(cx: float, cy: float, half: float):
    corners = np.array(
        [cx - half + 1j * (cy - half), cx + half + 1j * (cy - half),
         cx + half + 1j * (cy + half), cx - half + 1j * (cy + half)]
    )

    def to_point(t):
        t = np.asarray(t) * 4.0
        side = np.minimum(t.astype(np.int64), 3)
        frac = t - side
        a = corners[side]
        b = corners[(side + 1) % 4]
        return a + (b - a) * frac

    return to_point


def _box_winding(h: ExpPolySum, cx: float, cy: float, half: float) -> int:
    radius = float(np.hypot(abs(cx) + half, abs(cy) + half))
    rate = exp_phase_rate(h, radius)
    n0 = _initial_nodes(8 * half, rate)
    n0 = 4 * (n0 // 4 + 1)  # corners must be nodes
    params = np.arange(n0) / n0
    return _adaptive_winding(h, _box_to_point(cx, cy, half), params)


def _newton(h: ExpPolySum, dh: ExpPolySum, z0: complex) -> complex | None:
    """Newton iteration on h from z0; None when it fails to converge.

    Convergence is either the step tolerance or stagnation at a small
    step: functions with a huge coefficient mass bottom out on evaluation
    noise above the nominal tolerance while already rattling inside the
    zero's attainable resolution.
    """
    z = complex(z0)
    prev = np.inf
    flat = 0
    for _ in range(NEWTON_MAX_ITER):
        arr = np.array([z])
        lm_h, ph_h = h.eval_scaled(arr)
        if np.isinf(lm_h[0]):
            return z  # exact zero
        lm_d, ph_d = dh.eval_scaled(arr)
        if np.isinf(lm_d[0]):
            return None
        log_step = lm_h[0] - lm_d[0]
        if log_step > 100:
            return None
        step = np.exp(log_step) * np.exp(1j * (ph_h[0] - ph_d[0]))
        z = z - step
        mag = abs(step)
        if mag <= NEWTON_TOL * max(1.0, abs(z)):
            return z
        flat = flat + 1 if mag >= 0.5 * prev else 0
        if flat >= 3 and mag <= 1e-7 * max(1.0, abs(z)):
            return z  # noise-floor stagnation at the zero's resolution
        prev = mag
    return None


class _DerivativeChain:
    """Lazy list h, h', h'', ... shared across the search."""

    def __init__(self, h: ExpPolySum):
        self._ds = [h]

    def get(self, k: int) -> ExpPolySum:
        while len(self._ds) <= k:
            self._ds.append(self._ds[-1].derivative())
        return self._ds[k]


def _cancellation_depth(h: ExpPolySum, z: complex) -> float:
    """log|h(z)| minus the log of the total absolute monomial mass.

    The mass sums |coefficient| * |z|^k * e^(Re q) over every monomial of
    every term, so cancellation inside a single polynomial counts too.
    Values below about log(eps) = -36 mean the evaluation is noise: z sits
    in the basin of a multiple zero and contour data cannot be trusted.
    """
    arr = np.array([z])
    lm, _ = h.eval_scaled(arr)
    if np.isinf(lm[0]):
        return -np.inf
    top = -np.inf
    az = abs(z)
    for p, q in h.terms:
        mass = float(np.polynomial.polynomial.polyval(az, np.abs(p)))
        if mass == 0.0:
            continue
        re_q = float(np.polynomial.polynomial.polyval(z, q).real) if q.size else 0.0
        top = max(top, math.log(mass) + re_q)
    if top == -np.inf:
        return -np.inf
    return float(lm[0]) - top


def _monomial_count(h: ExpPolySum) -> int:
    return sum(p.size for p, _ in h.terms)


def _is_numerically_zero(h: ExpPolySum, z: complex) -> bool:
    """True when |h(z)| cannot be told apart from 0 in double precision:
    the value sits below the accumulated-rounding ceiling of the total
    absolute monomial mass."""
    ceiling = math.log(np.finfo(float).eps * (4 * _monomial_count(h) + 16))
    return _cancellation_depth(h, z) < ceiling


def _zero_within_tolerance(chain: _DerivativeChain, z0: complex) -> bool:
    """Accept z0 as (representing) a zero of h.

    Either |h(z0)| drowns in the rounding noise of its monomial mass, or
    the Newton step estimate |h/h'|(z0) puts a true zero within the
    location tolerance: then z0 is that zero up to reporting accuracy.
    The second route matters where the mass itself vanishes (a zero at the
    origin of z^2-dominated h evaluates exactly, with zero cancellation):
    merely-small values far from any zero fail both routes.
    """
    h = chain.get(0)
    if _is_numerically_zero(h, z0):
        return True
    arr = np.array([z0])
    lm_h, _ = h.eval_scaled(arr)
    if np.isinf(lm_h[0]):
        return True
    lm_d, _ = chain.get(1).eval_scaled(arr)
    if np.isinf(lm_d[0]):
        return False
    return float(lm_h[0] - lm_d[0]) <= math.log(1e-10 * max(1.0, abs(z0)))


def _probe_multiplicity(chain: _DerivativeChain, z0: complex) -> int:
    """Multiplicity of h at z0 by derivative probing; 0 when z0 is not a
    numerical zero at all.

    The zero test guards against merely-small values near multiple zeros
    passing for zeros.  The order is then the smallest k whose Taylor
    magnitude |h^(k)(z0)| rho^k / k! reaches 1e-8 of the largest, with
    rho = 1/(1 + exponent rate): raw derivative magnitudes would be wrong
    for exponential sums, where each differentiation multiplies e^(d z)
    terms by ~d and the twelfth derivative dwarfs the first by d^11.
    """
    h = chain.get(0)
    if not _zero_within_tolerance(chain, z0):
        return 0
    arr = np.array([z0])
    # local length scale: exponential terms differentiate like their rate,
    # a degree-n polynomial part like n / |z|
    rate = exp_phase_rate(h, abs(z0))
    M = max(1.0, abs(z0))
    log_rho = math.log(M) - math.log(1.0 + rate * M + h.max_p_degree)
    raw = []
    mags = []
    for k in range(MULTIPLICITY_CAP + 1):
        lm, _ = chain.get(k).eval_scaled(arr)
        r = -np.inf if np.isinf(lm[0]) else float(lm[0])
        raw.append(r)
        mags.append(r + k * log_rho - math.lgamma(k + 1))
    mags[0] = -np.inf  # order zero already settled by the gate above
    finite = [m for m in mags if m > -np.inf]
    if not finite:
        raise MultiplicityCapExceeded(
            f"every derivative through order {MULTIPLICITY_CAP} vanishes at {z0:.6g}"
        )
    scale = max(finite)
    threshold = scale + np.log(PROBE_REL_TOL)
    log_tol = math.log(1e-9 * max(1.0, abs(z0)))
    for k, m in enumerate(mags):
        if m > threshold:
            # the claimed order must place a k-fold zero within location
            # tolerance: |h^(k-1)/h^(k)| estimates that distance, and an
            # off-center point inside a cancellation basin fails it
            if raw[k - 1] - raw[k] <= log_tol:
                return k
            return 0
    raise MultiplicityCapExceeded(
        f"multiplicity at {z0:.6g} exceeds probe cap {MULTIPLICITY_CAP}"
    )


def _collect_in_box(h: ExpPolySum, chain: _DerivativeChain,
                    cx: float, cy: float, half: float,
                    rc: float, found: list[tuple[complex, int]],
                    known_winding: int | None = None, depth: int = 0):
    """Recursive quadtree walk accumulating (zero, multiplicity) pairs."""
    # skip boxes fully outside the disk of interest
    dx = max(abs(cx) - half, 0.0)
    dy = max(abs(cy) - half, 0.0)
    if dx * dx + dy * dy > rc * rc:
        return
    if depth > 80:
        raise ZeroFindError("quadtree depth cap exceeded")
    w = known_winding
    inflation = 1.0
    if w is None:
        res = _box_winding_robust(h, cx, cy, half)
        if res is not None:
            w, inflation = res
    if w == 0:
        return
    center = complex(cx, cy)

    def confirmed(order: int, slack: float = 1.0):
        """Newton on h^(order-1) from the center; accept when the limit
        stays within `slack` box-halves and probes to exactly `order`."""
        zc = _newton(chain.get(order - 1), chain.get(order), center)
        if (
            zc is not None
            and abs(zc.real - cx) <= slack * half * (1 + 1e-9)
            and abs(zc.imag - cy) <= slack * half * (1 + 1e-9)
            and _probe_multiplicity(chain, zc) == order
        ):
            return zc
        return None

    if w is not None:
        z0 = confirmed(w)
        if z0 is not None:
            found.append((z0, w))
            return
        # inflation may have swallowed a neighbor's zero: a confirmed zero
        # of exactly this order inside the measured (inflated) contour but
        # outside the nominal box fully explains the winding, so this box
        # is empty and its neighbor owns the zero
        z_out = confirmed(w, slack=inflation)
        if z_out is not None and (
            abs(z_out.real - cx) > half or abs(z_out.imag - cy) > half
        ):
            return

    # A multiple zero owns a floating noise basin |z - a| ~ eps^(1/mult)
    # where contour phases, hence windings, are garbage.  Once the box is
    # tiny and its center shows catastrophic cancellation, stop trusting w
    # and identify the zero by escalating through derivative orders; the
    # neighborhood slack lets adjacent basin boxes find the same zero
    # (deduplicated later) instead of subdividing to the depth cap.
    tiny = 2 * half < 1e-4 * (1.0 + abs(center))
    if tiny and _cancellation_depth(h, center) < -34.0:
        for order in range(1, MULTIPLICITY_CAP + 1):
            z0 = confirmed(order, slack=4.0)
            if z0 is not None:
                found.append((z0, order))
                return

    if w is not None and 2 * half < CLUSTER_WIDTH:
        # unresolvable cluster of distinct zeros: report its center with
        # the winding as total multiplicity (the boundary certifies it)
        z0 = _newton(chain.get(min(max(w - 1, 0), MULTIPLICITY_CAP)),
                     chain.get(min(max(w, 1), MULTIPLICITY_CAP + 1)), center)
        z0 = z0 if z0 is not None else center
        k = _probe_multiplicity(chain, z0)
        if k < 1:
            raise ZeroFindError(
                f"cluster box at {center:.6g} has winding {w} but no zero"
            )
        if max(k, w) > MULTIPLICITY_CAP:
            raise MultiplicityCapExceeded(
                f"zero near {z0:.6g} has multiplicity {max(k, w)} beyond the "
                f"probe cap {MULTIPLICITY_CAP}"
            )
        found.append((z0, max(k, w)))
        return
    nh = half / 2
    for sx in (-1, 1):
        for sy in (-1, 1):
            _collect_in_box(h, chain, cx + sx * nh, cy + sy * nh, nh, rc,
                            found, None, depth + 1)


def _box_winding_robust(h: ExpPolySum, cx: float, cy: float,
                        half: float) -> tuple[int, float] | None:
    """Box winding with inflation retries: (count, inflation factor used),
    or None when every contour attempt failed."""
    for k in range(6):
        factor = 1.0 + 0.0371 * k
        try:
            return _box_winding(h, cx, cy, half * factor), factor
        except _ContourFailure:
            continue
    return None


def zeros_in_disk(h: ExpPolySum, r: float) -> DivisorOnC:
    """All zeros of h with |z| < r (up to the perturbed radius), with
    multiplicities, certified against the boundary winding number.

    Raises ZeroFindError diagnostics instead of returning silently wrong
    divisors: multiplicity beyond the probe cap, winding mismatch after
    the retry budget, or an unresolvable contour.
    """
    if h.is_zero:
        raise ValueError("zeros_in_disk of the identically-zero function")
    if r <= 0:
        raise ValueError("radius must be positive")
    if h.never_vanishes:
        return DivisorOnC(())
    chain = _DerivativeChain(h)
    last_error: Exception | None = None
    rc = r
    for attempt in range(9):
        if attempt:
            rc = r * RADIUS_GROWTH**attempt
        try:
            w_total = _circle_winding(h, rc)
        except _ContourFailure as exc:
            last_error = exc
            continue
        if w_total == 0:
            return DivisorOnC(())
        found: list[tuple[complex, int]] = []
        # the root box is slightly offset and enlarged: zeros sitting on the
        # coordinate axes would otherwise lie exactly on subdivision lines
        # at every depth, the worst case for contour-based counting
        ox = rc * 3.7e-5 * (1 + attempt)
        oy = rc * 2.1e-5 * (1 + attempt)
        try:
            _collect_in_box(h, chain, ox, oy, rc * (1 + 2e-4 * (1 + attempt)),
                            rc, found, known_winding=None)
        except MultiplicityCapExceeded:
            raise  # a verdict about the function, not about this attempt
        except (_ContourFailure, ZeroFindError) as exc:
            # box-geometry accidents (clusters pinned to subdivision lines,
            # depth cap): retry with a shifted lattice and perturbed radius
            last_error = exc
            continue
        merged = _merge_zeros(found)
        inside = [(z, m) for z, m in merged if abs(z) < rc]
        if any(abs(abs(z) - rc) < CONTOUR_CLEARANCE for z, _ in merged):
            last_error = ZeroFindError("zero within clearance of the contour")
            continue
        total = sum(m for _, m in inside)
        if total == w_total:
            return DivisorOnC(tuple(inside))
        last_error = WindingInconsistency(
            f"found multiplicity sum {total}, boundary winding {w_total} at radius {rc}"
        )
    if isinstance(last_error, ZeroFindError):
        raise last_error
    raise WindingInconsistency(
        f"zero search failed after retries: {last_error}"
    )


def _merge_zeros(found: list[tuple[complex, int]]) -> list[tuple[complex, int]]:
    """Merge duplicate detections (same zero found via overlapping boxes)."""
    merged: list[tuple[complex, int]] = []
    for z, m in sorted(found, key=lambda t: (t[0].real, t[0].imag)):
        for i, (zz, mm) in enumerate(merged):
            if abs(z - zz) <= MERGE_DISTANCE:
                # same zero seen from overlapping (inflated) boxes
                merged[i] = (zz, max(m, mm))
                break
        else:
            merged.append((z, m))
    return merged
