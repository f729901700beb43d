"""T-adic Newton polygons and their block structure.

Valuations are normalized with v_T(T) = 1. A coefficient that vanishes mod
T^b only gives the lower bound b; such points still take part in the hull,
but no slope that depends on them is reported as exact.
"""

import logging
import math
import random
from collections import namedtuple
from fractions import Fraction

from .errors import SlopeAnalysisError
from .padic import PrecisionProfile, ZpTSeries
from .series import AFFINE_LINE, TSeriesPoly

logger = logging.getLogger(__name__)

NewtonPoint = namedtuple("NewtonPoint", "k value exact")
Segment = namedtuple("Segment", "start end slope multiplicity provisional")
Finding = namedtuple("Finding", "kind k observed bound")

EXACT = "exact"
WITHIN_WINDOW = "within-window"
VIOLATION = "violation"


class NewtonPolygon(namedtuple("NewtonPolygon", "points hull segments")):
    __slots__ = ()

    @property
    def slopes(self):
        """Segment slopes repeated by multiplicity, as (slope, provisional)."""
        out = []
        for seg in self.segments:
            out.extend([(seg.slope, seg.provisional)] * seg.multiplicity)
        return out

    def vertices(self):
        return [(pt.k, pt.value, not pt.exact) for pt in self.hull]


class SlopeReport(
    namedtuple(
        "SlopeReport",
        "block_degree increment_r residues match_quality normalization "
        "block_increments consistent analyzed provisional",
    )
):
    __slots__ = ()

    def counts(self):
        out = {EXACT: 0, WITHIN_WINDOW: 0, VIOLATION: 0}
        for _, quality in self.match_quality:
            out[quality] += 1
        return out


def _cross(o, a, b):
    return (a.k - o.k) * (b.value - o.value) - (a.value - o.value) * (b.k - o.k)


def lower_hull(points):
    """Lower convex hull; collinear points stay as vertices."""
    hull = []
    for pt in sorted(points, key=lambda q: q.k):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) < 0:
            hull.pop()
        hull.append(pt)
    return hull


def polygon_from_points(points):
    # lower-bound points sit in the hull at their bound, so every point lies on
    # or above it; a segment between two exact vertices is then certain
    hull = lower_hull(points)
    segments = []
    for start, end in zip(hull, hull[1:]):
        segments.append(
            Segment(
                start.k,
                end.k,
                Fraction(end.value - start.value, end.k - start.k),
                end.k - start.k,
                not (start.exact and end.exact),
            )
        )
    return NewtonPolygon(tuple(points), tuple(hull), tuple(segments))


def newton_polygon(C):
    points = []
    for k, c in enumerate(C.coeffs):
        val = c.valuation_T()
        points.append(NewtonPoint(k, val.value, val.exact))
    polygon = polygon_from_points(points)
    provisional = sum(seg.multiplicity for seg in polygon.segments if seg.provisional)
    if provisional:
        logger.warning(
            "%d of %d slopes are provisional (truncated at T^%d)",
            provisional,
            len(points) - 1,
            C.prof.b,
        )
    return polygon


def polygon_from_slopes(slopes):
    points = [NewtonPoint(0, Fraction(0), True)]
    for k, s in enumerate(slopes, 1):
        points.append(NewtonPoint(k, points[-1].value + s, True))
    return polygon_from_points(points)


def slope_decomposition(npoly, d):
    """Fit slopes to r(n + beta_j) in blocks of d consecutive slopes."""
    slopes = npoly.slopes
    exact = []
    for value, provisional in slopes:
        if provisional:
            break
        exact.append(Fraction(value))
    blocks = len(exact) // d
    if blocks < 2:
        raise SlopeAnalysisError(
            "only {} exact slopes for blocks of {}: increase precision b or smax".format(
                len(exact), d
            )
        )
    L = exact[: blocks * d]
    r = (L[(blocks - 1) * d] - L[0]) / (blocks - 1)
    if r <= 0:
        raise SlopeAnalysisError("slopes do not grow from block to block (r = {})".format(r))
    n0 = math.floor(L[0] / r)
    residues = sorted(x - math.floor(x) for x in (L[j] / r - n0 for j in range(d)))

    quality = []
    for i, (value, provisional) in enumerate(slopes):
        value = Fraction(value)
        n = n0 + i // d
        expected = r * (n + residues[i % d])
        if value == expected and not provisional:
            label = EXACT
        elif r * n <= value < r * (n + 1):
            label = WITHIN_WINDOW
        else:
            label = VIOLATION
        quality.append((value, label))

    increments = [L[n * d] - L[(n - 1) * d] for n in range(1, blocks)]
    report = SlopeReport(
        d,
        r,
        tuple(residues),
        tuple(quality),
        1,
        tuple(increments),
        all(x == r for x in increments),
        len(L),
        len(slopes) - len(exact),
    )
    logger.info("r = %s, beta = %s over %d blocks", r, list(residues), blocks)
    return report


def hodge_bound(p, d, k):
    return Fraction((p - 1) * k * (k - 1), 2 * d)


def hodge_findings(npoly, p, d):
    """Exact vertices below the Hodge-type bound, and decreasing valuations."""
    findings = []
    for pt in npoly.hull:
        if pt.exact and pt.value < hodge_bound(p, d, pt.k):
            findings.append(Finding("below-hodge", pt.k, pt.value, hodge_bound(p, d, pt.k)))
    previous = None
    for pt in npoly.points:
        if not pt.exact:
            continue
        if previous is not None and pt.value < previous.value:
            findings.append(Finding("decreasing", pt.k, pt.value, previous.value))
        previous = pt
    for finding in findings:
        logger.warning("Finding: %s at k=%d (%s vs %s)", *finding)
    return findings


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def test_polygon_examples():
    prof = PrecisionProfile.auto(2, 6, 6, 2, 2)
    assert newton_polygon(TSeriesPoly(prof, [1, -2], 1)).slopes == [(0, False)]
    assert newton_polygon(TSeriesPoly(prof, [1, ZpTSeries.T(prof)], 1)).slopes == [(1, False)]
    c1 = ZpTSeries(prof, [0, 5])
    c2 = ZpTSeries(prof, [0, 0, 0, 1, 1])
    assert newton_polygon(TSeriesPoly(prof, [1, c1, c2], 2)).slopes == [
        (1, False),
        (2, False),
    ]


def test_hull_against_brute_force():
    rng = random.Random(12)
    for _ in range(50):
        n = rng.randrange(2, 12)
        points = [NewtonPoint(k, rng.randrange(0, 30), True) for k in range(n)]
        polygon = polygon_from_points(points)
        hull = polygon.hull
        for k in range(n):
            brute = min(
                Fraction(points[i].value * (j - k) + points[j].value * (k - i), j - i)
                if i != j
                else Fraction(points[i].value)
                for i in range(k + 1)
                for j in range(k, n)
            )
            for a, b in zip(hull, hull[1:]):
                if a.k <= k <= b.k:
                    value = Fraction(a.value * (b.k - k) + b.value * (k - a.k), b.k - a.k)
                    assert value == brute
            assert points[k].value >= brute
        slopes = [s for s, _ in polygon.slopes]
        assert slopes == sorted(slopes)


def test_lower_bound_points_are_never_exact():
    points = [
        NewtonPoint(0, 0, True),
        NewtonPoint(1, 0, True),
        NewtonPoint(2, 2, True),
        NewtonPoint(3, 6, True),
        NewtonPoint(4, 8, False),
    ]
    polygon = polygon_from_points(points)
    assert [seg.provisional for seg in polygon.segments] == [False, False, True]
    # the bound at k=4 lies on the extension of the slope-2 segment
    points[4] = NewtonPoint(4, 6, False)
    polygon = polygon_from_points(points)
    assert not polygon.segments[1].provisional
    assert all(seg.provisional for seg in polygon.segments if seg.end == 4)


def test_slope_decomposition_examples():
    import pytest

    report = slope_decomposition(polygon_from_slopes(range(6)), 1)
    assert report.increment_r == 1 and report.residues == (0,)
    assert report.counts() == {EXACT: 6, WITHIN_WINDOW: 0, VIOLATION: 0}

    thirds = [0, 2, 4, 6, 8, 10]
    report = slope_decomposition(polygon_from_slopes(thirds), 3)
    assert report.increment_r == 6
    assert report.residues == (0, Fraction(1, 3), Fraction(2, 3))
    assert report.consistent

    perturbed = slope_decomposition(polygon_from_slopes([0, 2, 4, 6, 9, 10]), 3)
    assert perturbed.match_quality[4] == (9, WITHIN_WINDOW)
    broken = slope_decomposition(polygon_from_slopes([0, 2, 4, 6, 8, 13]), 3)
    assert broken.match_quality[5] == (13, VIOLATION)

    with pytest.raises(SlopeAnalysisError):
        slope_decomposition(polygon_from_slopes([0, 2, 4, 6]), 3)
    with pytest.raises(SlopeAnalysisError):
        slope_decomposition(polygon_from_slopes([1, 1, 1, 1]), 2)


def test_hodge_findings():
    good = polygon_from_slopes([0, 2, 4, 6])
    assert hodge_findings(good, 7, 3) == []
    low = polygon_from_slopes([0, 2, 3, 7])
    assert [f.kind for f in hodge_findings(low, 7, 3)] == ["below-hodge"]


def test_slope_structure_of_x_cubed():
    from .dwork import assemble_matrix
    from .fredholm import char_series
    from .splitting import TowerInput, build_Ef

    # (p - 1) * D >= deg f * b, and k(k - 1) < b for every k <= smax
    prof = PrecisionProfile.auto(7, 12, 73, 9, 9, D=37)
    tower = TowerInput.build(7, AFFINE_LINE, {3: 1})
    C = char_series(assemble_matrix(build_Ef(tower, prof), 0), prof.smax)
    polygon = newton_polygon(C)
    assert polygon.slopes == [(Fraction(2 * k), False) for k in range(9)]
    report = slope_decomposition(polygon, tower.degree)
    assert report.analyzed == 9 and report.provisional == 0
    assert report.block_increments == (6, 6)
    assert report.increment_r == 6
    assert report.residues == (0, Fraction(1, 3), Fraction(2, 3))
    assert report.consistent
    assert report.counts() == {EXACT: 9, WITHIN_WINDOW: 0, VIOLATION: 0}
    assert hodge_findings(polygon, 7, 3) == []
