#!/usr/bin/env python3
"""
Toric Pairs
===========

Moment-polytope engine for toric log Fano pairs (X_Sigma, sum c_i D_i) and
monomial valuations v in N.

  L = -(K + Delta)  <->  P = {u : <u, v_i> >= -(1 - c_i)}
  vol(L - x F_v)     =   n! * vol{u in P : <u, v> >= m_v + x},  m_v = min_P <., v>
  A(v)               =   PL function on the fan with A(v_i) = 1 - c_i
  beta(v)            =   L^n * (A(v) - <barycenter, v> + m_v)

Everything is exact: vertices are found by solving every n-subset of the
facet equations over QQ, volumes and barycenters come from a recursive fan
triangulation out of face centroids. Supported dimensions are 1 to 3.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from tqdm import tqdm

from scripts.invariants import InvariantReport, make_report, quick_positive_bound
from scripts.utils.errors import ConsistencyError, PreconditionError
from scripts.utils.rationals import format_rational, from_sympy, parse_rational, to_domain
from scripts.volfun import Polynomial, VolumeCurve

logger = logging.getLogger(__name__)

MAX_DIMENSION = 3

LatticeVector = Tuple[int, ...]
Point = Tuple[Fraction, ...]
Constraint = Tuple[LatticeVector, Fraction]


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------


def _matrix(rows: Sequence[Sequence[Any]], ncols: int) -> DomainMatrix:
    return DomainMatrix(
        [[to_domain(Fraction(x)) for x in row] for row in rows], (len(rows), ncols), QQ
    )


def _det(rows: Sequence[Sequence[Any]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return from_sympy(_matrix(rows, len(rows)).det())


def _rank(rows: Sequence[Sequence[Any]], ncols: int) -> int:
    if not rows:
        return 0
    return int(_matrix(rows, ncols).rank())


def _solve(rows: Sequence[Sequence[Any]], rhs: Sequence[Any]) -> Optional[Point]:
    """Unique solution of rows * u = rhs, or None for a singular system."""
    n = len(rows)
    if _det(rows) == 0:
        return None
    solution = _matrix(rows, n).lu_solve(_matrix([[r] for r in rhs], 1)).to_Matrix()
    return tuple(from_sympy(solution[i, 0]) for i in range(n))


def _normal_to(rows: Sequence[Sequence[Any]], n: int) -> Point:
    """Generalized cross product of n-1 vectors in dimension n."""
    normal = []
    for j in range(n):
        minor = [[row[k] for k in range(n) if k != j] for row in rows]
        normal.append((-1) ** j * _det(minor))
    return tuple(normal)


def dot(u: Sequence[Any], v: Sequence[Any]) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), Fraction(0))


def _affine_rank(points: Sequence[Point]) -> int:
    if not points:
        return -1
    base = points[0]
    return _rank([[p[i] - base[i] for i in range(len(base))] for p in points[1:]], len(base))


def _centroid(points: Sequence[Point]) -> Point:
    k = len(points)
    return tuple(sum((p[i] for p in points), Fraction(0)) / k for i in range(len(points[0])))


def as_lattice_vector(value: Iterable[Any], dimension: Optional[int] = None) -> LatticeVector:
    """Integer tuple from a list of ints or integral strings."""
    vector = []
    for entry in value:
        q = parse_rational(entry)
        if q.denominator != 1:
            raise PreconditionError(f"lattice vector entry {format_rational(q)} is not an integer")
        vector.append(q.numerator)
    if dimension is not None and len(vector) != dimension:
        raise PreconditionError(f"expected a vector of length {dimension}, got {len(vector)}")
    return tuple(vector)


def is_primitive(v: LatticeVector) -> bool:
    return any(v) and math.gcd(*v) == 1


# ---------------------------------------------------------------------------
# polytopes
# ---------------------------------------------------------------------------


def _enumerate_vertices(constraints: Sequence[Constraint], n: int) -> List[Point]:
    found = set()
    for subset in itertools.combinations(constraints, n):
        point = _solve([normal for normal, _ in subset], [-offset for _, offset in subset])
        if point is None or point in found:
            continue
        if all(dot(point, normal) >= -offset for normal, offset in constraints):
            found.add(point)
    return sorted(found)


def _is_bounded(normals: Sequence[LatticeVector], n: int) -> bool:
    """The recession cone {d : <d, a_i> >= 0} is {0}.

    A pointed cone other than {0} has an extreme ray on n-1 independent
    tight constraints, so testing those directions is enough.
    """
    if _rank(normals, n) < n:
        return False
    for subset in itertools.combinations(normals, n - 1):
        if _rank(subset, n) < n - 1:
            continue
        direction = _normal_to(subset, n)
        for sign in (1, -1):
            d = tuple(sign * x for x in direction)
            if all(dot(d, a) >= 0 for a in normals):
                return False
    return True


def _tight_sets(
    vertices: Sequence[Point], constraints: Sequence[Constraint]
) -> List[FrozenSet[int]]:
    return [
        frozenset(i for i, p in enumerate(vertices) if dot(p, normal) == -offset)
        for normal, offset in constraints
    ]


def _triangulate(
    face: FrozenSet[int],
    dim: int,
    vertices: Sequence[Point],
    tight: Sequence[FrozenSet[int]],
) -> List[Tuple[Point, ...]]:
    """Simplices of a fan triangulation of ``face`` from its vertex centroid."""
    points = [vertices[i] for i in sorted(face)]
    if dim == 0:
        return [(points[0],)]
    apex = _centroid(points)
    facets = set()
    for t in tight:
        sub = face & t
        if sub != face and len(sub) >= dim and _affine_rank([vertices[i] for i in sorted(sub)]) == dim - 1:
            facets.add(sub)
    simplices = []
    for sub in sorted(facets, key=sorted):
        simplices.extend((apex,) + s for s in _triangulate(sub, dim - 1, vertices, tight))
    return simplices


def _simplex_volume(simplex: Tuple[Point, ...]) -> Fraction:
    base = simplex[0]
    n = len(base)
    edges = [[p[i] - base[i] for i in range(n)] for p in simplex[1:]]
    return abs(_det(edges)) / math.factorial(n)


def _volume_and_barycenter(
    vertices: Sequence[Point], constraints: Sequence[Constraint], n: int
) -> Tuple[Fraction, Optional[Point]]:
    if _affine_rank(vertices) < n:
        return Fraction(0), None
    tight = _tight_sets(vertices, constraints)
    total = Fraction(0)
    moment = [Fraction(0)] * n
    for simplex in _triangulate(frozenset(range(len(vertices))), n, vertices, tight):
        volume = _simplex_volume(simplex)
        center = _centroid(simplex)
        total += volume
        for i in range(n):
            moment[i] += volume * center[i]
    return total, tuple(m / total for m in moment)


@dataclass(frozen=True)
class Polytope:
    """P = {u : <u, normal> >= -offset} with its vertices cached at build time."""

    constraints: Tuple[Constraint, ...]
    dimension: int
    vertices: Tuple[Point, ...] = field(init=False, compare=False)
    volume: Fraction = field(init=False, compare=False)
    barycenter: Point = field(init=False, compare=False)

    def __post_init__(self):
        n = self.dimension
        if not 1 <= n <= MAX_DIMENSION:
            raise PreconditionError(f"supported dimensions are 1..{MAX_DIMENSION}, got {n}")
        constraints = tuple(
            (as_lattice_vector(normal, n), parse_rational(offset))
            for normal, offset in self.constraints
        )
        if any(not any(normal) for normal, _ in constraints):
            raise PreconditionError("zero normal vector in H-representation")
        object.__setattr__(self, "constraints", constraints)
        if not _is_bounded([normal for normal, _ in constraints], n):
            raise PreconditionError("polytope is unbounded")
        vertices = tuple(_enumerate_vertices(constraints, n))
        if not vertices:
            raise PreconditionError("polytope is empty")
        volume, barycenter = _volume_and_barycenter(vertices, constraints, n)
        if volume == 0:
            raise PreconditionError("polytope is not full-dimensional")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "volume", volume)
        object.__setattr__(self, "barycenter", barycenter)

    @classmethod
    def from_constraints(cls, constraints: Iterable[Tuple[Iterable[Any], Any]]) -> "Polytope":
        constraints = tuple((tuple(normal), offset) for normal, offset in constraints)
        if not constraints:
            raise PreconditionError("empty H-representation")
        return cls(constraints, len(constraints[0][0]))

    def contains(self, u: Sequence[Any]) -> bool:
        return all(dot(u, normal) >= -offset for normal, offset in self.constraints)

    def interior_contains(self, u: Sequence[Any]) -> bool:
        return all(dot(u, normal) > -offset for normal, offset in self.constraints)

    def support_range(self, v: Sequence[Any]) -> Tuple[Fraction, Fraction]:
        """(min, max) of <., v> over P."""
        values = [dot(p, v) for p in self.vertices]
        return min(values), max(values)

    def slice_volume(self, v: LatticeVector, level: Fraction) -> Fraction:
        """Euclidean volume of {u in P : <u, v> >= level}; 0 when not full-dimensional."""
        constraints = self.constraints + ((tuple(v), -Fraction(level)),)
        vertices = _enumerate_vertices(constraints, self.dimension)
        volume, _ = _volume_and_barycenter(vertices, constraints, self.dimension)
        return volume

    @property
    def normalized_volume(self) -> Fraction:
        """(L^n) = n! * vol(P)."""
        return math.factorial(self.dimension) * self.volume

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "constraints": [
                {"normal": list(normal), "offset": format_rational(offset)}
                for normal, offset in self.constraints
            ],
            "vertices": [[format_rational(x) for x in p] for p in self.vertices],
            "volume": format_rational(self.volume),
            "barycenter": [format_rational(x) for x in self.barycenter],
        }


def polytope_volume(polytope: Polytope) -> Fraction:
    return polytope.volume


def polytope_barycenter(polytope: Polytope) -> Point:
    return polytope.barycenter


# ---------------------------------------------------------------------------
# fans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FanPair:
    """A complete fan with a boundary coefficient c_i in [0, 1) on every ray."""

    rays: Tuple[LatticeVector, ...]
    cones: Tuple[Tuple[int, ...], ...]
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.rays:
            raise PreconditionError("fan has no rays")
        n = len(self.rays[0])
        rays = tuple(as_lattice_vector(r, n) for r in self.rays)
        cones = tuple(tuple(int(i) for i in cone) for cone in self.cones)
        coefficients = tuple(parse_rational(c) for c in self.coefficients)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "cones", cones)
        object.__setattr__(self, "coefficients", coefficients)
        if not 1 <= n <= MAX_DIMENSION:
            raise PreconditionError(f"supported dimensions are 1..{MAX_DIMENSION}, got {n}")
        if len(coefficients) != len(rays):
            raise PreconditionError(
                f"{len(rays)} rays but {len(coefficients)} boundary coefficients"
            )
        for i, ray in enumerate(rays):
            if not is_primitive(ray):
                raise PreconditionError(f"ray {i} = {list(ray)} is not primitive")
            if not 0 <= coefficients[i] < 1:
                raise PreconditionError(
                    f"coefficient {format_rational(coefficients[i])} on ray {i} "
                    "not in [0, 1): pair is not klt"
                )
        for cone in cones:
            if len(cone) < n or any(not 0 <= i < len(rays) for i in cone):
                raise PreconditionError(f"cone {list(cone)} is not a maximal cone of the fan")
            if _rank([rays[i] for i in cone], n) < n:
                raise PreconditionError(f"cone {list(cone)} is not full-dimensional")
        if self.is_simplicial and not self._walls_match():
            raise PreconditionError("fan is not complete")

    @property
    def dimension(self) -> int:
        return len(self.rays[0])

    @property
    def is_simplicial(self) -> bool:
        return all(len(cone) == self.dimension for cone in self.cones)

    def _walls_match(self) -> bool:
        """Every wall of a simplicial fan separates exactly two cones."""
        n = self.dimension
        walls: Dict[FrozenSet[int], List[int]] = {}
        for cone in self.cones:
            for opposite in cone:
                wall = frozenset(cone) - {opposite}
                walls.setdefault(wall, []).append(opposite)
        for wall, opposites in walls.items():
            if len(opposites) != 2:
                return False
            normal = _normal_to([self.rays[i] for i in sorted(wall)], n)
            sides = [dot(normal, self.rays[i]) for i in opposites]
            if sides[0] * sides[1] >= 0:
                return False
        return True

    @classmethod
    def from_lists(
        cls,
        rays: Sequence[Sequence[Any]],
        cones: Sequence[Sequence[int]],
        coefficients: Optional[Sequence[Any]] = None,
    ) -> "FanPair":
        if coefficients is None:
            coefficients = [0] * len(rays)
        return cls(tuple(tuple(r) for r in rays), tuple(tuple(c) for c in cones), tuple(coefficients))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rays": [list(r) for r in self.rays],
            "cones": [list(c) for c in self.cones],
            "coefficients": [format_rational(c) for c in self.coefficients],
        }


def projective_space_fan(n: int, coefficients: Optional[Sequence[Any]] = None) -> FanPair:
    """P^n: rays e_1..e_n and -(e_1+...+e_n)."""
    rays = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    cones = [tuple(i for i in range(n + 1) if i != skip) for skip in range(n + 1)]
    return FanPair.from_lists(rays, cones, coefficients)


def product_of_lines_fan(n: int, coefficients: Optional[Sequence[Any]] = None) -> FanPair:
    """(P^1)^n: rays +-e_i, one cone per orthant."""
    rays = []
    for i in range(n):
        for sign in (1, -1):
            rays.append(tuple(sign if j == i else 0 for j in range(n)))
    cones = [
        tuple(2 * i + choice for i, choice in enumerate(choices))
        for choices in itertools.product((0, 1), repeat=n)
    ]
    return FanPair.from_lists(rays, cones, coefficients)


def _cone_vertex(fp: FanPair, cone: Tuple[int, ...]) -> Optional[Point]:
    """The u with <u, v_i> = -(1 - c_i) on every ray of ``cone``, if consistent."""
    n = fp.dimension
    for basis in itertools.combinations(cone, n):
        point = _solve([fp.rays[i] for i in basis], [-(1 - fp.coefficients[i]) for i in basis])
        if point is None:
            continue
        if all(dot(point, fp.rays[i]) == -(1 - fp.coefficients[i]) for i in cone):
            return point
        return None
    return None


def moment_polytope(fp: FanPair) -> Polytope:
    """P_L for L = -(K + Delta); fails unless L is ample on the given fan."""
    try:
        polytope = Polytope(
            tuple((ray, 1 - c) for ray, c in zip(fp.rays, fp.coefficients)), fp.dimension
        )
    except PreconditionError as exc:
        raise PreconditionError(f"not log Fano in toric model: {exc}") from exc
    seen = set()
    for cone in fp.cones:
        vertex = _cone_vertex(fp, cone)
        if vertex is None or not polytope.contains(vertex) or vertex in seen:
            raise PreconditionError(
                f"not log Fano in toric model: -(K+Delta) is not ample on cone {list(cone)}"
            )
        seen.add(vertex)
    if not polytope.interior_contains([0] * fp.dimension):
        raise ConsistencyError("origin is not interior to the moment polytope")
    logger.debug("moment polytope vertices: %s", polytope.vertices)
    return polytope


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------


def _cone_coordinates(fp: FanPair, basis: Sequence[int], v: LatticeVector) -> Optional[Point]:
    """lambda >= 0 with v = sum lambda_k v_{basis_k}, if v lies in that simplicial cone."""
    n = fp.dimension
    columns = [[fp.rays[i][row] for i in basis] for row in range(n)]
    lam = _solve(columns, v)
    if lam is None or any(x < 0 for x in lam):
        return None
    return lam


def toric_log_discrepancy(fp: FanPair, v: Iterable[Any]) -> Fraction:
    """A(v): the PL function with A(v_i) = 1 - c_i, linear on every cone."""
    v = as_lattice_vector(v, fp.dimension)
    if not any(v):
        raise PreconditionError("valuation vector must be nonzero")
    for cone in fp.cones:
        if len(cone) != fp.dimension:
            continue
        lam = _cone_coordinates(fp, cone, v)
        if lam is not None:
            return sum((l * (1 - fp.coefficients[i]) for l, i in zip(lam, cone)), Fraction(0))
    for cone in fp.cones:
        if len(cone) == fp.dimension:
            continue
        for basis in itertools.combinations(cone, fp.dimension):
            if _cone_coordinates(fp, basis, v) is not None:
                raise PreconditionError(
                    f"v={list(v)} lies in the non-simplicial cone {list(cone)}"
                )
    raise ConsistencyError(f"v={list(v)} lies in no cone: fan is not complete")


def toric_volume_curve(polytope: Polytope, v: Iterable[Any]) -> VolumeCurve:
    """x -> n! * vol{u in P : <u, v> >= m_v + x}, interpolated piece by piece."""
    n = polytope.dimension
    v = as_lattice_vector(v, n)
    if not is_primitive(v):
        raise PreconditionError(f"v={list(v)} is not primitive")
    values = sorted({dot(p, v) for p in polytope.vertices})
    m_v = values[0]
    breakpoints = [value - m_v for value in values]
    scale = math.factorial(n)
    pieces = []
    for lo, hi in zip(breakpoints, breakpoints[1:]):
        samples = [lo + (hi - lo) * Fraction(i, n) for i in range(n + 1)]
        data = [(x, scale * polytope.slice_volume(v, m_v + x)) for x in samples]
        pieces.append(Polynomial.interpolate(data))
    return VolumeCurve.from_pieces(n, breakpoints, pieces)


def toric_beta(fp: FanPair, v: Iterable[Any], polytope: Optional[Polytope] = None) -> Fraction:
    """beta via the barycenter, cross-checked against the curve integral."""
    polytope = polytope or moment_polytope(fp)
    v = as_lattice_vector(v, fp.dimension)
    A = toric_log_discrepancy(fp, v)
    m_v, _ = polytope.support_range(v)
    Ln = polytope.normalized_volume
    beta = Ln * (A - dot(polytope.barycenter, v) + m_v)
    curve = toric_volume_curve(polytope, v)
    integral_beta = make_report(fp.dimension, Ln, A, curve).beta
    if beta != integral_beta:
        raise ConsistencyError(
            f"beta({list(v)}): barycenter route {format_rational(beta)} "
            f"!= integral route {format_rational(integral_beta)}"
        )
    return beta


def toric_report(
    fp: FanPair, v: Iterable[Any], polytope: Optional[Polytope] = None
) -> Tuple[VolumeCurve, InvariantReport]:
    polytope = polytope or moment_polytope(fp)
    v = as_lattice_vector(v, fp.dimension)
    curve = toric_volume_curve(polytope, v)
    report = make_report(
        fp.dimension, polytope.normalized_volume, toric_log_discrepancy(fp, v), curve
    )
    m_v, _ = polytope.support_range(v)
    if report.beta != report.Ln * (report.A - dot(polytope.barycenter, v) + m_v):
        raise ConsistencyError(f"barycenter and integral routes disagree at v={list(v)}")
    return curve, report


def lattice_section_count(polytope: Polytope, v: Iterable[Any], k: int, x: Any) -> int:
    """#{u in kP cap Z^n : <u, v> >= k m_v + k x}."""
    n = polytope.dimension
    v = as_lattice_vector(v, n)
    x = parse_rational(x)
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    scaled_offsets = [k * offset for _, offset in polytope.constraints]
    if any(o.denominator != 1 for o in scaled_offsets):
        raise PreconditionError(f"kL is not Cartier for k={k}: k*offsets must be integral")
    m_v, _ = polytope.support_range(v)
    threshold = math.ceil(k * m_v + k * x)
    lows = [math.floor(k * min(p[i] for p in polytope.vertices)) for i in range(n)]
    highs = [math.ceil(k * max(p[i] for p in polytope.vertices)) for i in range(n)]
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(lows, highs)]
    grid = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    normals = np.array([normal for normal, _ in polytope.constraints], dtype=np.int64)
    bounds = np.array([-o.numerator for o in scaled_offsets], dtype=np.int64)
    inside = np.all(grid @ normals.T >= bounds, axis=1)
    inside &= grid @ np.array(v, dtype=np.int64) >= threshold
    return int(np.count_nonzero(inside))


def lattice_volume_estimate(polytope: Polytope, v: Iterable[Any], k: int, x: Any) -> Fraction:
    """n! * count / k^n, which tends to vol(L - x F_v) as k grows."""
    n = polytope.dimension
    count = lattice_section_count(polytope, v, k, x)
    return Fraction(math.factorial(n) * count, k**n)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepEntry:
    v: LatticeVector
    report: InvariantReport
    curve: Optional[VolumeCurve] = None
    certified_by_tau_bound: bool = False
    is_minimum: bool = False

    def to_dict(self, with_float: bool = False) -> Dict[str, Any]:
        return {
            "v": list(self.v),
            "certified_by_tau_bound": self.certified_by_tau_bound,
            "is_minimum": self.is_minimum,
            **self.report.to_dict(with_float),
        }


def primitive_vectors(n: int, radius: int) -> List[LatticeVector]:
    """Primitive v with max|v_i| <= radius, in lexicographic order."""
    if radius < 1:
        raise PreconditionError("radius must be >= 1")
    span = range(-radius, radius + 1)
    return [v for v in itertools.product(span, repeat=n) if is_primitive(v)]


def toric_sweep(
    fp: FanPair,
    radius: int,
    max_workers: Optional[int] = None,
    show_progress: bool = False,
) -> List[SweepEntry]:
    """Reports for every primitive v in the radius box, sorted by betahat.

    This is evidence over monomial valuations only.
    """
    polytope = moment_polytope(fp)
    vectors = primitive_vectors(fp.dimension, radius)
    logger.info("sweeping %d monomial valuations (radius %d)", len(vectors), radius)

    def evaluate(v: LatticeVector) -> SweepEntry:
        curve, report = toric_report(fp, v, polytope)
        certified = quick_positive_bound(report.A, report.tau, report.n) is not None
        return SweepEntry(v, report, curve, certified)

    entries: List[SweepEntry] = []
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(evaluate, v): v for v in vectors}
        for future in tqdm(
            as_completed(futures), total=len(futures), disable=not show_progress, desc="toric sweep"
        ):
            entries.append(future.result())
    entries.sort(key=lambda e: (e.report.betahat, e.v))
    if entries:
        lowest = entries[0].report.betahat
        for entry in entries:
            entry.is_minimum = entry.report.betahat == lowest
        logger.info(
            "minimum betahat %s at v=%s", format_rational(lowest), list(entries[0].v)
        )
    return entries
