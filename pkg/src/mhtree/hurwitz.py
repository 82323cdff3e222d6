"""Coordinate maps attached to a base point a of C^n.

Every tree vertex w carries the point obtained by applying the Vieta moves
along its word to a; edges of color i change only coordinate i, and the two
endpoint values x_i, y_i of such an edge satisfy x_i + y_i = prod of the other
coordinates.  An alternating {i,j}-geodesic leaves the remaining n-2
coordinates constant, so it carries a well-defined product phi and square sum
sigma; the {i,j} coordinates along it follow the three-term recurrence
y_{m+1} = phi * y_m - y_{m-1}.  This module computes those maps, classifies
the growth of the recurrence, enumerates orbits breadth-first, and finds the
nonnegative integer solutions of x_1^2 + ... + x_n^2 = x_1 ... x_n.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .group import apply_generator
from .tree import (
    GeodesicAddress,
    SubtreeAddress,
    VertexAddress,
    Word,
    check_arity,
)

# Orbit values grow doubly exponentially; beyond this magnitude entries are
# flagged and their subtrees are not expanded.
OVERFLOW_CLAMP = 1e150

# Distance-to-[-2,2] tolerance and the relative sigma == mu tolerance.
SEGMENT_TOL = 1e-9
SIGMA_TOL = 1e-9


def hurwitz_form(x: Sequence[complex]) -> complex:
    """H(x) = x_1^2 + ... + x_n^2 - x_1 x_2 ... x_n."""
    return sum(v * v for v in x) - math.prod(x)


def segment_distance(z: complex) -> float:
    """Euclidean distance from z to the real segment [-2, 2]."""
    z = complex(z)
    t = min(2.0, max(-2.0, z.real))
    return math.hypot(z.real - t, z.imag)


@dataclass(frozen=True)
class HurwitzPoint:
    """A base point of C^n with its cached form value."""

    coords: tuple[complex, ...]
    mu: complex

    def __post_init__(self) -> None:
        check_arity(len(self.coords))
        recomputed = hurwitz_form(self.coords)
        if abs(recomputed - self.mu) > 1e-12 * (1.0 + abs(recomputed)):
            raise ValueError(f"cached form value {self.mu} does not match {recomputed}")

    @classmethod
    def from_coords(cls, coords: Sequence[complex]) -> "HurwitzPoint":
        coords = tuple(coords)
        return cls(coords, hurwitz_form(coords))

    @property
    def n(self) -> int:
        return len(self.coords)


def principal_eigenvalue(phi: complex) -> complex:
    """The root lam of z^2 - phi z + 1 with |lam| >= 1.

    When both roots sit on the unit circle (phi in [-2, 2]) the one with
    nonnegative imaginary part is returned.
    """
    phi = complex(phi)
    if abs(phi) > 4.0:
        # Stable large-phi branch; 4/phi^2 underflows harmlessly for huge phi.
        return 0.5 * phi * (1.0 + cmath.sqrt(1.0 - 4.0 / (phi * phi)))
    disc = cmath.sqrt(phi * phi - 4.0)
    r_plus = 0.5 * (phi + disc)
    r_minus = 0.5 * (phi - disc)
    big, small = (r_plus, r_minus) if abs(r_plus) >= abs(r_minus) else (r_minus, r_plus)
    if abs(big) - abs(small) <= 1e-12:
        return big if big.imag >= 0 else small
    return big


@dataclass(frozen=True)
class GeodesicWeights:
    """The conserved data of an alternating geodesic: phi, sigma and lam.

    lam is the root of z^2 - phi z + 1 with |lam| >= 1, so phi = lam + 1/lam;
    the coordinate values along the geodesic are A lam^m + B lam^{-m} away
    from the degenerate phi = +-2 cases.
    """

    phi: complex
    sigma: complex
    lam: complex

    def __post_init__(self) -> None:
        if abs(self.lam) < 1.0 - 1e-12:
            raise ValueError(f"lam = {self.lam} has modulus below 1")
        residual = abs(self.lam + 1.0 / self.lam - self.phi)
        if residual > 1e-12 * (1.0 + abs(self.phi)):
            raise ValueError(f"lam + 1/lam = {self.lam + 1.0 / self.lam} is not phi = {self.phi}")

    @classmethod
    def from_phi_sigma(cls, phi: complex, sigma: complex) -> "GeodesicWeights":
        return cls(complex(phi), complex(sigma), principal_eigenvalue(phi))


def coords_at_word(a: Sequence[complex], word: Word) -> tuple[complex, ...]:
    """Vieta moves applied letter by letter, root-first."""
    coords = tuple(a)
    for c in word:
        coords = apply_generator(coords, c)
    return coords


def phi_vertex(a: HurwitzPoint, v: VertexAddress) -> tuple[complex, ...]:
    """The point carried by vertex v: generators applied along its word."""
    if v.n != a.n:
        raise ValueError(f"arity mismatch: point has {a.n}, vertex has {v.n}")
    return coords_at_word(a.coords, v.word)


def phi_sigma_at(coords: Sequence[complex], i: int, j: int) -> tuple[complex, complex]:
    """Product and square sum of the coordinates other than i and j (1-based)."""
    phi: complex = 1
    sigma: complex = 0
    for k, v in enumerate(coords, start=1):
        if k != i and k != j:
            phi *= v
            sigma += v * v
    return phi, sigma


def phi_geodesic(a: HurwitzPoint, g: GeodesicAddress) -> GeodesicWeights:
    """The conserved weights of g, evaluated at its closest-to-root vertex."""
    if g.n != a.n:
        raise ValueError(f"arity mismatch: point has {a.n}, geodesic has {g.n}")
    coords = coords_at_word(a.coords, g.root_word)
    phi, sigma = phi_sigma_at(coords, g.low, g.high)
    return GeodesicWeights.from_phi_sigma(phi, sigma)


def extended_phi(a: HurwitzPoint, t: SubtreeAddress) -> complex:
    """Product of the coordinates whose colors the subtree does not use.

    A single vertex ([v; {}]) gives the full product, the subtree missing one
    color gives that single coordinate, and an alternating geodesic viewed as
    [v; {i,j}] gives the geodesic product.  The whole tree (all n colors) has
    no selected coordinates and is rejected.
    """
    if t.n != a.n:
        raise ValueError(f"arity mismatch: point has {a.n}, subtree has {t.n}")
    if len(t.colors) >= t.n:
        raise ValueError("the full tree carries no coordinate product")
    coords = coords_at_word(a.coords, t.base_word)
    return math.prod(coords[k - 1] for k in t.missing_colors)


def geodesic_values(a: HurwitzPoint, g: GeodesicAddress, m_range: Iterable[int]) -> list[complex]:
    """The coordinate values y_m along g for each requested index m.

    y_m is the {i,j}-coordinate of the point at the m-th vertex that is not
    about to change across edge e_m; equivalently the coordinate of color
    color(e_{m-1}).  Consecutive values satisfy y_{m+1} = phi y_m - y_{m-1}.
    """
    ms = list(m_range)
    if not ms:
        return []
    lo_m, hi_m = min(ms), max(ms)
    wanted = set(ms)
    values: dict[int, complex] = {}

    def other_color(m: int) -> int:
        # color(e_{m-1}): the low color iff m-1 is even.
        return g.low if (m - 1) % 2 == 0 else g.high

    def edge_color(m: int) -> int:
        return g.low if m % 2 == 0 else g.high

    base = coords_at_word(a.coords, g.root_word)
    coords = base
    for m in range(0, hi_m + 1):
        if m in wanted:
            values[m] = coords[other_color(m) - 1]
        coords = apply_generator(coords, edge_color(m))
    coords = base
    for m in range(0, lo_m - 1, -1):
        if m in wanted:
            values[m] = coords[other_color(m) - 1]
        coords = apply_generator(coords, edge_color(m - 1))
    return [values[m] for m in ms]


class GrowthClass(enum.Enum):
    """The five behaviours of |y_m| along a geodesic as |m| grows."""

    SCALAR_GEOMETRIC = "scalar-geometric"
    EXPONENTIAL_BOTH_ENDS = "exponential-both-ends"
    BOUNDED = "bounded"
    LINEAR_PLUS_2 = "linear-plus-2"
    LINEAR_MINUS_2 = "linear-minus-2"


def growth_class(
    a: HurwitzPoint,
    g: GeodesicAddress,
    segment_tol: float = SEGMENT_TOL,
    sigma_tol: float = SIGMA_TOL,
) -> GrowthClass:
    """Classify the geodesic by (sigma == mu, phi relative to [-2, 2]).

    sigma == mu wins over everything: there y_m = y_0 lam^{+-m} exactly, a
    scalar geometric sequence, whatever phi is.  Otherwise phi at +-2 gives
    the linear degenerate cases, phi inside the segment stays bounded, and
    phi off the segment grows exponentially in both directions.
    """
    w = phi_geodesic(a, g)
    if abs(w.sigma - a.mu) <= sigma_tol * (1.0 + abs(a.mu)):
        return GrowthClass.SCALAR_GEOMETRIC
    if abs(w.phi - 2.0) <= segment_tol:
        return GrowthClass.LINEAR_PLUS_2
    if abs(w.phi + 2.0) <= segment_tol:
        return GrowthClass.LINEAR_MINUS_2
    if segment_distance(w.phi) <= segment_tol:
        return GrowthClass.BOUNDED
    return GrowthClass.EXPONENTIAL_BOTH_ENDS


@dataclass(frozen=True)
class OrbitEntry:
    """One vertex of an orbit ball: its address, point, and overflow flag."""

    vertex: VertexAddress
    coords: tuple[complex, ...]
    overflowed: bool

    def to_json(self) -> dict:
        def pair(v: complex) -> list[float]:
            v = complex(v)
            return [v.real, v.imag]

        obj = {"v": list(self.vertex.word), "x": [pair(v) for v in self.coords]}
        if self.overflowed:
            obj["overflowed"] = True
        return obj


def orbit_enumerate(a: HurwitzPoint, depth: int) -> Iterator[OrbitEntry]:
    """Breadth-first orbit ball of radius ``depth`` around the base point.

    Integer inputs stay exact.  A vertex whose point has any coordinate of
    magnitude above OVERFLOW_CLAMP is emitted with ``overflowed`` set and its
    subtree is not expanded, so deep enumerations stay finite-valued at the
    cost of completeness past the clamp.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    n = a.n
    root_over = any(abs(v) > OVERFLOW_CLAMP for v in a.coords)
    yield OrbitEntry(VertexAddress(n), a.coords, root_over)
    frontier: list[tuple[Word, tuple[complex, ...]]] = []
    if not root_over:
        frontier.append(((), a.coords))
    for _ in range(depth):
        if not frontier:
            break
        nxt: list[tuple[Word, tuple[complex, ...]]] = []
        for word, coords in frontier:
            last = word[-1] if word else 0
            for c in range(1, n + 1):
                if c == last:
                    continue
                child = word + (c,)
                new = apply_generator(coords, c)
                over = any(abs(v) > OVERFLOW_CLAMP for v in new)
                yield OrbitEntry(VertexAddress(n, child), new, over)
                if not over:
                    nxt.append((child, new))
        frontier = nxt


def _ascending_tuples(k: int, cap: int, start: int = 1) -> Iterator[tuple[int, ...]]:
    """Ascending positive k-tuples with product at most cap."""
    if k == 0:
        yield ()
        return
    x = start
    while x <= cap:
        for rest in _ascending_tuples(k - 1, cap // x, x):
            yield (x,) + rest
        x += 1


def is_fundamental(tup: tuple[int, ...]) -> bool:
    """No Vieta move decreases the maximum coordinate."""
    top = max(tup)
    for i in range(len(tup)):
        others = math.prod(tup[:i] + tup[i + 1 :])
        flipped = others - tup[i]
        new_top = max(tup[:i] + (flipped,) + tup[i + 1 :])
        if new_top < top:
            return False
    return True


def fundamental_solutions(n: int) -> list[tuple[int, ...]]:
    """All positive solutions from which the Vieta moves only grow.

    For a sorted positive solution the two largest coordinates are pinned
    down: writing p for the product and s for the square sum of the first
    n-2 coordinates, minimality forces p <= 2(n-1), p >= 3 (smaller p makes
    the discriminant negative), and the second-largest coordinate t obeys
    t^2 (p - 2) <= s.  The largest then solves an explicit quadratic, so the
    whole search is finite and independent of any bound.
    """
    check_arity(n)
    found = set()
    for prefix in _ascending_tuples(n - 2, 2 * (n - 1)):
        p2 = math.prod(prefix)
        if p2 < 3:
            continue
        s2 = sum(x * x for x in prefix)
        t = prefix[-1]
        while t * t * (p2 - 2) <= s2:
            big_p = p2 * t
            s = s2 + t * t
            disc = big_p * big_p - 4 * s
            if disc >= 0:
                r = math.isqrt(disc)
                if r * r == disc:
                    for num in (big_p - r, big_p + r):
                        if num % 2 == 0:
                            x_n = num // 2
                            if x_n >= t:
                                cand = prefix + (t, x_n)
                                if hurwitz_form(cand) == 0 and is_fundamental(cand):
                                    found.add(cand)
            t += 1
    return sorted(found)


def integer_solutions(n: int, bound: int) -> set[tuple[int, ...]]:
    """Nonnegative integer solutions of the form with every coordinate <= bound.

    Tuples are returned sorted ascending and deduplicated up to permutation;
    the all-zero tuple is excluded (any other solution with a zero coordinate
    would force all coordinates to zero).  The search walks forward from the
    fundamental solutions: every solution descends to one by max-decreasing
    Vieta moves, and that descent never raises the maximum, so the forward
    closure below the bound is complete.
    """
    check_arity(n)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    found: set[tuple[int, ...]] = set()
    frontier = [f for f in fundamental_solutions(n) if f[-1] <= bound]
    found.update(frontier)
    while frontier:
        nxt = []
        for tup in frontier:
            for i in range(n):
                others = math.prod(tup[:i] + tup[i + 1 :])
                cand = tuple(sorted(tup[:i] + (others - tup[i],) + tup[i + 1 :]))
                if cand[-1] <= bound and cand not in found:
                    found.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return found
