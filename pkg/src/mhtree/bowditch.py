"""Membership in the domain of proper discontinuity.

A base point passes when (B1) no alternating geodesic has its product value
on the real segment [-2, 2], and (B2) the set A_phi(K) of geodesics with
|phi| <= K is finite for some K > 2.  Both are decided through the directed
tree: every edge points from the side with the larger coordinate modulus to
the smaller one, descent terminates in a sink, and A_phi(K) is edge-connected,
so a breadth-first search seeded anywhere in it enumerates all of it.  Each
member geodesic carries a finite window of edges outside of which its values
grow strictly; the union of those windows is the attracting tree certifying
properness.

Outcomes are honest: ``Infinite`` is returned only with a witness geodesic
that provably forces an infinite attracting tree (values on the segment, or
sigma = mu with small phi), and budget exhaustion is reported as such rather
than guessed either way.
"""

from __future__ import annotations

import cmath
import enum
import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .group import apply_generator
from .hurwitz import (
    SEGMENT_TOL,
    SIGMA_TOL,
    HurwitzPoint,
    coords_at_word,
    phi_geodesic,
    principal_eigenvalue,
    segment_distance,
)
from .tree import (
    DirectedEdge,
    FiniteSubtree,
    GeodesicAddress,
    VertexAddress,
    Word,
    canonical_geodesic,
    circular_set,
    geodesic_vertex_word,
)

DESCENT_BUDGET = 10**4
SEARCH_BUDGET = 10**6
MODULUS_TOL = 1e-12


class DihedralPointError(ValueError):
    """Every edge at the queried vertex is indecisive; forks are undefined."""


class SearchFailed(RuntimeError):
    """The A_phi(K) search did not complete; carries the search outcome."""

    def __init__(self, outcome):
        super().__init__(f"A_phi(K) search did not complete: {outcome!r}")
        self.outcome = outcome


def _to_complex(v) -> complex:
    """complex() that clamps exact integers too large for a float."""
    try:
        return complex(v)
    except OverflowError:
        return complex(math.copysign(1e300, 1 if v >= 0 else -1), 0.0)


@dataclass(frozen=True)
class EdgeDirection:
    """An edge with its flow direction: from larger to smaller modulus."""

    edge: DirectedEdge
    decisive: bool

    @property
    def points_to(self) -> Word:
        return self.edge.head


def direct_edge(a: HurwitzPoint, e: DirectedEdge) -> EdgeDirection:
    """Orient the edge toward the endpoint whose flipped coordinate is smaller.

    The two endpoint values of a color-c edge are x_c and (prod of the others)
    - x_c; the arrow runs from the larger modulus to the smaller.  Within
    tolerance the edge is indecisive and points at the endpoint with the
    lexicographically smaller word (the parent), which keeps runs reproducible.
    """
    parent, child = (e.tail, e.head) if len(e.tail) < len(e.head) else (e.head, e.tail)
    coords = coords_at_word(a.coords, parent)
    c = e.color
    value_parent = coords[c - 1]
    value_child = math.prod(v for k, v in enumerate(coords, 1) if k != c) - value_parent
    mp, mc = abs(value_parent), abs(value_child)
    tol = MODULUS_TOL * max(1.0, mp, mc)
    if abs(mp - mc) <= tol:
        return EdgeDirection(DirectedEdge(e.n, tail=child, color=c), decisive=False)
    if mp > mc:
        # Parent side is larger, so the arrow leaves it: head = child.
        return EdgeDirection(DirectedEdge(e.n, tail=parent, color=c), decisive=True)
    return EdgeDirection(DirectedEdge(e.n, tail=child, color=c), decisive=True)


def _directions_at(a: HurwitzPoint, word: Word, coords: Sequence[complex]):
    """For each color: (outward?, decisive, drop) relative to the given vertex."""
    out = []
    n = len(coords)
    for c in range(1, n + 1):
        here = coords[c - 1]
        other = math.prod(v for k, v in enumerate(coords, 1) if k != c) - here
        mh, mo = abs(here), abs(other)
        tol = MODULUS_TOL * max(1.0, mh, mo)
        if abs(mh - mo) <= tol:
            # Indecisive: points toward the smaller word.  The neighbor is
            # smaller only when c cancels the last letter.
            outward = bool(word) and word[-1] == c
            out.append((c, outward, False, 0.0))
        else:
            out.append((c, mh > mo, True, mh - mo))
    return out


@dataclass(frozen=True)
class Sink:
    vertex: VertexAddress


@dataclass(frozen=True)
class FoundSmall:
    geodesic: GeodesicAddress
    phi: complex


@dataclass(frozen=True)
class BudgetExceeded:
    note: str
    partial: object = None


def _small_pair_at(
    a: HurwitzPoint, word: Word, coords: Sequence[complex], threshold: float
):
    n = len(coords)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            phi = math.prod(_to_complex(v) for k, v in enumerate(coords, 1) if k != i and k != j)
            if abs(phi) <= threshold:
                g = canonical_geodesic(VertexAddress(n, word), (i, j))
                return FoundSmall(g, phi)
    return None


def descend_to_sink(
    a: HurwitzPoint,
    start: VertexAddress | None = None,
    budget: int = DESCENT_BUDGET,
    small_threshold: float = 2.0 + SEGMENT_TOL,
):
    """Walk the directed tree downhill until it stops.

    At each vertex the steepest decisively-outward edge is crossed (ties to
    the smallest color); with none, an indecisively-outward edge leads to the
    parent.  The walk stops at a sink, or early at any vertex carrying a
    geodesic with |phi| <= small_threshold, or when the budget runs out.
    Termination is guaranteed off-budget: decisive steps strictly shrink the
    crossed coordinate and indecisive steps strictly shrink the word.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    v = start if start is not None else VertexAddress(a.n)
    word = v.word
    coords = coords_at_word(a.coords, word)
    path = [word]
    for _ in range(budget):
        small = _small_pair_at(a, word, coords, small_threshold)
        if small is not None:
            return small
        moves = _directions_at(a, word, coords)
        best = None
        for c, outward, decisive, drop in moves:
            if outward and decisive and (best is None or drop > best[1]):
                best = (c, drop)
        if best is None:
            for c, outward, decisive, _ in moves:
                if outward and not decisive:
                    best = (c, 0.0)
                    break
        if best is None:
            return Sink(VertexAddress(a.n, word))
        c = best[0]
        if word and word[-1] == c:
            # Rootward step.  The incremental flip subtracts two nearly equal
            # huge products and can lose every significant digit, so rebuild
            # the coordinates from the root, where every step is a stable
            # forward application.
            word = word[:-1]
            coords = coords_at_word(a.coords, word)
        else:
            word = word + (c,)
            coords = apply_generator(coords, c)
        path.append(word)
    return BudgetExceeded("descent budget exhausted", partial=path)


def fork_check(a: HurwitzPoint, v: VertexAddress) -> list[GeodesicAddress]:
    """Geodesics [v; {i,j}] over pairs of outward edges at v; each has |phi| <= 2.

    Raises DihedralPointError when every edge at v is indecisive (degenerate
    points where no direction carries information).
    """
    coords = coords_at_word(a.coords, v.word)
    moves = _directions_at(a, v.word, coords)
    if all(not decisive for _, _, decisive, _ in moves):
        raise DihedralPointError(f"all edges at {v.word} are indecisive")
    outward = [c for c, out, _, _ in moves if out]
    forks = []
    for idx, i in enumerate(outward):
        for j in outward[idx + 1 :]:
            g = canonical_geodesic(v, (i, j))
            w = phi_geodesic(a, g)
            assert abs(w.phi) <= 2.0 + 1e-12 * (1.0 + abs(w.phi)), (
                f"fork at {v.word} over colors {i},{j} has |phi| = {abs(w.phi)} > 2"
            )
            forks.append(g)
    return forks


@dataclass(frozen=True)
class Complete:
    members: frozenset[GeodesicAddress]
    sink: Word | None = None


@dataclass(frozen=True)
class Infinite:
    """A witness that the point fails: its attracting tree cannot be finite."""

    witness: GeodesicAddress
    phi: complex
    reason: str  # "segment-phi" or "sigma-equals-mu"


@dataclass(frozen=True)
class _GeodesicData:
    low: int
    high: int
    root_word: Word
    phi: complex
    sigma: complex
    lam: complex
    y0: complex
    ym1: complex
    z_colors: tuple[int, ...]
    z_values: tuple[complex, ...]


def _geodesic_data(a: HurwitzPoint, g: GeodesicAddress) -> _GeodesicData:
    coords = [_to_complex(v) for v in coords_at_word(a.coords, g.root_word)]
    z_colors = tuple(k for k in range(1, a.n + 1) if k not in g.colors)
    z_values = tuple(coords[k - 1] for k in z_colors)
    phi = math.prod(z_values)
    sigma = sum(z * z for z in z_values)
    return _GeodesicData(
        low=g.low,
        high=g.high,
        root_word=g.root_word,
        phi=phi,
        sigma=sigma,
        lam=principal_eigenvalue(phi),
        y0=coords[g.high - 1],
        ym1=coords[g.low - 1],
        z_colors=z_colors,
        z_values=z_values,
    )


def _is_sigma_mu(a: HurwitzPoint, sigma: complex) -> bool:
    return abs(sigma - a.mu) <= SIGMA_TOL * (1.0 + abs(a.mu))


def _scan_window(data: _GeodesicData, threshold: float, max_steps: int):
    """All indices m with |y_m| <= threshold, or None if max_steps ran out.

    y_m = A lam^m + B lam^{-m}.  The scan starts at the balance point of the
    two terms, where |y| is smallest, and walks outward with the three-term
    recurrence (stable in the growing direction) until the guaranteed lower
    bound |A||lam|^m - |B||lam|^{-m} clears the threshold.
    """
    lam = data.lam
    phi = data.phi
    y1 = phi * data.y0 - data.ym1
    denom = lam - 1.0 / lam
    A = (y1 - data.y0 / lam) / denom
    B = data.y0 - A
    abs_lam = abs(lam)
    log_lam = math.log(abs_lam)
    if abs(A) == 0.0 or abs(B) == 0.0:
        # Geometric degenerate case; callers handle sigma == mu before this.
        return None
    center = round(math.log(abs(B) / abs(A)) / (2.0 * log_lam))
    log_l = cmath.log(lam)
    log_a = cmath.log(A)
    log_b = cmath.log(B)

    def closed_form(m: int) -> complex:
        t1 = log_a + m * log_l
        t2 = log_b - m * log_l
        v1 = cmath.exp(t1) if t1.real < 700 else cmath.exp(complex(700, t1.imag))
        v2 = cmath.exp(t2) if t2.real < 700 else cmath.exp(complex(700, t2.imag))
        return v1 + v2

    def beyond(m: int, sign: int) -> bool:
        # True when no index at or past m (in the sign direction) can satisfy
        # |y| <= threshold: the growing term alone clears threshold + |other|.
        la = math.log(abs(A)) if sign > 0 else math.log(abs(B))
        grow_log = la + (m if sign > 0 else -m) * log_lam
        if grow_log > 700:
            return True
        grow_val = math.exp(grow_log)
        other_log = (math.log(abs(B)) if sign > 0 else math.log(abs(A))) - (
            (m if sign > 0 else -m) * log_lam
        )
        other_val = math.exp(other_log) if other_log > -700 else 0.0
        return grow_val - other_val > threshold

    window: dict[int, complex] = {}
    steps = 0
    y_c = closed_form(center)
    y_cn = closed_form(center + 1)
    # Forward sweep from the center.
    y_prev, y_cur = y_c, y_cn
    m = center
    while True:
        steps += 1
        if steps > max_steps:
            return None
        if abs(y_prev) <= threshold:
            window[m] = y_prev
        if beyond(m, +1):
            break
        y_prev, y_cur = y_cur, phi * y_cur - y_prev
        m += 1
    # Backward sweep from just below the center.
    y_cur, y_next = closed_form(center - 1), y_c
    m = center - 1
    while True:
        steps += 1
        if steps > max_steps:
            return None
        if abs(y_cur) <= threshold:
            window[m] = y_cur
        if beyond(m, -1):
            break
        y_cur, y_next = phi * y_cur - y_next, y_cur
        m -= 1
    return window


def h_mu_bounds(
    a: HurwitzPoint,
    g: GeodesicAddress,
    t: float | None = None,
    K: float | None = None,
) -> float:
    """The value-window radius of g: base, search (K), or attracting (t) form.

    Base: sqrt|sigma - mu| / sqrt|phi^2 - 4| * 2|lam|^2 / (|lam| - 1), infinite
    when phi lies on [-2, 2] or sigma == mu.  With K: raised to the largest
    radius at which a geodesic sharing an edge can still have |phi| <= K.
    With t: base + t, raised likewise for the 2 + t threshold.  Monotone
    nondecreasing in t.
    """
    if t is not None and K is not None:
        raise ValueError("pass at most one of t and K")
    if t is not None and t < 0:
        raise ValueError("t must be nonnegative")
    data = _geodesic_data(a, g)
    if _is_sigma_mu(a, data.sigma) or segment_distance(data.phi) <= SEGMENT_TOL:
        return math.inf
    base = _h_mu_base(a, data)
    if K is None and t is None:
        return base
    level = K if K is not None else 2.0 + t
    add = t if t is not None else 0.0
    neighbor = _neighbor_radius(data, level)
    return max(base + add, neighbor)


def _h_mu_base(a: HurwitzPoint, data: _GeodesicData) -> float:
    phi = data.phi
    abs_phi = abs(phi)
    abs_lam = abs(data.lam)
    # sqrt|phi^2 - 4| without forming phi^2 when it would overflow.
    if abs_phi > 1e100:
        root_disc = abs_phi
    else:
        root_disc = math.sqrt(abs(phi * phi - 4.0))
    amplitude = math.sqrt(abs(data.sigma - a.mu)) / root_disc
    return amplitude * 2.0 * abs_lam * (abs_lam / (abs_lam - 1.0))


def _neighbor_radius(data: _GeodesicData, level: float) -> float:
    """max over missing colors l of level / |prod of the other constant values|."""
    if not data.z_values:
        return level
    best = 0.0
    full = math.prod(data.z_values)
    for zl in data.z_values:
        denom = abs(full / zl) if zl != 0 else 0.0
        if denom == 0.0:
            return math.inf
        best = max(best, level / denom)
    return best


def search_A_phi_K(
    a: HurwitzPoint,
    K: float,
    budget: int = SEARCH_BUDGET,
    descent_budget: int = DESCENT_BUDGET,
):
    """Enumerate A_phi(K) = {geodesics with |phi| <= K}, K > 2.

    Descent from the root either finds a member (seeding the search) or a
    sink all of whose geodesics exceed K, which forces A_phi(K) to be empty:
    a hypothetical member at minimal distance from the sink would produce a
    fork along the connecting path, and the fork geodesic would be a strictly
    closer member.  From a seed, the breadth-first walk over edge-sharing
    neighbors is complete because A_phi(K) is edge-connected for K >= 2.

    Returns Complete(members), Infinite(witness) when a member proves the
    attracting tree infinite (phi on the segment, or sigma == mu), or
    BudgetExceeded with the partial member set.
    """
    if K <= 2.0:
        raise ValueError(f"K must exceed 2, got {K}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    seed_result = descend_to_sink(a, budget=descent_budget, small_threshold=K)
    if isinstance(seed_result, Sink):
        return Complete(frozenset(), sink=seed_result.vertex.word)
    if isinstance(seed_result, BudgetExceeded):
        return BudgetExceeded("descent budget exhausted before a seed or sink", partial=frozenset())
    seed = seed_result.geodesic

    members: set[GeodesicAddress] = set()
    queue: deque[GeodesicAddress] = deque([seed])
    seen = {seed}
    spent = 0
    while queue:
        g = queue.popleft()
        data = _geodesic_data(a, g)
        if abs(data.phi) > K + MODULUS_TOL * (1.0 + K):
            continue
        if segment_distance(data.phi) <= SEGMENT_TOL:
            return Infinite(g, data.phi, "segment-phi")
        if _is_sigma_mu(a, data.sigma):
            return Infinite(g, data.phi, "sigma-equals-mu")
        members.add(g)
        # The same slack used to admit candidates widens the scan radius, so
        # borderline neighbors cannot fall just outside the scanned window.
        k_eff = K + MODULUS_TOL * (1.0 + K)
        radius = max(_h_mu_base(a, data), _neighbor_radius(data, k_eff))
        window = _scan_window(data, radius, max_steps=budget - spent)
        if window is None:
            return BudgetExceeded("window scan exhausted the budget", partial=frozenset(members))
        spent += len(window) + 1
        if spent > budget:
            return BudgetExceeded("expansion budget exhausted", partial=frozenset(members))
        full_z = math.prod(data.z_values)
        for m, y in window.items():
            edge_color = data.low if m % 2 == 0 else data.high
            v_m = geodesic_vertex_word(data.root_word, data.low, data.high, m)
            for idx, l in enumerate(data.z_colors):
                zl = data.z_values[idx]
                phi_b = y * (full_z / zl)
                if abs(phi_b) > K + MODULUS_TOL * (1.0 + K):
                    continue
                lo, hi = (edge_color, l) if edge_color < l else (l, edge_color)
                cand = canonical_geodesic(VertexAddress(a.n, v_m), (lo, hi))
                if cand not in seen:
                    seen.add(cand)
                    queue.append(cand)
                    spent += 1
    return Complete(frozenset(members), sink=None)


class WholeGeodesic:
    """Marker: the value window covers the entire geodesic (radius infinite)."""

    def __repr__(self) -> str:
        return "WholeGeodesic"


WHOLE_GEODESIC = WholeGeodesic()


@dataclass(frozen=True)
class JInterval:
    """Contiguous edge indices lo..hi of a geodesic whose values stay small."""

    lo: int
    hi: int

    def edge_count(self) -> int:
        return self.hi - self.lo + 1

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


def j_interval(a: HurwitzPoint, g: GeodesicAddress, t: float):
    """The maximal contiguous edge window {m : |y_m| <= radius(t)} of g.

    Returns WHOLE_GEODESIC when the radius is infinite, None when the window
    is empty (the geodesic is not in A_phi(2+t)).  Edges outside the window
    are checked to point back toward it.
    """
    radius = h_mu_bounds(a, g, t=t)
    if math.isinf(radius):
        return WHOLE_GEODESIC
    data = _geodesic_data(a, g)
    window = _scan_window(data, radius, max_steps=10**6)
    if window is None:
        raise SearchFailed(BudgetExceeded("window scan did not terminate"))
    if not window:
        return None
    ms = sorted(window)
    lo, hi = ms[0], ms[-1]
    assert ms == list(range(lo, hi + 1)), f"window {ms} is not contiguous"
    for m in (lo - 3, lo - 2, lo - 1, hi + 1, hi + 2, hi + 3):
        _assert_edge_points_at_window(a, g, m, lo, hi)
    return JInterval(lo, hi)


def _assert_edge_points_at_window(
    a: HurwitzPoint, g: GeodesicAddress, m: int, lo: int, hi: int
) -> None:
    tail = geodesic_vertex_word(g.root_word, g.low, g.high, m)
    color = g.low if m % 2 == 0 else g.high
    d = direct_edge(a, DirectedEdge(g.n, tail=tail, color=color))
    toward = d.points_to
    # The window-side endpoint of edge m is vertex m+1 when m < lo, vertex m when m > hi.
    window_side = geodesic_vertex_word(g.root_word, g.low, g.high, m + 1 if m < lo else m)
    assert toward == window_side, (
        f"edge {m} of {g} points at {toward}, expected the window side {window_side}"
    )


@dataclass(frozen=True)
class AttractingTree:
    """The finite union of value windows; every boundary edge flows into it."""

    tree: FiniteSubtree
    parameter_t: float
    intervals: Mapping[GeodesicAddress, JInterval]
    sink: Word | None = None

    @property
    def vertices(self) -> frozenset[Word]:
        return self.tree.vertices

    def edges(self) -> list[tuple[Word, int]]:
        return self.tree.edges()

    def to_json(self) -> dict:
        return {
            "t": self.parameter_t,
            "vertices": sorted(list(w) for w in self.tree.vertices),
            "edges": [[list(w), c] for w, c in self.tree.edges()],
            "intervals": [
                {"geodesic": g.to_json(), "window": j.to_json()}
                for g, j in sorted(
                    self.intervals.items(), key=lambda kv: (kv[0].root_word, kv[0].colors)
                )
            ],
        }


def attracting_tree(a: HurwitzPoint, t: float, budget: int = SEARCH_BUDGET) -> AttractingTree:
    """Build the attracting subtree for parameter t > 0.

    Runs the A_phi(2+t) search and unions the member windows; with no members
    the tree is the lone sink vertex.  Connectivity and the inward,
    decisive direction of every boundary edge are asserted, since the theory
    guarantees both for any point whose search completes.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    outcome = search_A_phi_K(a, 2.0 + t, budget=budget)
    if not isinstance(outcome, Complete):
        raise SearchFailed(outcome)
    return _tree_from_members(a, t, outcome)


def _tree_from_members(a: HurwitzPoint, t: float, outcome: Complete) -> AttractingTree:
    if not outcome.members:
        sink = outcome.sink if outcome.sink is not None else ()
        tree = FiniteSubtree(a.n, frozenset({sink}))
        result = AttractingTree(tree, t, {}, sink=sink)
    else:
        vertices: set[Word] = set()
        intervals: dict[GeodesicAddress, JInterval] = {}
        for g in sorted(outcome.members, key=lambda g: (g.root_word, g.colors)):
            j = j_interval(a, g, t)
            assert isinstance(j, JInterval), (
                f"member {g} of A_phi(2+t) has window {j!r}; expected a finite nonempty window"
            )
            intervals[g] = j
            for m in range(j.lo, j.hi + 2):
                vertices.add(geodesic_vertex_word(g.root_word, g.low, g.high, m))
        tree = FiniteSubtree(a.n, frozenset(vertices))
        result = AttractingTree(tree, t, intervals, sink=outcome.sink)
    for e in circular_set(result.tree):
        d = direct_edge(a, e)
        assert d.decisive, f"boundary edge {e} of the attracting tree is indecisive"
        assert d.points_to == e.head, (
            f"boundary edge {e} of the attracting tree points outward"
        )
    return result


class Status(enum.Enum):
    IN_DOMAIN = "InDomain"
    NOT_IN_DOMAIN = "NotInDomain"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class DomainWitness:
    kind: str  # "segment-phi" | "sigma-equals-mu" | "budget"
    geodesic: GeodesicAddress | None = None
    phi: complex | None = None
    note: str = ""

    def to_json(self) -> dict:
        obj: dict = {"kind": self.kind}
        if self.geodesic is not None:
            obj["geodesic"] = self.geodesic.to_json()
        if self.phi is not None:
            obj["phi"] = [complex(self.phi).real, complex(self.phi).imag]
        if self.note:
            obj["note"] = self.note
        return obj


@dataclass(frozen=True)
class MembershipVerdict:
    status: Status
    K: float
    witness: DomainWitness | None = None
    tree: AttractingTree | None = None
    a_phi_K: frozenset[GeodesicAddress] | None = None

    def to_json(self) -> dict:
        obj: dict = {"status": self.status.value, "K": self.K}
        if self.a_phi_K is not None:
            obj["aphiK"] = [
                g.to_json()
                for g in sorted(self.a_phi_K, key=lambda g: (g.root_word, g.colors))
            ]
        if self.tree is not None:
            obj["tree"] = self.tree.to_json()
        if self.witness is not None:
            obj["witness"] = self.witness.to_json()
        return obj


def is_in_domain(a: HurwitzPoint, K: float, budget: int = SEARCH_BUDGET) -> MembershipVerdict:
    """Decide membership in the domain of proper discontinuity at level K > 2.

    InDomain requires the A_phi(K) search to complete with every member off
    the segment and away from sigma == mu, plus a successfully built
    attracting tree.  NotInDomain always carries a witness geodesic.  Budget
    exhaustion and failed tree assertions yield Undetermined, never a guess.
    """
    if K <= 2.0:
        raise ValueError(f"K must exceed 2, got {K}")
    outcome = search_A_phi_K(a, K, budget=budget)
    if isinstance(outcome, Infinite):
        return MembershipVerdict(
            Status.NOT_IN_DOMAIN,
            K,
            witness=DomainWitness(outcome.reason, outcome.witness, outcome.phi),
        )
    if isinstance(outcome, BudgetExceeded):
        return MembershipVerdict(
            Status.UNDETERMINED,
            K,
            witness=DomainWitness("budget", note=outcome.note),
        )
    try:
        tree = _tree_from_members(a, K - 2.0, outcome)
    except (AssertionError, SearchFailed, ValueError) as exc:
        return MembershipVerdict(
            Status.UNDETERMINED,
            K,
            witness=DomainWitness("budget", note=f"attracting tree construction failed: {exc}"),
            a_phi_K=outcome.members,
        )
    return MembershipVerdict(Status.IN_DOMAIN, K, tree=tree, a_phi_K=outcome.members)
