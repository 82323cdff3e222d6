"""McShane-type identity evaluation over the tree.

Three layers, from exact to asymptotic.  The finite-tree identity is pure
algebra: for any finite subtree, edge weights on the boundary minus vertex
weights inside sum to one at machine precision, with no membership
assumption.  The infinite identities replace boundary edge weights with
per-geodesic summands (h of the geodesic product, or its weighted variant)
and converge absolutely for points in the domain of proper discontinuity;
this module evaluates their partial sums shell by shell and reports
residuals together with absolute-value sums, so convergence is exhibited
rather than assumed.

Summands attached to objects whose weights exceed 1e150 in modulus are
recorded as zero: their true contribution is below 1e-290 and the float
product would otherwise overflow to infinity and poison the sum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .bowditch import SEARCH_BUDGET, Status, is_in_domain
from .group import apply_generator
from .hurwitz import (
    SEGMENT_TOL,
    SIGMA_TOL,
    HurwitzPoint,
    coords_at_word,
    phi_geodesic,
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
    fibonacci,
    geodesics_through_vertex,
    geodesics_up_to_depth,
    vertex_words_at_depth,
)

VALUE_PRUNE = 1e150
_LOG_PRUNE = math.log(VALUE_PRUNE)
_DROP_LOG = math.log(1e-30)


class SigmaPoleError(ValueError):
    """sigma(gamma) = mu with mu nonzero: the summand has a pole there.

    Points in the domain of proper discontinuity never produce this, so
    hitting it is a diagnostic that the base point fails membership.
    """


def h(z: complex) -> complex:
    """1 - sqrt(1 - 4/z^2) with the nonnegative-real-part square root.

    Defined off the real segment [-2, 2]; even in z; h(z) ~ 2/z^2 for large z.
    """
    z = complex(z)
    if segment_distance(z) <= SEGMENT_TOL:
        raise ValueError(f"h is undefined on the segment [-2, 2]; got {z}")
    return 1.0 - cmath.sqrt(1.0 - 4.0 / (z * z))


@dataclass(frozen=True)
class EdgeWeight:
    """The directed edge weight psi, with the geodesic its estimate leans on."""

    psi: complex
    gamma_ref: GeodesicAddress


def psi_directed(a: HurwitzPoint, e: DirectedEdge) -> EdgeWeight:
    """The edge weight psi(e) = x_i(head) / prod of the other head coordinates.

    The quotient is the defining value for either orientation, and the two
    orientations of an edge sum to one.  When the edge is given in its
    flow orientation (head value no larger than tail value) the closed-form
    root psi = (1 - sqrt(1 - 4 (S - mu)/Q^2))/2 is also computed and checked
    against the quotient.  gamma_ref is the geodesic through the head used by
    the psi-versus-h/2 comparison: colors {edge color, rootward color of the
    head}, falling back to the smallest other color at the root.
    """
    if e.n != a.n:
        raise ValueError(f"arity mismatch: point has {a.n}, edge has {e.n}")
    coords = coords_at_word(a.coords, e.head)
    i = e.color
    q_prod = math.prod(v for k, v in enumerate(coords, 1) if k != i)
    if q_prod == 0:
        raise ValueError(
            f"coordinate product at {e.head} omitting color {i} vanishes; "
            "psi is undefined (the edge weight has value zero)"
        )
    x_head = coords[i - 1]
    psi = x_head / q_prod
    x_tail = q_prod - x_head
    directed = abs(x_tail) >= abs(x_head) * (1.0 - 1e-9)
    if directed and abs(q_prod) < VALUE_PRUNE:
        s_sum = sum(v * v for k, v in enumerate(coords, 1) if k != i)
        p = (s_sum - a.mu) / (q_prod * q_prod)
        closed = 0.5 * (1.0 - cmath.sqrt(1.0 - 4.0 * p))
        assert abs(psi - closed) <= 1e-9 * (1.0 + abs(psi)), (
            f"psi quotient {psi} disagrees with the closed-form root {closed}"
        )
    last = e.head[-1] if e.head else None
    j = last if (last is not None and last != i) else min(
        k for k in range(1, a.n + 1) if k != i
    )
    pair = (i, j) if i < j else (j, i)
    gamma_ref = canonical_geodesic(VertexAddress(a.n, e.head), pair)
    return EdgeWeight(psi=psi, gamma_ref=gamma_ref)


@dataclass(frozen=True)
class IdentityReport:
    """One truncation level: what was summed and how far from the target."""

    depth_or_tree: str
    partial_sum: complex
    residual: complex
    term_count: int
    absolute_term_sum: float
    target: complex = 1.0 + 0.0j

    def to_json(self) -> dict:
        return {
            "truncation": self.depth_or_tree,
            "partial_sum": [self.partial_sum.real, self.partial_sum.imag],
            "target": [complex(self.target).real, complex(self.target).imag],
            "residual": [self.residual.real, self.residual.imag],
            "terms": self.term_count,
            "absolute_sum": self.absolute_term_sum,
        }


def _fsum_complex(terms: Sequence[complex]) -> complex:
    return complex(
        math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)
    )


def _report(desc: str, terms: Sequence[complex], target: complex) -> IdentityReport:
    partial = _fsum_complex(terms)
    return IdentityReport(
        depth_or_tree=desc,
        partial_sum=partial,
        residual=partial - target,
        term_count=len(terms),
        absolute_term_sum=math.fsum(abs(t) for t in terms),
        target=complex(target),
    )


def finite_tree_identity(a: HurwitzPoint, tree: FiniteSubtree) -> IdentityReport:
    """Boundary edge weights minus vertex weights over a finite subtree.

    Sum of psi over the inward-directed boundary edges, minus mu / (product
    of all coordinates) over the vertices, equals one exactly; the residual
    is pure rounding.  Holds for every base point with nonvanishing vertex
    products, with no membership condition.
    """
    if tree.n != a.n:
        raise ValueError(f"arity mismatch: point has {a.n}, subtree has {tree.n}")
    terms: list[complex] = []
    for word in sorted(tree.vertices, key=lambda w: (len(w), w)):
        coords = coords_at_word(a.coords, word)
        weight = math.prod(coords)
        if weight == 0:
            raise ValueError(f"vertex weight vanishes at {word}")
        terms.append(-a.mu / weight)
    for e in circular_set(tree):
        terms.append(psi_directed(a, e).psi)
    return _report(f"subtree with {len(tree)} vertices", terms, 1.0)


def _frak_value(phi: complex, sigma: complex, mu: complex, q: complex) -> complex:
    if segment_distance(phi) <= SEGMENT_TOL:
        raise ValueError(f"weight {phi} lies on the segment [-2, 2]")
    root = cmath.sqrt(1.0 - 4.0 / (phi * phi))
    if mu == 0:
        return 1.0 - root
    if abs(sigma - mu) <= SIGMA_TOL * (1.0 + abs(mu)):
        raise SigmaPoleError(
            f"sigma = {sigma} equals mu = {mu}: summand pole; "
            "the base point is outside the membership region"
        )
    return 1.0 - (1.0 + q * mu / (sigma - mu)) * root


def frak_h(a: HurwitzPoint, g: GeodesicAddress, q: complex) -> complex:
    """The weighted geodesic summand 1 - (1 + q mu/(sigma - mu)) sqrt(1 - 4/phi^2).

    With q = 2/(n(n-1)) these summands alone sum to one over all geodesics;
    with mu = 0 or q = 0 the value reduces to h(phi).
    """
    w = phi_geodesic(a, g)
    return _frak_value(w.phi, w.sigma, a.mu, q)


@dataclass(frozen=True)
class McShaneH:
    """Per-geodesic h terms plus per-vertex mu/weight corrections; target 1."""


@dataclass(frozen=True)
class FrakH:
    """Weighted per-geodesic terms only; q per color pair, None for uniform."""

    q: Mapping[tuple[int, int], complex] | None = None


@dataclass(frozen=True)
class RelativeEdge:
    """One edge weight psi as a sum over geodesics on the tail side; target psi."""

    edge: DirectedEdge


def _uniform_q(n: int) -> float:
    return 2.0 / (n * (n - 1))


def _normalized_q(variant: FrakH, n: int) -> dict[tuple[int, int], complex]:
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    if variant.q is None:
        return {p: complex(_uniform_q(n)) for p in pairs}
    q = {tuple(sorted(k)): complex(v) for k, v in variant.q.items()}
    if set(q) != set(pairs):
        raise ValueError("q must assign a value to every color pair")
    total = sum(q.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"q values must sum to 1, got {total}")
    return q


def _split_mag(v: complex) -> tuple[float, float]:
    """(log modulus, argument) of a nonzero value; infinite for overflowed input."""
    if isinstance(v, complex):
        if not cmath.isfinite(v):
            return math.inf, 0.0
        m = abs(v)
        if math.isinf(m):
            return math.inf, 0.0
        return math.log(m), cmath.phase(v)
    if isinstance(v, float) and not math.isfinite(v):
        return math.inf, 0.0
    return math.log(abs(v)), 0.0 if v > 0 else math.pi


def _geodesic_term(
    a: HurwitzPoint,
    g: GeodesicAddress,
    qmap: dict[tuple[int, int], complex] | None,
) -> complex:
    """One summand, evaluated through log modulus and argument.

    Working in the log domain keeps intermediate products of mixed huge and
    tiny coordinates inside floating range at a relative cost around 1e-15,
    far below every tolerance in play.  A weight whose log modulus exceeds
    the prune threshold contributes below 1e-290 through its h part and is
    recorded as zero; the weighted variant additionally checks that its
    mu/(sigma - mu) part is negligible before dropping, and refuses the
    point honestly when it is not.
    """
    coords = coords_at_word(a.coords, g.root_word)
    logs = []
    args = []
    for k, v in enumerate(coords, 1):
        if k == g.low or k == g.high:
            continue
        if v == 0:
            raise ValueError(f"geodesic weight vanishes at {g}")
        lg, ar = _split_mag(v)
        logs.append(lg)
        args.append(ar)
    total = math.fsum(logs)
    if total > _LOG_PRUNE:
        if qmap is not None and a.mu:
            top = max(logs)
            sigma_floor = 2.0 * top - math.log(len(logs))
            mu_log, _ = _split_mag(a.mu)
            if mu_log - sigma_floor > _DROP_LOG:
                raise ValueError(
                    f"weighted summand at {g} lies outside the reliable "
                    "floating range"
                )
        return 0.0j
    phi = cmath.exp(complex(total, math.fsum(args)))
    if qmap is None:
        return h(phi)
    top = max(logs)
    if top > 350.0:
        # The largest square alone sets sigma to hundreds of digits here,
        # and at this size only its order of magnitude matters.
        i_top = logs.index(top)
        sigma = cmath.exp(complex(2.0 * logs[i_top], 2.0 * args[i_top]))
    else:
        sigma = sum(
            complex(v) * complex(v)
            for k, v in enumerate(coords, 1)
            if k != g.low and k != g.high
        )
    return _frak_value(phi, sigma, a.mu, qmap[(g.low, g.high)])


def _vertex_term(a: HurwitzPoint, coords: Sequence[complex], word: Word) -> complex:
    if not a.mu:
        return 0.0j
    logs = []
    args = []
    for v in coords:
        if v == 0:
            raise ValueError(f"vertex weight vanishes at {word}")
        lg, ar = _split_mag(v)
        logs.append(lg)
        args.append(ar)
    mu_log, mu_arg = _split_mag(a.mu)
    scale = mu_log - math.fsum(logs)
    if scale < -_LOG_PRUNE:
        return 0.0j
    if scale > _LOG_PRUNE:
        raise ValueError(f"vertex summand at {word} exceeds the floating range")
    return -cmath.exp(complex(scale, mu_arg - math.fsum(args)))


def _vertex_shells(a, sources, max_shell):
    """Vertices grouped by tree distance from the source set, with coordinates.

    Rootward steps rebuild coordinates from the root: the incremental flip
    subtracts nearly equal products and can lose every digit.
    """
    coords = {w: coords_at_word(a.coords, w) for w in sources}
    shells = [sorted(sources, key=lambda w: (len(w), w))]
    seen = set(shells[0])
    for _ in range(max_shell):
        nxt = []
        for w in shells[-1]:
            for c in range(1, a.n + 1):
                if w and w[-1] == c:
                    u = w[:-1]
                    if u in seen:
                        continue
                    coords[u] = coords_at_word(a.coords, u)
                else:
                    u = w + (c,)
                    if u in seen:
                        continue
                    coords[u] = apply_generator(coords[w], c)
                seen.add(u)
                nxt.append(u)
        shells.append(sorted(nxt, key=lambda w: (len(w), w)))
    return shells, coords


def identity_partial_sums(
    a: HurwitzPoint,
    max_depth: int,
    variant: McShaneH | FrakH | RelativeEdge | None = None,
    t: float = 0.5,
    center: str = "tree",
    unverified_ok: bool = False,
    budget: int = SEARCH_BUDGET,
) -> list[IdentityReport]:
    """Partial sums of the chosen identity, one report per truncation shell.

    Shell m covers the geodesics within tree distance m of the center and,
    for the h-plus-vertex variant, the vertices within distance m+1.  The
    center is the attracting tree from the membership certificate at level
    2 + t; with unverified_ok the certificate step is skipped and shells are
    centered on the root vertex instead.  A point that fails verification is
    refused unless unverified_ok is set.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be nonnegative")
    if center not in ("tree", "root"):
        raise ValueError(f"center must be 'tree' or 'root', got {center!r}")
    if variant is None:
        variant = McShaneH()
    tree_vertices = None
    if not unverified_ok:
        verdict = is_in_domain(a, 2.0 + t, budget=budget)
        if verdict.status is not Status.IN_DOMAIN:
            raise ValueError(
                f"point not verified in the domain (status {verdict.status.value}); "
                "pass unverified_ok=True to sum anyway"
            )
        tree_vertices = verdict.tree.vertices
    if isinstance(variant, RelativeEdge):
        return _relative_edge_sums(a, max_depth, variant.edge)
    if center == "tree" and tree_vertices is None:
        center = "root"
    sources = set(tree_vertices) if center == "tree" else {()}
    center_desc = "attracting tree" if center == "tree" else "root vertex"
    shells, coords = _vertex_shells(a, sources, max_depth + 1)

    qmap = _normalized_q(variant, a.n) if isinstance(variant, FrakH) else None
    geo_term_shell: list[list[complex]] = []
    seen_geo: set[GeodesicAddress] = set()
    for m in range(max_depth + 1):
        row = []
        for w in shells[m]:
            for g in geodesics_through_vertex(VertexAddress(a.n, w)):
                if g not in seen_geo:
                    seen_geo.add(g)
                    row.append(_geodesic_term(a, g, qmap))
        geo_term_shell.append(row)
    vertex_term_shell: list[list[complex]] = []
    if isinstance(variant, McShaneH):
        for m in range(max_depth + 2):
            vertex_term_shell.append(
                [_vertex_term(a, coords[w], w) for w in shells[m]]
            )

    reports = []
    terms: list[complex] = []
    for row in vertex_term_shell[:1]:
        terms.extend(row)
    for m in range(max_depth + 1):
        terms.extend(geo_term_shell[m])
        if vertex_term_shell:
            terms.extend(vertex_term_shell[m + 1])
        reports.append(
            _report(f"distance <= {m} from the {center_desc}", terms.copy(), 1.0)
        )
    return reports


def _relative_edge_sums(
    a: HurwitzPoint, max_depth: int, e: DirectedEdge
) -> list[IdentityReport]:
    """psi(e) as half-weight terms through the edge plus tail-side terms."""
    n = a.n
    target = psi_directed(a, e).psi
    parent, child = (
        (e.tail, e.head) if len(e.tail) < len(e.head) else (e.head, e.tail)
    )
    through = {
        canonical_geodesic(
            VertexAddress(n, parent), (e.color, l) if e.color < l else (l, e.color)
        )
        for l in range(1, n + 1)
        if l != e.color
    }
    far = e.tail

    def in_far_side(word: Word) -> bool:
        extends_child = word[: len(child)] == child
        return extends_child if far == child else not extends_child

    q = _uniform_q(n)
    shells, _ = _vertex_shells_component(a, far, parent, child, max_depth)
    seen: set[GeodesicAddress] = set()
    reports = []
    terms: list[complex] = [0.5 * _geodesic_term(a, g, {_pair(g): q}) for g in sorted(
        through, key=lambda g: (g.root_word, g.colors)
    )]
    for m in range(max_depth + 1):
        for w in shells[m]:
            for g in geodesics_through_vertex(VertexAddress(n, w)):
                if g in seen or g in through or not in_far_side(g.root_word):
                    continue
                seen.add(g)
                terms.append(_geodesic_term(a, g, {_pair(g): q}))
        reports.append(
            _report(f"distance <= {m} from the edge", terms.copy(), target)
        )
    return reports


def _pair(g: GeodesicAddress) -> tuple[int, int]:
    return (g.low, g.high)


def _vertex_shells_component(a, far: Word, parent: Word, child: Word, max_shell: int):
    """Shells of the component behind the far endpoint, never crossing the edge."""
    coords = {far: coords_at_word(a.coords, far)}
    shells = [[far]]
    seen = {far}
    blocked = {parent, child}
    for _ in range(max_shell):
        nxt = []
        for w in shells[-1]:
            for c in range(1, a.n + 1):
                u = w[:-1] if w and w[-1] == c else w + (c,)
                if u in seen or (w in blocked and u in blocked):
                    continue
                seen.add(u)
                if len(u) < len(w):
                    coords[u] = coords_at_word(a.coords, u)
                else:
                    coords[u] = apply_generator(coords[w], c)
                nxt.append(u)
        shells.append(sorted(nxt, key=lambda w: (len(w), w)))
    return shells, coords


@dataclass(frozen=True)
class ShellSums:
    depth: int
    geodesic_sum: float
    vertex_sum: float
    subtree_sum: float

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "geodesics": self.geodesic_sum,
            "vertices": self.vertex_sum,
            "subtrees": self.subtree_sum,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    t: float
    shells: tuple[ShellSums, ...]

    def cumulative(self) -> tuple[float, float, float]:
        return (
            math.fsum(s.geodesic_sum for s in self.shells),
            math.fsum(s.vertex_sum for s in self.shells),
            math.fsum(s.subtree_sum for s in self.shells),
        )

    def to_json(self) -> dict:
        g, v, x = self.cumulative()
        return {
            "t": self.t,
            "shells": [s.to_json() for s in self.shells],
            "cumulative": {"geodesics": g, "vertices": v, "subtrees": x},
        }


def convergence_certificate(
    a: HurwitzPoint,
    t_exponent: float,
    max_depth: int = 8,
    unverified_ok: bool = False,
    budget: int = SEARCH_BUDGET,
) -> ConvergenceReport:
    """Shell sums of |weight|^(-t) over geodesics, vertices, and subtrees.

    Depth-d shells hold the geodesics rooted at depth d, the vertices at
    depth d, and the complementary subtrees (one missing color, counted once)
    whose closest-to-root vertex is at depth d: one subtree per word, missing
    the word's last color, plus one per color at the root itself.  For n = 3
    the subtree family coincides with the geodesic family.  For a point in
    the domain the shell sums decay, which is the numerical witness that
    every exponent t > 0 sums absolutely.
    """
    if t_exponent <= 0:
        raise ValueError("t_exponent must be positive")
    if max_depth < 0:
        raise ValueError("max_depth must be nonnegative")
    if not unverified_ok:
        verdict = is_in_domain(a, 2.5, budget=budget)
        if verdict.status is not Status.IN_DOMAIN:
            raise ValueError(
                f"point not verified in the domain (status {verdict.status.value}); "
                "pass unverified_ok=True to sum anyway"
            )
    n = a.n

    def powered(log_weight: float, where: str) -> float:
        scaled = -t_exponent * log_weight
        if scaled > 700.0:
            raise ValueError(f"weight underflows the floating range at {where}")
        return math.exp(scaled)

    shells = []
    for d in range(max_depth + 1):
        gsum = vsum = xsum = 0.0
        for word in vertex_words_at_depth(n, d):
            coords = coords_at_word(a.coords, word)
            logs = []
            for k, v in enumerate(coords, 1):
                if v == 0:
                    raise ValueError(f"coordinate {k} vanishes at {word}")
                logs.append(_split_mag(v)[0])
            vsum += powered(math.fsum(logs), f"vertex {word}")
            last = word[-1] if word else None
            for i in range(1, n + 1):
                if i == last:
                    continue
                for j in range(i + 1, n + 1):
                    if j == last:
                        continue
                    glog = math.fsum(
                        l for k, l in enumerate(logs, 1) if k != i and k != j
                    )
                    gsum += powered(glog, f"geodesic {(i, j)} rooted at {word}")
            missing = (last,) if last is not None else tuple(range(1, n + 1))
            for k in missing:
                xsum += powered(logs[k - 1], f"subtree at {word} missing {k}")
        shells.append(ShellSums(d, gsum, vsum, xsum))
    return ConvergenceReport(t=t_exponent, shells=tuple(shells))


def fibonacci_growth_check(
    a: HurwitzPoint, depth: int
) -> tuple[float, float, list[GeodesicAddress]]:
    """Fit log+|phi(gamma)| against the combinatorial weight F(gamma).

    Scans every geodesic rooted at depth <= depth and returns (c1, c2,
    violations): the smallest and largest ratio log+|phi| / F over geodesics
    with |phi| > 1, and the geodesics with |phi| <= 1, whose ratio is zero.
    A point in the domain has no violations and c1 > 0; the upper ratio is
    finite for every point.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    lower = math.inf
    upper = 0.0
    violations = []
    for g in geodesics_up_to_depth(a.n, depth):
        coords = coords_at_word(a.coords, g.root_word)
        log_phi = math.fsum(
            _split_mag(v)[0] if v != 0 else -math.inf
            for k, v in enumerate(coords, 1)
            if k != g.low and k != g.high
        )
        if log_phi <= 0.0:
            violations.append(g)
            continue
        ratio = log_phi / fibonacci(g)
        lower = min(lower, ratio)
        upper = max(upper, ratio)
    if math.isinf(lower):
        lower = 0.0
    return lower, upper, violations
