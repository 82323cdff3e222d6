"""Tests for the identity summations.

Load-bearing oracles: the finite-tree identity is exact algebra, checked at
machine precision for arbitrary points and subtrees; h and psi have closed
forms at frozen points; the weighted summand is re-derived from a truncated
sum of vertex weights along its geodesic; the parent inequality behind the
upper Fibonacci bound is checked term by term; partial-sum residuals are
pinned to values recorded when the module was built.
"""

import math
import random

import pytest

from mhtree.group import random_point
from mhtree.hurwitz import HurwitzPoint, coords_at_word, phi_geodesic
from mhtree.identity import (
    FrakH,
    McShaneH,
    RelativeEdge,
    SigmaPoleError,
    convergence_certificate,
    fibonacci_growth_check,
    finite_tree_identity,
    frak_h,
    h,
    identity_partial_sums,
    psi_directed,
)
from mhtree.tree import (
    DirectedEdge,
    FiniteSubtree,
    GeodesicAddress,
    fibonacci_parents,
    flip,
    geodesic_vertex_word,
    geodesics_up_to_depth,
)

TRIPLE = HurwitzPoint.from_coords((3.0, 3.0, 3.0))
WIDE = HurwitzPoint.from_coords((3.5, 3.0, 3.0))
QUAD = HurwitzPoint.from_coords((2.0, 2.0, 2.0, 2.0))
NEAR_BOUNDARY = HurwitzPoint.from_coords((2 + 0.15j,) * 3)
ROOT_EDGE = DirectedEdge(3, tail=(1,), color=1)
ROOT_GEO = GeodesicAddress(3, (), (1, 2))


def sigma_mu_point():
    x1, x2 = 1 + 0.1j, 2 + 0.3j
    x3 = (x1 * x1 + x2 * x2) / (x1 * x2)
    return HurwitzPoint.from_coords((x1, x2, x3))


def staircase(depth):
    return tuple((1 if k % 2 == 1 else 2) for k in range(1, depth + 1))


def log_plus(value):
    return max(math.log(value), 0.0) if value > 0 else 0.0


class TestH:
    def test_frozen_values(self):
        assert h(3.0) == pytest.approx(1 - math.sqrt(5) / 3, abs=1e-15)
        assert h(2.5) == pytest.approx(0.4, abs=1e-15)
        assert h(2j) == pytest.approx(1 - math.sqrt(2), abs=1e-15)

    def test_even(self):
        for z in (3.0, 2.5 + 1j, -4 + 0.3j, 100.0):
            assert h(-z) == pytest.approx(h(z), rel=1e-14)

    def test_conjugate_symmetry(self):
        for z in (3 + 1j, -2.5 + 0.2j, 0.1 + 5j):
            assert h(z.conjugate()) == pytest.approx(h(z).conjugate(), rel=1e-14)

    def test_large_argument_asymptotic(self):
        for z in (50.0, 200 + 100j, 1e6):
            assert abs(h(z) * z * z / 2 - 1) < 1e-3

    def test_segment_rejected(self):
        for z in (2.0, -2.0, 0.0, 1.999, -1.5, 0.5):
            with pytest.raises(ValueError):
                h(z)


class TestPsiDirected:
    def test_triple_root_edge(self):
        ew = psi_directed(TRIPLE, ROOT_EDGE)
        assert ew.psi == pytest.approx(1 / 3, abs=1e-15)
        assert ew.gamma_ref == ROOT_GEO

    def test_orientations_sum_to_one(self):
        rng = random.Random(31)
        for _ in range(40):
            n = rng.choice((3, 4, 5))
            a = HurwitzPoint.from_coords(random_point(rng, n))
            word = ()
            for _ in range(rng.randrange(0, 5)):
                word = flip(word, rng.choice(
                    [c for c in range(1, n + 1) if not word or c != word[-1]]
                ))
            e = DirectedEdge(n, tail=word, color=rng.randrange(1, n + 1))
            total = psi_directed(a, e).psi + psi_directed(a, e.reversed()).psi
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_vertex_relation(self):
        # The n edge weights directed into a vertex sum to 1 + mu/(product
        # of the vertex coordinates); exact consequence of the defining form.
        rng = random.Random(32)
        for _ in range(30):
            n = rng.choice((3, 4))
            a = HurwitzPoint.from_coords(random_point(rng, n))
            word = ()
            for _ in range(rng.randrange(0, 4)):
                word = flip(word, rng.choice(
                    [c for c in range(1, n + 1) if not word or c != word[-1]]
                ))
            coords = coords_at_word(a.coords, word)
            total = sum(
                psi_directed(a, DirectedEdge(n, tail=flip(word, i), color=i)).psi
                for i in range(1, n + 1)
            )
            expected = 1.0 + a.mu / math.prod(coords)
            assert total == pytest.approx(expected, rel=1e-9)

    def test_gamma_ref_pairs_edge_color_with_rootward_color(self):
        e = DirectedEdge(3, tail=(1, 2, 3), color=3)
        assert psi_directed(TRIPLE, e).gamma_ref.colors == (2, 3)

    def test_flow_edges_pass_the_closed_form_cross_check(self):
        # Every rootward edge at this point is flow-directed, so the
        # quotient is checked against the quadratic root internally.
        for d in range(1, 9):
            w = staircase(d + 1)
            ew = psi_directed(TRIPLE, DirectedEdge(3, tail=w, color=w[-1]))
            assert 0 < ew.psi.real < 0.34

    def test_zero_product_rejected(self):
        a = HurwitzPoint.from_coords((0.0, 0.0, 3.0))
        with pytest.raises(ValueError, match="vanishes"):
            psi_directed(a, DirectedEdge(3, tail=(1,), color=1))

    def test_arity_mismatch_rejected(self):
        with pytest.raises(ValueError, match="arity"):
            psi_directed(TRIPLE, DirectedEdge(4, tail=(), color=1))


class TestFiniteTreeIdentity:
    def test_single_vertex(self):
        rep = finite_tree_identity(TRIPLE, FiniteSubtree.single_vertex(3))
        assert abs(rep.residual) < 1e-15
        assert rep.term_count == 4

    def test_random_points_on_balls(self):
        rng = random.Random(33)
        for n in (3, 4, 5):
            for _ in range(2):
                a = HurwitzPoint.from_coords(random_point(rng, n))
                rep = finite_tree_identity(a, FiniteSubtree.ball(n, 2))
                assert abs(rep.residual) < 1e-8

    def test_grown_tree_stays_exact(self):
        rng = random.Random(34)
        vertices = {()}
        for step in range(25):
            base = rng.choice(sorted(vertices))
            vertices.add(flip(base, rng.randrange(1, 4)))
            if step % 5 == 4:
                tree = FiniteSubtree(3, frozenset(vertices))
                assert abs(finite_tree_identity(WIDE, tree).residual) < 1e-8

    def test_deep_narrow_tree(self):
        words = [staircase(d) for d in range(13)]
        tree = FiniteSubtree(3, frozenset(words))
        assert abs(finite_tree_identity(TRIPLE, tree).residual) < 1e-8

    def test_zero_vertex_weight_rejected(self):
        a = HurwitzPoint.from_coords((0.0, 1.0, 2.0))
        with pytest.raises(ValueError, match="vanishes"):
            finite_tree_identity(a, FiniteSubtree.single_vertex(3))

    def test_arity_mismatch_rejected(self):
        with pytest.raises(ValueError, match="arity"):
            finite_tree_identity(TRIPLE, FiniteSubtree.ball(4, 1))


class TestFrakH:
    def test_mu_zero_reduces_to_h(self):
        for g in (ROOT_GEO, GeodesicAddress(3, (1, 2), (1, 3))):
            phi = phi_geodesic(TRIPLE, g).phi
            assert frak_h(TRIPLE, g, 1 / 3) == h(phi)

    def test_q_zero_reduces_to_h(self):
        phi = phi_geodesic(WIDE, ROOT_GEO).phi
        assert frak_h(WIDE, ROOT_GEO, 0.0) == pytest.approx(h(phi), rel=1e-12)

    def test_matches_truncated_vertex_sum(self):
        # The weighted summand equals h(phi) minus q times the two-sided sum
        # of mu over the vertex weights along the geodesic; truncating that
        # sum at |m| <= 40 reproduces it to machine precision here.
        q = 1 / 3
        tail = sum(
            WIDE.mu / math.prod(coords_at_word(WIDE.coords, geodesic_vertex_word((), 1, 2, m)))
            for m in range(-40, 41)
        )
        expected = h(phi_geodesic(WIDE, ROOT_GEO).phi) - q * tail
        assert frak_h(WIDE, ROOT_GEO, q) == pytest.approx(expected, abs=1e-12)

    def test_sigma_pole_raises(self):
        with pytest.raises(SigmaPoleError):
            frak_h(sigma_mu_point(), ROOT_GEO, 1 / 3)

    def test_segment_weight_raises(self):
        a = HurwitzPoint.from_coords((0.5, 0.5, 0.5))
        with pytest.raises(ValueError, match="segment"):
            frak_h(a, ROOT_GEO, 1 / 3)


class TestPartialSums:
    def test_triple_converges_to_one(self):
        reps = identity_partial_sums(TRIPLE, 12)
        assert abs(reps[-1].residual) < 1e-6
        magnitudes = [abs(r.residual) for r in reps]
        assert magnitudes == sorted(magnitudes, reverse=True)
        counts = [r.term_count for r in reps]
        assert counts == sorted(counts) and counts[0] < counts[-1]
        sums = [r.absolute_term_sum for r in reps]
        assert sums == sorted(sums)
        assert sums[-1] <= 1 + 1e-12
        assert "attracting tree" in reps[-1].depth_or_tree

    def test_quad_tree_centered(self):
        reps = identity_partial_sums(QUAD, 6)
        assert abs(reps[-1].residual) < 1e-6
        magnitudes = [abs(r.residual) for r in reps]
        assert magnitudes == sorted(magnitudes, reverse=True)

    def test_near_boundary_point(self):
        reps = identity_partial_sums(NEAR_BOUNDARY, 8)
        assert abs(reps[-1].residual) < 1e-3
        magnitudes = [abs(r.residual) for r in reps]
        assert magnitudes == sorted(magnitudes, reverse=True)
        sums = [r.absolute_term_sum for r in reps]
        assert sums == sorted(sums)
        assert sums[-1] < 31.0

    def test_tree_centering_beats_root_centering(self):
        tree_centered = identity_partial_sums(NEAR_BOUNDARY, 8)
        root_centered = identity_partial_sums(NEAR_BOUNDARY, 8, center="root")
        assert abs(root_centered[-1].residual) < 0.1
        assert abs(tree_centered[-1].residual) < abs(root_centered[-1].residual)
        assert "root vertex" in root_centered[-1].depth_or_tree

    def test_extreme_magnitudes_are_carried_by_vertex_terms(self):
        # mu here is near -1e240; summands must go through the log domain.
        big = HurwitzPoint.from_coords((1e80, 1e80, 1e80))
        reps = identity_partial_sums(big, 3)
        assert abs(reps[-1].residual) < 1e-12

    def test_unverified_ok_forces_root_centering(self):
        reps = identity_partial_sums(TRIPLE, 4, unverified_ok=True)
        assert "root vertex" in reps[0].depth_or_tree
        assert abs(reps[-1].residual) < 1e-2

    def test_unverified_point_rejected(self):
        a = HurwitzPoint.from_coords((0.5, 0.5, 0.5))
        with pytest.raises(ValueError, match="NotInDomain"):
            identity_partial_sums(a, 3)

    def test_budget_failure_rejected(self):
        with pytest.raises(ValueError, match="Undetermined"):
            identity_partial_sums(NEAR_BOUNDARY, 3, budget=1)

    def test_segment_weight_refused_even_unverified(self):
        a = HurwitzPoint.from_coords((0.5, 0.5, 0.5))
        with pytest.raises(ValueError, match="segment"):
            identity_partial_sums(a, 2, unverified_ok=True)

    def test_arguments_validated(self):
        with pytest.raises(ValueError):
            identity_partial_sums(TRIPLE, -1)
        with pytest.raises(ValueError):
            identity_partial_sums(TRIPLE, 3, center="edge")

    def test_report_json_shape(self):
        rep = identity_partial_sums(TRIPLE, 2)[0].to_json()
        assert set(rep) == {
            "truncation", "partial_sum", "target", "residual", "terms",
            "absolute_sum",
        }


class TestWeightedVariant:
    def test_matches_plain_variant_at_equal_truncation(self):
        plain = identity_partial_sums(WIDE, 8, McShaneH())[-1]
        weighted = identity_partial_sums(WIDE, 8, FrakH())[-1]
        assert abs(plain.partial_sum - weighted.partial_sum) < 1e-6

    def test_two_q_matrices_converge_together(self):
        custom = FrakH(q={(1, 2): 0.5, (1, 3): 0.3, (2, 3): 0.2})
        diffs = {}
        for depth in (2, 8):
            uniform = identity_partial_sums(WIDE, depth, FrakH())[-1]
            skewed = identity_partial_sums(WIDE, depth, custom)[-1]
            diffs[depth] = abs(uniform.partial_sum - skewed.partial_sum)
        assert diffs[8] < 1e-6 < diffs[2] * 10
        assert diffs[8] < diffs[2]

    def test_uniform_default_matches_explicit(self):
        explicit = FrakH(q={(1, 2): 1 / 3, (1, 3): 1 / 3, (2, 3): 1 / 3})
        a = identity_partial_sums(WIDE, 4, FrakH())[-1]
        b = identity_partial_sums(WIDE, 4, explicit)[-1]
        assert a.partial_sum == b.partial_sum

    def test_bad_q_rejected(self):
        with pytest.raises(ValueError, match="sum to 1"):
            identity_partial_sums(WIDE, 2, FrakH(q={(1, 2): 1.0, (1, 3): 1.0, (2, 3): 1.0}))
        with pytest.raises(ValueError, match="every color pair"):
            identity_partial_sums(WIDE, 2, FrakH(q={(1, 2): 1.0}))

    def test_sigma_pole_is_specific_to_the_weighted_form(self):
        point = sigma_mu_point()
        with pytest.raises(SigmaPoleError):
            identity_partial_sums(point, 2, FrakH(), unverified_ok=True)
        reps = identity_partial_sums(point, 2, McShaneH(), unverified_ok=True)
        assert len(reps) == 3


class TestRelativeEdge:
    def test_root_edge_converges_to_psi(self):
        reps = identity_partial_sums(TRIPLE, 8, RelativeEdge(ROOT_EDGE))
        assert reps[-1].target == pytest.approx(1 / 3, abs=1e-15)
        assert abs(reps[-1].residual) < 1e-6
        magnitudes = [abs(r.residual) for r in reps]
        assert magnitudes == sorted(magnitudes, reverse=True)

    def test_depth_zero_counts_through_geodesics_plus_far_vertex(self):
        reps = identity_partial_sums(TRIPLE, 0, RelativeEdge(ROOT_EDGE))
        assert reps[0].term_count == 3

    def test_reversed_edge_converges_to_the_complement(self):
        reps = identity_partial_sums(
            TRIPLE, 8, RelativeEdge(DirectedEdge(3, tail=(), color=1))
        )
        assert reps[-1].target == pytest.approx(2 / 3, abs=1e-15)
        assert abs(reps[-1].residual) < 1e-6


class TestConvergenceCertificate:
    def test_depth_zero_row(self):
        cert = convergence_certificate(TRIPLE, 1.0, max_depth=3)
        assert cert.shells[0].geodesic_sum == pytest.approx(1.0, abs=1e-12)
        assert cert.shells[0].vertex_sum == pytest.approx(1 / 27, abs=1e-12)
        assert cert.shells[0].subtree_sum == pytest.approx(1.0, abs=1e-12)

    def test_rank_three_subtree_column_equals_geodesic_column(self):
        # With three colors, a complementary subtree missing one color is
        # exactly a geodesic of the other two, so the columns must agree.
        cert = convergence_certificate(TRIPLE, 1.0, max_depth=7)
        for shell in cert.shells:
            assert shell.subtree_sum == pytest.approx(shell.geodesic_sum, rel=1e-9)

    def test_shells_decay(self):
        cert = convergence_certificate(TRIPLE, 1.0, max_depth=8)
        for column in ("geodesic_sum", "vertex_sum", "subtree_sum"):
            values = [getattr(s, column) for s in cert.shells]
            assert all(values[d] < values[d - 1] for d in range(2, len(values)))
        assert cert.shells[-1].geodesic_sum < 0.01 * cert.shells[2].geodesic_sum

    def test_larger_exponent_decays_faster(self):
        slow = convergence_certificate(TRIPLE, 1.0, max_depth=5)
        fast = convergence_certificate(TRIPLE, 2.0, max_depth=5)
        for d in range(1, 6):
            assert fast.shells[d].geodesic_sum < slow.shells[d].geodesic_sum

    def test_rank_four_certificate(self):
        cert = convergence_certificate(QUAD, 1.0, max_depth=5)
        for column in ("geodesic_sum", "vertex_sum", "subtree_sum"):
            values = [getattr(s, column) for s in cert.shells]
            assert all(values[d] < values[d - 1] for d in range(2, len(values)))

    def test_arguments_validated(self):
        with pytest.raises(ValueError):
            convergence_certificate(TRIPLE, 0.0)
        with pytest.raises(ValueError):
            convergence_certificate(TRIPLE, -1.0)
        with pytest.raises(ValueError):
            convergence_certificate(TRIPLE, 1.0, max_depth=-1)

    def test_verification_gate(self):
        a = HurwitzPoint.from_coords((0.5, 0.5, 0.5))
        with pytest.raises(ValueError, match="NotInDomain"):
            convergence_certificate(a, 1.0, max_depth=2)
        cert = convergence_certificate(a, 1.0, max_depth=2, unverified_ok=True)
        assert len(cert.shells) == 3

    def test_json_shape(self):
        data = convergence_certificate(TRIPLE, 1.0, max_depth=2).to_json()
        assert set(data) == {"t", "shells", "cumulative"}
        assert set(data["shells"][0]) == {"depth", "geodesics", "vertices", "subtrees"}


class TestPsiEstimate:
    def test_constant_stabilizes_along_the_staircase(self):
        # |psi - h(phi)/2| scaled by the square of the rootward coordinate
        # settles to a constant (about 1.3416 here), the shape of the error
        # bound the relative identity rests on.
        values = []
        for depth in range(1, 10):
            w = staircase(depth + 1)
            ew = psi_directed(TRIPLE, DirectedEdge(3, tail=w, color=w[-1]))
            head = w[:-1]
            coords = coords_at_word(TRIPLE.coords, head)
            pair = ew.gamma_ref.colors
            j = pair[0] if pair[1] == w[-1] else pair[1]
            phi_ref = phi_geodesic(TRIPLE, ew.gamma_ref).phi
            values.append(
                abs(ew.psi - 0.5 * h(phi_ref)) * abs(coords[j - 1]) ** 2
            )
        assert all(v < 2.0 for v in values)
        assert values[-1] == pytest.approx(1.341641, abs=1e-3)
        assert abs(values[-1] - values[-2]) < 1e-4


class TestFibonacciGrowth:
    def test_triple_has_positive_lower_constant(self):
        lower, upper, violations = fibonacci_growth_check(TRIPLE, 10)
        assert violations == []
        assert 0.5 < lower <= upper < 1.5

    def test_parent_inequality_bounds_every_weight(self):
        # Each weight is controlled by its two Fibonacci parents:
        # log+|phi| <= log+|phi(p1)| + log+|phi(p2)| + log+|mu| + log(2n).
        # This is the mechanism behind the upper constant.
        rng = random.Random(7)
        for _ in range(10):
            a = HurwitzPoint.from_coords(random_point(rng, 3))
            mu_plus = log_plus(abs(a.mu))
            for g in geodesics_up_to_depth(3, 6):
                if not g.root_word:
                    continue
                p1, p2 = fibonacci_parents(g)
                lhs = log_plus(abs(phi_geodesic(a, g).phi))
                rhs = (
                    log_plus(abs(phi_geodesic(a, p1).phi))
                    + log_plus(abs(phi_geodesic(a, p2).phi))
                    + mu_plus
                    + math.log(6)
                )
                assert lhs <= rhs + 1e-9

    def test_all_ones_point_violates_everywhere(self):
        lower, upper, violations = fibonacci_growth_check(
            HurwitzPoint.from_coords((1.0, 1.0, 1.0)), 4
        )
        assert len(violations) > 40
        assert lower == 0.0

    def test_segment_family_produces_violations(self):
        lower, upper, violations = fibonacci_growth_check(
            HurwitzPoint.from_coords((1.0, 1.0, 2.0)), 5
        )
        assert len(violations) > 50
        assert upper < 1.0

    def test_negative_depth_rejected(self):
        with pytest.raises(ValueError):
            fibonacci_growth_check(TRIPLE, -1)
