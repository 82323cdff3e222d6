"""Combinatorial layer: addresses into the Cayley tree of the rank-n involution group.

The group generated by n involutions b_1, ..., b_n (and no other relations) has
a Cayley graph that is a rooted n-valent tree.  Vertices are reduced words in
the generators, stored root-first as tuples of letters in 1..n; the edge
between w and w*b_i carries color i.  This module knows nothing about
coordinates: it provides addresses for vertices, alternating geodesics (the
2-valent subtrees that alternate between two colors), regular subtrees and
directed edges, plus the purely combinatorial weights attached to alternating
geodesics: the Fibonacci count, Sierpinski vectors and multiplicity counts.

All types are immutable values.  The memo caches behind ``fibonacci`` and
``sierpinski_vector`` are ``functools.lru_cache`` instances and are safe for
concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

MIN_ARITY = 3
# Letters fit comfortably in a byte and frontier sizes beyond this are
# impractical anyway.
MAX_ARITY = 16

Word = tuple[int, ...]


def check_arity(n: int) -> None:
    if not isinstance(n, int) or not MIN_ARITY <= n <= MAX_ARITY:
        raise ValueError(f"arity must be an integer in [{MIN_ARITY}, {MAX_ARITY}], got {n!r}")


def _check_word(n: int, word: Word) -> None:
    prev = 0
    for letter in word:
        if not isinstance(letter, int) or not 1 <= letter <= n:
            raise ValueError(f"letter {letter!r} out of range 1..{n}")
        if letter == prev:
            raise ValueError(f"word {word} is not reduced: repeated letter {letter}")
        prev = letter


def flip(word: Word, i: int) -> Word:
    """Raw word form of ``neighbor``: append letter i, or cancel it off the end."""
    if word and word[-1] == i:
        return word[:-1]
    return word + (i,)


def strip_alternating(word: Word, i: int, j: int) -> Word:
    """Remove the maximal trailing run of letters drawn from {i, j}."""
    k = len(word)
    while k and (word[k - 1] == i or word[k - 1] == j):
        k -= 1
    return word[:k]


@dataclass(frozen=True)
class VertexAddress:
    """A vertex of the tree: a reduced word, root-first."""

    n: int
    word: Word = ()

    def __post_init__(self) -> None:
        check_arity(self.n)
        _check_word(self.n, self.word)

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def last(self) -> int | None:
        return self.word[-1] if self.word else None

    def to_json(self) -> dict:
        return {"v": list(self.word)}

    @classmethod
    def from_json(cls, n: int, obj: dict) -> "VertexAddress":
        return cls(n, tuple(obj["v"]))


@dataclass(frozen=True)
class GeodesicAddress:
    """An alternating {i,j}-geodesic, addressed by its vertex closest to the root.

    ``root_word`` is that closest vertex; its last letter is never one of the
    two colors (otherwise a strictly closer vertex of the geodesic exists).
    """

    n: int
    root_word: Word
    colors: tuple[int, int]

    def __post_init__(self) -> None:
        check_arity(self.n)
        _check_word(self.n, self.root_word)
        i, j = self.colors
        if not (1 <= i <= self.n and 1 <= j <= self.n and i != j):
            raise ValueError(f"colors {self.colors} must be two distinct letters in 1..{self.n}")
        if i > j:
            raise ValueError(f"colors must be stored sorted, got {self.colors}")
        if self.root_word and self.root_word[-1] in self.colors:
            raise ValueError(
                f"root word {self.root_word} ends in a geodesic color; address is not canonical"
            )

    @property
    def depth(self) -> int:
        """Distance of the geodesic from the root vertex."""
        return len(self.root_word)

    @property
    def low(self) -> int:
        return self.colors[0]

    @property
    def high(self) -> int:
        return self.colors[1]

    def to_json(self) -> dict:
        return {"v": list(self.root_word), "colors": list(self.colors)}

    @classmethod
    def from_json(cls, n: int, obj: dict) -> "GeodesicAddress":
        i, j = obj["colors"]
        return cls(n, tuple(obj["v"]), (min(i, j), max(i, j)))


@dataclass(frozen=True)
class SubtreeAddress:
    """A regular subtree [v; I]: all vertices reachable from v along colors in I."""

    n: int
    base_word: Word
    colors: frozenset[int]

    def __post_init__(self) -> None:
        check_arity(self.n)
        _check_word(self.n, self.base_word)
        for c in self.colors:
            if not 1 <= c <= self.n:
                raise ValueError(f"color {c} out of range 1..{self.n}")
        if self.base_word and self.base_word[-1] in self.colors:
            raise ValueError(
                f"base word {self.base_word} ends in a subtree color; address is not canonical"
            )

    @property
    def missing_colors(self) -> tuple[int, ...]:
        """The colors not used by the subtree, ascending."""
        return tuple(c for c in range(1, self.n + 1) if c not in self.colors)

    def to_json(self) -> dict:
        return {"v": list(self.base_word), "colors": sorted(self.colors)}

    @classmethod
    def from_json(cls, n: int, obj: dict) -> "SubtreeAddress":
        return cls(n, tuple(obj["v"]), frozenset(obj["colors"]))


def component_subtree(n: int, word: Word, colors: frozenset[int]) -> SubtreeAddress:
    """The canonical address of the colors-component through the given vertex."""
    trimmed = word
    while trimmed and trimmed[-1] in colors:
        trimmed = trimmed[:-1]
    return SubtreeAddress(n, trimmed, colors)


@dataclass(frozen=True)
class DirectedEdge:
    """An edge of the tree together with a direction: tail --color--> head."""

    n: int
    tail: Word
    color: int

    def __post_init__(self) -> None:
        check_arity(self.n)
        _check_word(self.n, self.tail)
        if not 1 <= self.color <= self.n:
            raise ValueError(f"color {self.color} out of range 1..{self.n}")

    @property
    def head(self) -> Word:
        return flip(self.tail, self.color)

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(self.n, self.head, self.color)

    def to_json(self) -> dict:
        return {"tail": list(self.tail), "color": self.color}

    @classmethod
    def from_json(cls, n: int, obj: dict) -> "DirectedEdge":
        return cls(n, tuple(obj["tail"]), obj["color"])


@dataclass(frozen=True)
class FiniteSubtree:
    """A finite connected set of vertices (edges are implied by adjacency)."""

    n: int
    vertices: frozenset[Word]

    def __post_init__(self) -> None:
        check_arity(self.n)
        if not self.vertices:
            raise ValueError("a finite subtree must contain at least one vertex")
        for w in self.vertices:
            _check_word(self.n, w)
        top = self.top
        for w in self.vertices:
            if w != top and w[:-1] not in self.vertices:
                raise ValueError(f"vertex set is not connected: {w} has no parent in the set")

    @property
    def top(self) -> Word:
        """The vertex of the subtree closest to the tree root (unique by connectivity)."""
        return min(self.vertices, key=lambda w: (len(w), w))

    def edges(self) -> list[tuple[Word, int]]:
        """Internal edges as (word closer to the root, color), sorted."""
        top = self.top
        return sorted(
            ((w[:-1], w[-1]) for w in self.vertices if w != top),
            key=lambda e: (len(e[0]), e[0], e[1]),
        )

    def __contains__(self, word: Word) -> bool:
        return word in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    @classmethod
    def single_vertex(cls, n: int, word: Word = ()) -> "FiniteSubtree":
        return cls(n, frozenset({word}))

    @classmethod
    def ball(cls, n: int, radius: int, center: Word = ()) -> "FiniteSubtree":
        """All vertices within the given tree distance of ``center``."""
        check_arity(n)
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        seen = {center}
        frontier = [center]
        for _ in range(radius):
            nxt = []
            for w in frontier:
                for c in range(1, n + 1):
                    u = flip(w, c)
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return cls(n, frozenset(seen))

    def to_json(self) -> dict:
        return {"vertices": sorted(list(w) for w in self.vertices)}

    @classmethod
    def from_json(cls, n: int, obj: dict) -> "FiniteSubtree":
        return cls(n, frozenset(tuple(w) for w in obj["vertices"]))


def neighbor(v: VertexAddress, i: int) -> VertexAddress:
    """The vertex across the color-i edge: appends i, or cancels a trailing i."""
    if not 1 <= i <= v.n:
        raise ValueError(f"color {i} out of range 1..{v.n}")
    return VertexAddress(v.n, flip(v.word, i))


def canonical_geodesic(v: VertexAddress, colors: tuple[int, int]) -> GeodesicAddress:
    """The alternating {i,j}-geodesic through v, addressed by its closest-to-root vertex."""
    i, j = colors
    if i == j:
        raise ValueError("geodesic colors must be distinct")
    lo, hi = min(i, j), max(i, j)
    return GeodesicAddress(v.n, strip_alternating(v.word, lo, hi), (lo, hi))


def geodesic_vertex(g: GeodesicAddress, m: int) -> VertexAddress:
    """The m-th vertex along g: m = 0 is the root vertex, m >= 1 extends by the
    smaller color first, m <= -1 by the larger color first."""
    return VertexAddress(g.n, geodesic_vertex_word(g.root_word, g.low, g.high, m))


def geodesic_vertex_word(root_word: Word, lo: int, hi: int, m: int) -> Word:
    if m >= 0:
        first, second = lo, hi
        count = m
    else:
        first, second = hi, lo
        count = -m
    ext = (first, second) * (count // 2) + ((first,) if count % 2 else ())
    return root_word + ext


def geodesic_edge_color(g: GeodesicAddress, m: int) -> int:
    """Color of the edge e_m joining vertices m and m+1 of g (smaller color iff m even)."""
    return g.low if m % 2 == 0 else g.high


def geodesics_through_vertex(v: VertexAddress) -> list[GeodesicAddress]:
    """The n(n-1)/2 alternating geodesics through v, canonically addressed."""
    out = []
    for i in range(1, v.n + 1):
        for j in range(i + 1, v.n + 1):
            out.append(canonical_geodesic(v, (i, j)))
    return out


@lru_cache(maxsize=None)
def _fib(n: int, word: Word, lo: int, hi: int) -> int:
    if not word:
        return 1
    k = word[-1]
    fa = _fib(n, *_canon_raw(word, lo, k))
    fb = _fib(n, *_canon_raw(word, hi, k))
    return fa + fb


def _canon_raw(word: Word, c1: int, c2: int) -> tuple[Word, int, int]:
    lo, hi = (c1, c2) if c1 < c2 else (c2, c1)
    return strip_alternating(word, lo, hi), lo, hi


def fibonacci(g: GeodesicAddress) -> int:
    """The additive weight F(g): 1 on geodesics through the root, else the sum
    over the two geodesics obtained by trading a color for the root-ward edge
    color at the closest vertex."""
    return _fib(g.n, g.root_word, g.low, g.high)


def fibonacci_parents(g: GeodesicAddress) -> tuple[GeodesicAddress, GeodesicAddress]:
    """The two strictly-closer geodesics whose weights sum to fibonacci(g).

    Both share the root vertex of g and pairwise share an edge with g there.
    Only defined when g does not pass through the tree root.
    """
    if not g.root_word:
        raise ValueError("a geodesic through the root has no parents")
    k = g.root_word[-1]
    wa, la, ha = _canon_raw(g.root_word, g.low, k)
    wb, lb, hb = _canon_raw(g.root_word, g.high, k)
    return (
        GeodesicAddress(g.n, wa, (la, ha)),
        GeodesicAddress(g.n, wb, (lb, hb)),
    )


@lru_cache(maxsize=None)
def _sier(n: int, word: Word, lo: int, hi: int) -> Word:
    if not word:
        # Geodesic through the root using color n: basis vector at the other color.
        i = lo if hi == n else hi
        return tuple(1 if t == i else 0 for t in range(1, n))
    k = word[-1]
    sa = _sier(n, *_canon_raw(word, lo, k))
    sb = _sier(n, *_canon_raw(word, hi, k))
    return tuple(a + b for a, b in zip(sa, sb))


def sierpinski_vector(g: GeodesicAddress) -> tuple[int, ...]:
    """The integer vector refinement of fibonacci on the color-n branch.

    Defined for geodesics through the root edge of color n (there it is a
    standard basis vector of length n-1) and for geodesics lying in the
    subtree hanging off that edge; elsewhere it raises.  The entries sum to
    fibonacci(g).
    """
    n = g.n
    if not g.root_word:
        if n not in g.colors:
            raise ValueError(
                "sierpinski_vector is defined on the color-n branch; "
                f"geodesic through the root with colors {g.colors} does not cross it"
            )
    elif g.root_word[0] != n:
        raise ValueError(
            "sierpinski_vector is defined on the color-n branch; "
            f"root word {g.root_word} lies in another branch"
        )
    return _sier(n, g.root_word, g.low, g.high)


def root_geodesics(n: int) -> list[GeodesicAddress]:
    """All n(n-1)/2 geodesics through the root vertex."""
    return geodesics_through_vertex(VertexAddress(n))


def multiplicity_table(n: int, m_max: int) -> dict[int, int]:
    """Counts of geodesics with each weight value 1..m_max, over the whole tree.

    The enumeration prunes by weight: every geodesic at depth d+1 has a parent
    at depth d obtained by stripping exactly one letter, with strictly smaller
    weight, so a breadth-first sweep that keeps only weights <= m_max reaches
    every geodesic with weight <= m_max.  Weights grow at least linearly in
    depth, so the sweep stops by depth m_max.
    """
    check_arity(n)
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    counts = {m: 0 for m in range(1, m_max + 1)}
    counts[1] = n * (n - 1) // 2
    frontier: list[tuple[Word, int, int]] = [
        ((), i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
    ]
    seen = set(frontier)
    depth = 0
    cap = max(1, 2 * (m_max - 1))
    while frontier:
        depth += 1
        if depth > cap:
            # Unreachable by the linear growth bound; guards the depth-cap contract.
            raise AssertionError(
                f"geodesics of weight <= {m_max} persist beyond depth {cap}"
            )
        nxt: list[tuple[Word, int, int]] = []
        for word, lo, hi in frontier:
            for k in (lo, hi):
                x = lo + hi - k
                child = word + (k,)
                for j in range(1, n + 1):
                    if j == k or j == x:
                        continue
                    key = (child, min(x, j), max(x, j))
                    if key in seen:
                        continue
                    seen.add(key)
                    f = _fib(n, *key)
                    if f <= m_max:
                        counts[f] += 1
                        nxt.append(key)
        frontier = nxt
    return counts


def multiplicity(n: int, m: int, depth_cap: int | None = None) -> int:
    """How many geodesics in the whole tree have weight exactly m.

    ``depth_cap`` defaults to 2(m-1); passing a smaller cap than the sweep
    needs raises, it never silently undercounts.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if depth_cap is None:
        return multiplicity_table(n, m)[m]
    return _multiplicity_capped(n, m, depth_cap)


def _multiplicity_capped(n: int, m: int, depth_cap: int) -> int:
    """Run the sweep but raise if geodesics of weight <= m survive past the cap."""
    check_arity(n)
    count = n * (n - 1) // 2 if m == 1 else 0
    frontier: list[tuple[Word, int, int]] = [
        ((), i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
    ]
    seen = set(frontier)
    depth = 0
    while frontier:
        depth += 1
        nxt: list[tuple[Word, int, int]] = []
        for word, lo, hi in frontier:
            for k in (lo, hi):
                x = lo + hi - k
                child = word + (k,)
                for j in range(1, n + 1):
                    if j == k or j == x:
                        continue
                    key = (child, min(x, j), max(x, j))
                    if key in seen:
                        continue
                    seen.add(key)
                    f = _fib(n, *key)
                    if f <= m:
                        if depth > depth_cap:
                            raise ValueError(
                                f"depth cap {depth_cap} too small: weight {f} found at depth {depth}"
                            )
                        if f == m:
                            count += 1
                        nxt.append(key)
        frontier = nxt
    return count


def circular_set(t: FiniteSubtree) -> list[DirectedEdge]:
    """The directed edges whose head lies in t and whose underlying edge does not."""
    out = []
    for w in sorted(t.vertices, key=lambda w: (len(w), w)):
        for c in range(1, t.n + 1):
            u = flip(w, c)
            if u not in t.vertices:
                out.append(DirectedEdge(t.n, tail=u, color=c))
    return out


def vertex_words_at_depth(n: int, depth: int) -> Iterator[Word]:
    """All reduced words of the given length, lexicographic within a depth."""
    check_arity(n)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth == 0:
        yield ()
        return
    frontier: list[Word] = [()]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            last = w[-1] if w else 0
            for c in range(1, n + 1):
                if c != last:
                    nxt.append(w + (c,))
        frontier = nxt
    yield from frontier


def geodesics_up_to_depth(n: int, depth: int) -> Iterator[GeodesicAddress]:
    """All canonical geodesic addresses with root at distance <= depth from the root."""
    check_arity(n)
    for d in range(depth + 1):
        for w in vertex_words_at_depth(n, d):
            last = w[-1] if w else 0
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    if last != i and last != j:
                        yield GeodesicAddress(n, w, (i, j))
