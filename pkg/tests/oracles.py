"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately naive: direct lattice scans and literal
recurrences, sharing no code with the package internals.
"""

import itertools


def box_scan_solutions(n: int, bound: int) -> set[tuple[int, ...]]:
    """All ascending nonnegative n-tuples with square sum equal to product,
    max coordinate <= bound, excluding the all-zero tuple."""
    out = set()
    for tup in itertools.combinations_with_replacement(range(bound + 1), n):
        if not any(tup):
            continue
        square_sum = sum(x * x for x in tup)
        prod = 1
        for x in tup:
            prod *= x
        if square_sum == prod:
            out.add(tup)
    return out


def three_term_sequence(y_prev, y_cur, x, steps: int) -> list:
    """Literal y_{m+1} = x*y_m - y_{m-1}, returned as [y_prev, y_cur, ...]."""
    out = [y_prev, y_cur]
    for _ in range(steps):
        out.append(x * out[-1] - out[-2])
    return out
