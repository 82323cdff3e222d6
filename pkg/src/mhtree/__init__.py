"""Orbits of the Markoff-Hurwitz form x_1^2 + ... + x_n^2 - x_1 ... x_n.

The package walks the Cayley tree of the group generated by the n Vieta
involutions, tests membership in the domain where that action is proper,
sums the associated identities, enumerates integer solutions and renders
slices of the domain.
"""

__version__ = "0.1.0"
