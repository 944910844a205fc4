"""Combinatorial link homology from grid diagrams.

Computes tilde/hat grid homology over F2 and Z, verifies the one-crossing
unoriented skein exact triangle and its sign refinement at the chain level,
iterates it into a cube of resolutions with spectral-page bookkeeping, and
cross-checks everything against classical invariants (determinant, signature,
thinness) computed independently from the planar projection.
"""

__version__ = "0.1.0"
