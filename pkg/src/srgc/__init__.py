"""Exact-arithmetic toolkit for stable ribbon graph complexes.

Subpackages cover: exact scalars (rationals, rational functions with
factored linear-form denominators, dual numbers), Z/2-graded algebras with
odd scalar product and their Koszul-signed tensor calculus, odd operator
block decompositions and homotopy inverses, (stable) ribbon graphs with
oriented generators and the graph-complex differential, partition-function
cochains, and the combinatorial psi-class weights with an independent
intersection-number oracle.
"""

__version__ = "0.1.0"
