"""Canonical graph decompositions at desk scale.

Subpackages cover: core graph values (graphs), the generic partitive-family
engine (partitive), modular decomposition (modular), series/parallel factor
decomposition of two-source dags (twodag), cycle-matroid twisting machinery
(whitney), bipartition families and the Tutte decomposition (bipartitions,
tutte), the split decomposition (split), clique-width expressions
(cliquewidth), and a brute-force monadic second-order evaluator (mso).
"""

__version__ = "0.1.0"
