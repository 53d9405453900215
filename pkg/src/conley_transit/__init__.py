"""Exact transition-matrix calculus for Conley index theory.

Poset-graded chain complexes over Q or F_p, homology braids with
certified long exact sequences, connection-matrix recognition and
enumeration, generalized transition matrices with the trivial, stackable
and degree-order existence constructions, fast-slow singular assembly,
and directional block transforms.
"""

from .braid import (BraidMorphism, HomologyBraid, ModuleBraid, build_homology_braid,
                    induced_braid_morphism, verify_braid_axioms, verify_braid_morphism)
from .connection import (ConnectionCandidate, enumerate_connection_matrices,
                         is_connection_matrix, validate)
from .directional import (CoveredWord, SignAssignment, SplitBlockMatrix, block_transform,
                          directional_matrix, nonzero_entry_report, relabel_in_out)
from .fastslow import (FastSlowAssembly, SuspensionData, assemble_fastslow,
                       compose_with_suspension, extract_singular, fastslow_residual,
                       singular_cover_data, suspend_conjugate)
from .fields import FieldSpec
from .graded import BlockGradedMap, GradedMap, GradedSpace
from .homology import ChainComplex, HomologyPresentation, homology, induced_map
from .matrices import Matrix
from .posets import (Interval, Poset, StackDecomposition, close_and_validate,
                     doubled_poset, find_stack, order_k)
from .problem import ProblemFile, parse, parse_path
from .transition import (TransitionCertificate, check_algebraic_tm, check_chain,
                         check_cover, check_weak_cover, compose_certificates,
                         construct_stackable, construct_trivial, construct_unique_k,
                         gen_prop_report, make_certificate)

__version__ = "0.1.0"
