"""Exact computation on digit spaces: points, tuples and compact sets coded
by infinite digit trees, and continuous maps coded by read/write trees."""
from .errors import (ArityError, CoherenceError, DigitSpaceError, DomainError, FormError,
                     InconsistentOracleError, ParseError, ProductivityError, UnsupportedError,
                     WellCoveringError)
from .numeric import Box, Dyadic, Interval, box_covered, parse_box, parse_rational
from .labels import Hyper, Lifted, Prod, format_label, parse_label
from .space import (Digit, DigitSpace, builtin_signed_digit, contraction_depth, covers_ball,
                    dump_space, load_space, pick_digit, resolve_space)
from .tree import (FinTree, LazyTree, PrefixChain, bisim_to_depth, first_difference,
                   from_prefix_chain, prefix, random_tree, tree_distance)
from .sexpr import format_tree, parse_fintree, parse_tree
from .coding import (CauchyOracle, basic_to_tree, cauchy_to_tree, dense_base_point,
                     finite_map_enclosure, h_procedure, tree_to_cauchy, val_approx)
from .product import ProductSpace, cons_tree, pr_tree, product_space
from .hyper import (CompactApprox, HyperSpace, compact_approx, derived_union, epsball_clauses,
                    hausdorff_distance, hyper_ball_contained, michael_rewrite, michael_transform,
                    michael_union, union_merge_node, union_trees)
from .functree import (FunTree, apply, compose, diag_tree, eta_tree, id_tree, lift_K,
                       pair_tree, parse_funtree, permute, proj_tree, sd_neg_tree, union_fun)

__version__ = "0.1.0"
