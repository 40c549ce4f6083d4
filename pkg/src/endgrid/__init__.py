"""Ends of infinite graphs, studied on finite truncations."""
from ._ids import Top
from .bipartite import (BipartiteLK, Core, ScaleFamily, build_scale_tree, certify_no_core,
                        disjoint_cores, dominance, downward_closure, exceptional_set, small_core,
                        small_core_oracle, to_bipartite, verify_scale)
from .certify import (Certificate, affirmative_pipeline, certify_attachment_bound,
                      certify_scale_obstruction, search_star)
from .ends import (Comb, EndSurrogate, RayGraph, StarOfRays, assemble_star, dominators,
                   equivalence_check, find_combs, frayed_decompose, greedy_core,
                   normal_tree, ray_graph, star_problems)
from .errors import (AntichainViolation, CertificationError, EndgridError, InternalError,
                     InvalidArgument, SchemaError)
from .flow import disjoint_paths, separates
from .graph import Ray, TruncatedGraph
from .inflation import (check_doublestar_property, components_above, expected_counts,
                        horizontal_ray, horizontal_rays, inflate, lift_with_stars)
from .trees import (TOP, OrderTree, SparseTGraph, attach_tops, attachment_sets,
                    branch_ladders, build_regular_tree, check_star_property,
                    level_antichains, select_ladders, tree_query)

__version__ = "0.1.0"
