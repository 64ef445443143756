from .graph import MultiGraph, graph_from_edges
from .marchal import block_weight, block_weight_terms, element_weight_sum, marchal_counts, marchal_grow
from .planar import (alphagamma_counts, alphagamma_grow, looptree, looptree_from_rotation,
                     lpam_first_degree, lpam_grow, plane_tree_rotation)
from .remy import (edge_split_process, remy_diameters, remy_generalized, remy_height_sup,
                   remy_v2_decompose, standard_seeds, two_line_seeds)
from .state import EDGE, MODES, VERTEX, GrowthState, LocalBlock, read_trace, write_trace
from .trees import (FitnessSequence, RecursiveTree, degree_measure, pa_grow, split_proportions,
                    uniform_measure, weight_measure, wrt_grow)
