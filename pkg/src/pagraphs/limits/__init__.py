"""Finite-resolution samplers for the continuum limits."""
from .blocks import (MATRIX_LIMIT, ROOTED_EDGE, LimitBlockSample, brownian_block_approx,
                     metric_graph_points, remy_leaf_depths, sample_block_CG, sample_block_Calpha,
                     sample_block_Clen, sample_blocks_SB_joint, sample_y_sequence, write_provenance)
from .dimension import DimensionEstimate, leaf_dimension_estimate, uniform_point_measure
from .gluing import (ConstructedSpace, GluingResult, IterativeGluingSpec, iterative_gluing,
                     lazy_root_distance, line_breaking, mlmc_parameters, root_distance_samples,
                     segment_depths, unit_segment_sampler)
from .selfsimilar import (NodeLaw, SelfSimilarSpec, ass_from_iterative, contraction_estimate,
                          deterministic_sticks, diameter_moment, gem_sticks, ray_root_distance,
                          self_similar_sample, stick_array, unit_segment_law)
