"""Neumaier Cayley graphs: construction, verification, enumeration.

A Neumaier graph is a non-complete edge-regular graph containing a
regular clique; here the cliques come from the cosets of a subgroup of a
finite group, the connection sets from relative difference sets, and the
census from an isomorph-reduced exhaustive search.
"""

from .autos import (Automorphism, automorphism_group, msubset_orbit_reps,
                    msubset_orbits, setwise_stabilizer, stabilizer_search)
from .canon import are_isomorphic, canonical_form, invariant_key
from .constructions import (Construction1Result, Construction2Input,
                            Construction2Result, CorollaryParams,
                            PartialSpreadResult, Theorem1Report,
                            Theorem2Result, construction1, construction2,
                            params_from_corollary, partial_spread_srg,
                            theorem1_check, theorem2_graph)
from .enumeration import (CensusClass, EnumerationOptions, EnumerationResult,
                          EnumerationTask, brute_enumerate, enumerate_graphs,
                          merge_censuses, subgroup_sweep)
from .gf2 import (BinaryField, BooleanFunction, SpreadFamily, gf_mul,
                  is_bent, maiorana_mcfarland, spread_family, walsh_spectrum)
from .graph6 import decode_graph6, encode_graph6
from .graphs import (CayleyGraph, DenseGraph, EdgeRegularParams,
                     IntersectionArray, NeumaierCheckReport, NeumaierParams,
                     SrgParams, clique_nexus, coset_spread_nexus,
                     distance_regular, edge_regular, materialize,
                     strictly_neumaier_check, strongly_regular)
from .groups import (CosetDecomposition, FiniteGroup, Subgroup,
                     direct_product, inverse_set, is_normal, make_group,
                     right_cosets, subgroup_generated, subgroups_of_order,
                     validate_group)
from .groupring import convolve, delta, indicator
from .rds import (RdsFlags, RdsParams, RelativeDifferenceSet, bent_rds,
                  classify_rds, search_rds, verify_rds)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
