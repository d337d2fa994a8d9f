"""Low-congestion shortcuts for k-chordal, diameter-3/4 and bounded clique-width
graphs, with a CONGEST simulator, partwise aggregation and distributed MST."""

from .audit import (LbWitness, QualityReport, build_lb_witness_cw, build_lb_witness_kchordal, measure,
                    predicted_lb_rounds, verify_chordality, verify_lb_class)
from .cliquewidth import build_base, build_g_gamma_p, oplus
from .errors import (GenerationFailed, InvalidArgument, MalformedOperand, NoSpanningTree, PreconditionViolated,
                     ShortcutError, SimulationFault, TimeoutFault, TooLarge, UnsupportedParameter)
from .graph import INFINITE, Graph, diameter, is_connected, read_edge_list, write_edge_list
from .instances import (KChordalInstance, Partition, gen_clique_width_direct, gen_diameter_d_graph, gen_k_chordal,
                        gen_random_connected_partition)
from .mst import (CHORDAL, MstResult, WeightedGraph, assign_random_weights, boruvka_distributed,
                  kruskal_oracle)
from .shortcuts import (KwiseHash, Shortcut, ShortcutConfig, build_shortcut_d3, build_shortcut_d4,
                        identify_large_parts, kappa, kwise_hash_eval, one_hop_extension)

__version__ = "0.1.0"
