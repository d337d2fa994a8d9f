"""CONGEST simulation and the distributed algorithms run on it."""

from .aggregation import AGG_OPS, AggOp, aggregation_fold_oracle, min_bandwidth_factor, partwise_aggregate
from .construction import dist_build_shortcut, dist_identify_large
from .programs import PROGRAMS, get_program, register
from .sim import NodeView, SimConfig, SimTrace, id_bits, run
