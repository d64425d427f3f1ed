"""Generalized Riemann problem solvers and GRP finite-volume schemes for duct flow."""
from .gas import (ConservedState, DuctGeometry, GasModel, PrimitiveState, cons_to_prim,
                  prim_to_cons)
from .grp import GRPInput, GRPSolution, solve, solve_lgrp, solve_qgrp, taylor_eval

__all__ = ["ConservedState", "DuctGeometry", "GasModel", "PrimitiveState", "cons_to_prim",
           "prim_to_cons", "GRPInput", "GRPSolution", "solve", "solve_lgrp", "solve_qgrp",
           "taylor_eval"]
__version__ = "0.1.0"
