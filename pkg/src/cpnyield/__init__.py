"""Reachability and yield maximization for continuous Petri nets, in exact arithmetic."""

from .firing import Fireability, fireable, max_fs
from .milp import ExclusionCut, MilpProblem, Strategy, enumerate_solutions, milp_max, solve_milp
from .net import (
    INF,
    Cpn,
    FiringError,
    InfeasibleVector,
    Marking,
    NetError,
    Parikh,
    UnknownIdentifier,
    enab,
    fire,
    restrict,
    reverse,
)
from .reach import ReachMode, ReachResult, ReverseFrom, at_least_reachable, reachable
from .witness import Replay, check_certificate, replay
from .yields import YieldResult, max_yield_binsearch, yield_upper_bound

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Cpn",
    "ExclusionCut",
    "Fireability",
    "FiringError",
    "InfeasibleVector",
    "Marking",
    "MilpProblem",
    "NetError",
    "Parikh",
    "ReachMode",
    "ReachResult",
    "Replay",
    "ReverseFrom",
    "Strategy",
    "UnknownIdentifier",
    "YieldResult",
    "at_least_reachable",
    "check_certificate",
    "enab",
    "enumerate_solutions",
    "fire",
    "fireable",
    "max_fs",
    "max_yield_binsearch",
    "milp_max",
    "reachable",
    "replay",
    "restrict",
    "reverse",
    "solve_milp",
    "yield_upper_bound",
]
