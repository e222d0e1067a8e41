from .lst import LstResult, NotAVertex, gated_lp, lst_reduce
from .matching import MatchGraph, is_matching, max_matching
from .sliding import DensityProfile, InfeasibleInput, WindowInstance, find_window, sliding_round

__all__ = [
    "DensityProfile", "InfeasibleInput", "LstResult", "MatchGraph", "NotAVertex",
    "WindowInstance", "find_window", "gated_lp", "is_matching", "lst_reduce",
    "max_matching", "sliding_round",
]
