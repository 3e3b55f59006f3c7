from .anneal import epsilon_schedule, sa_next_point, sa_search, sample_in_ball
from .brute import brute_force
from .budget import (BudgetLedger, CandidateEvaluation, Executor, SearchRun,
                     estimate_score, pooled_ranking)
from .genetic import (GAConfig, ga_search, tournament_select,
                      two_point_crossover, uniform_npoint_mutation)

__all__ = [
    "BudgetLedger",
    "CandidateEvaluation",
    "Executor",
    "GAConfig",
    "SearchRun",
    "brute_force",
    "epsilon_schedule",
    "estimate_score",
    "ga_search",
    "pooled_ranking",
    "sa_next_point",
    "sa_search",
    "sample_in_ball",
    "tournament_select",
    "two_point_crossover",
    "uniform_npoint_mutation",
]
