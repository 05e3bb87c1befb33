"""Elimination-style voting rules and their coalitional manipulation."""

from .profile import (
    Ballot, Profile, ProfileError, ParseError, borda_scores, condorcet_loser, condorcet_winner,
    pairwise_majority, parse_profile, positional_scores, restrict, serialize_profile,
)
from .rules import (
    BALDWIN, BORDA, NANSON, RULES, FIXED, EliminationTrace, Round, TieBreak,
    baldwin_winner, borda_winner, elect, nanson_winner, reversal,
)
from .manipulation import (
    HEURISTICS, ManipulationInstance, ManipulationResult, evaluate, heuristic_average_fit,
    heuristic_eliminate, heuristic_largest_fit, heuristic_rev_eliminate, heuristic_reverse,
    lower_bound, minimize_manipulators, scores_to_ballots,
)
from .oracles import OracleTimeout, brute_force_optimal_unweighted, brute_force_weighted, nanson_weighted_3cand
from .generators import GeneratorSpec, generate, uniform_profile, urn_profile
from .experiments import ExperimentConfig, run_experiment, run_scaling, run_small_optimal

__version__ = "0.1.0"

__all__ = [
    "Ballot", "Profile", "ProfileError", "ParseError", "borda_scores", "condorcet_loser",
    "condorcet_winner", "pairwise_majority", "parse_profile", "positional_scores", "restrict",
    "serialize_profile",
    "BALDWIN", "BORDA", "NANSON", "RULES", "FIXED", "EliminationTrace", "Round", "TieBreak",
    "baldwin_winner", "borda_winner", "elect", "nanson_winner", "reversal",
    "HEURISTICS", "ManipulationInstance", "ManipulationResult", "evaluate", "heuristic_average_fit",
    "heuristic_eliminate", "heuristic_largest_fit", "heuristic_rev_eliminate", "heuristic_reverse",
    "lower_bound", "minimize_manipulators", "scores_to_ballots",
    "OracleTimeout", "brute_force_optimal_unweighted", "brute_force_weighted", "nanson_weighted_3cand",
    "GeneratorSpec", "generate", "uniform_profile", "urn_profile",
    "ExperimentConfig", "run_experiment", "run_scaling", "run_small_optimal",
]
