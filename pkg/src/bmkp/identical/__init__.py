from .finalize import GuessRejected, finalize_cheap, pair_graph, pair_matching
from .guess import (EnumerationReport, GuessState, build_guess, enumerate_guesses,
                    guess_from_solution)
from .labels import HeavyLabel, LightLabel, label_all, label_heavy, label_light
from .normalize import (normalize_critical_heavy, normalize_critical_light, order_ok,
                        rounded_weight_ok)
from .pipeline import (ENUMERATE, ORACLE, GuessTooLow, IdenticalReport, Preprocessed,
                       guess_drivers, oracle_stages, preprocess, run_identical)
from .slack import (RemovedSet, SlackPreconditionError, SlackSolution, build_slack_solution,
                    check_profile, check_slack, minimize_bundle)

__all__ = [
    "ENUMERATE", "ORACLE", "EnumerationReport", "GuessRejected", "GuessState", "GuessTooLow",
    "HeavyLabel", "IdenticalReport", "LightLabel", "Preprocessed", "RemovedSet",
    "SlackPreconditionError", "SlackSolution", "build_guess", "build_slack_solution",
    "check_profile", "check_slack", "enumerate_guesses", "finalize_cheap", "guess_drivers",
    "guess_from_solution", "label_all", "label_heavy", "label_light", "minimize_bundle",
    "normalize_critical_heavy", "normalize_critical_light", "oracle_stages", "order_ok",
    "pair_graph", "pair_matching", "preprocess", "rounded_weight_ok", "run_identical",
]
