from src.reactions.polynomial import (
    ReactionSpec,
    builtin_family,
    dump_reaction_file,
    evaluate,
    load_reaction_file,
    pullback_to_u,
    zero_reaction,
)
from src.reactions.assumptions import AssumptionReport, check_A1, check_A2, check_A3

__all__ = [
    "ReactionSpec",
    "builtin_family",
    "dump_reaction_file",
    "evaluate",
    "load_reaction_file",
    "pullback_to_u",
    "zero_reaction",
    "AssumptionReport",
    "check_A1",
    "check_A2",
    "check_A3",
]
