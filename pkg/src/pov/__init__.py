"""Propose-or-Vote: exact outcome lotteries and equilibrium certification."""

from .elections import (
    ElectionEquilibrium,
    ElectionProfile,
    certify_election,
    election_outcome,
    enumerate_election_equilibria,
)
from .engine import (
    OutcomeLottery,
    Role,
    RoleProfile,
    VoteResult,
    VoteVerdict,
    expected_utilities,
    expected_utility,
    majority_vote,
    outcome_lottery,
    pair_lottery,
    sample_outcome,
    sample_outcomes,
)
from .equilibrium import (
    Action,
    Deviation,
    DeviationCandidateSet,
    EquilibriumCertificate,
    EquilibriumRecord,
    Verdict,
    best_response,
    candidate_values,
    certify,
    deviation_candidates,
    enumerate_equilibria,
)
from .model import (
    DegenerateConfiguration,
    InstanceTooLarge,
    InvalidInput,
    MedianTriple,
    Polity,
    PovError,
    Q,
    as_rational,
    median_of_voters,
    medians,
    utility,
)
from .tournament import (
    AIMode,
    AugmentedPolity,
    augment,
    certify_tournament,
    condorcet_winner,
    elimination_winner_distribution,
    enumerate_tournament_equilibria,
    predicted_equilibrium,
    tournament_lottery,
    uniqueness_report,
)

__all__ = [
    "Action",
    "AIMode",
    "as_rational",
    "augment",
    "AugmentedPolity",
    "best_response",
    "candidate_values",
    "certify",
    "certify_election",
    "certify_tournament",
    "condorcet_winner",
    "DegenerateConfiguration",
    "Deviation",
    "deviation_candidates",
    "DeviationCandidateSet",
    "election_outcome",
    "ElectionEquilibrium",
    "ElectionProfile",
    "elimination_winner_distribution",
    "enumerate_election_equilibria",
    "enumerate_equilibria",
    "enumerate_tournament_equilibria",
    "EquilibriumCertificate",
    "EquilibriumRecord",
    "expected_utilities",
    "expected_utility",
    "InstanceTooLarge",
    "InvalidInput",
    "majority_vote",
    "median_of_voters",
    "medians",
    "MedianTriple",
    "outcome_lottery",
    "OutcomeLottery",
    "pair_lottery",
    "Polity",
    "PovError",
    "predicted_equilibrium",
    "Q",
    "Role",
    "RoleProfile",
    "sample_outcome",
    "sample_outcomes",
    "tournament_lottery",
    "uniqueness_report",
    "utility",
    "Verdict",
    "VoteResult",
    "VoteVerdict",
]
