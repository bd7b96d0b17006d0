"""Maximum-likelihood task inference over a registry of per-task HMMs.

Each candidate task is represented by an HMM over one shared alphabet; a
sequence is attributed to the task whose model gives it the highest
log-likelihood. The gap between the top two scores (the margin) is
reported as a confidence indicator but never thresholded by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping

from .errors import AlphabetMismatchError, NoDecisionError
from .hmm import HmmModel, SymbolSequence, log_likelihood


@dataclass(frozen=True)
class TaskModelRegistry:
    """Named per-task models sharing one symbol alphabet (same names, same
    order)."""

    entries: Dict[str, HmmModel]

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))
        if not self.entries:
            raise ValueError("registry needs at least one model")
        alphabets = {m.symbol_names for m in self.entries.values()}
        if len(alphabets) > 1:
            raise AlphabetMismatchError(
                "registry models disagree on the symbol alphabet: "
                + " vs ".join(str(a) for a in sorted(alphabets))
            )

    @property
    def symbol_names(self):
        return next(iter(self.entries.values())).symbol_names


@dataclass(frozen=True)
class TaskScoreReport:
    """All per-task log-likelihoods plus the decision.

    margin is winner minus runner-up (0 for a single-entry registry;
    +inf when every other model scored the sequence impossible).
    """

    scores: Dict[str, float]
    winner: str
    margin: float
    tie: bool

    def to_jsonable(self) -> dict:
        def enc(v):
            if v == -math.inf:
                return "-inf"
            if v == math.inf:
                return "inf"
            return v

        return {
            "scores": {k: enc(v) for k, v in sorted(self.scores.items())},
            "winner": self.winner,
            "margin": enc(self.margin),
            "tie": self.tie,
        }

    def to_table(self) -> str:
        width = max(len(k) for k in self.scores)
        lines = [
            f"{name:<{width}}  {score:.4f}"
            for name, score in sorted(self.scores.items(), key=lambda kv: -kv[1])
        ]
        lines.append(f"winner: {self.winner}  margin: {self.margin:.4f}"
                     + ("  (tie)" if self.tie else ""))
        return "\n".join(lines)


def score_all(registry: TaskModelRegistry, seq: SymbolSequence) -> Dict[str, float]:
    """Log-likelihood of the sequence under every model in the registry;
    -inf entries are allowed."""
    seq_alphabet = (seq.source or {}).get("alphabet")
    if seq_alphabet is not None and tuple(seq_alphabet) != registry.symbol_names:
        raise AlphabetMismatchError(
            f"sequence alphabet {tuple(seq_alphabet)} does not match the "
            f"registry alphabet {registry.symbol_names}"
        )
    return {name: log_likelihood(model, seq) for name, model in registry.entries.items()}


def decide(scores: Mapping[str, float]):
    """Pick the task with the highest score.

    Returns (winner, margin, tie). Exact ties set the tie flag and resolve
    to the lexicographically smallest tied name. All scores at -inf is an
    error: the sequence is impossible under every model.
    """
    if not scores:
        raise ValueError("decide needs at least one score")
    best = max(scores.values())
    if best == -math.inf:
        raise NoDecisionError("sequence is impossible under every model")
    top = sorted(name for name, s in scores.items() if s == best)
    winner = top[0]
    if len(scores) == 1:
        return winner, 0.0, False
    runner_up = max(s for name, s in scores.items() if name != winner)
    return winner, best - runner_up, len(top) > 1


def classify(registry: TaskModelRegistry, seq: SymbolSequence) -> TaskScoreReport:
    """Score the sequence under every model and decide the winning task."""
    scores = score_all(registry, seq)
    winner, margin, tie = decide(scores)
    return TaskScoreReport(scores=scores, winner=winner, margin=margin, tie=tie)
