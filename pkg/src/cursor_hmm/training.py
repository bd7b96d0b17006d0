"""Multi-sequence Baum-Welch parameter estimation.

Expected counts are pooled across sequences as ratio-of-sums (sum the
numerators and denominators over all sequences, then normalize), which is
the maximum-likelihood re-estimation for independent sequences. Counts are
accumulated in sequence order and states in index order, so runs are
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .errors import TrainingDegeneracyError
from .hmm import HmmModel, SymbolSequence, backward, forward


@dataclass(frozen=True)
class TrainingConfig:
    """Stopping rule and smoothing for Baum-Welch.

    prob_floor is applied entrywise to every re-estimated row before
    renormalization, keeping unseen symbols at small nonzero probability.
    freeze_pi keeps the initial distribution of the starting model instead
    of re-estimating it from the pooled first-step posteriors.
    """

    max_iters: int = 100
    ll_tolerance: float = 1e-6
    prob_floor: float = 1e-6
    freeze_pi: bool = False

    def check(self, n_states: int, n_symbols: int) -> None:
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.ll_tolerance < 0:
            raise ValueError("ll_tolerance must be >= 0")
        limit = 1.0 / max(n_states, n_symbols)
        if not (0.0 <= self.prob_floor < limit):
            raise ValueError(f"prob_floor must lie in [0, {limit})")


@dataclass
class TrainingTrace:
    """Per-iteration total log-likelihood over the training set.

    log_likelihoods[0] is the starting model's score; each iteration
    appends the score of the re-estimated model.
    """

    log_likelihoods: List[float] = field(default_factory=list)
    iterations_run: int = 0
    converged: bool = False


def _total_ll_and_stats(model: HmmModel, sequences, prob_floor: float):
    """One E-step: pooled expected counts and the training-set log-likelihood."""
    n, m = model.n_states, model.n_symbols
    pi_num = np.zeros(n)
    a_num = np.zeros((n, n))
    a_den = np.zeros(n)
    b_num = np.zeros((n, m))
    b_den = np.zeros(n)
    total_ll = 0.0
    for idx, seq in enumerate(sequences):
        res = forward(model, seq)
        if not np.isfinite(res.log_likelihood):
            if prob_floor == 0.0:
                raise TrainingDegeneracyError(
                    f"training sequence {idx} is impossible under the current "
                    "model and prob_floor is 0"
                )
            total_ll = -np.inf
            continue
        total_ll += res.log_likelihood
        beta = backward(model, seq, res.scales)
        gamma = res.alpha * beta
        obs = seq.symbols
        if len(obs) > 1:
            emit = model.b[:, obs].T
            weighted = emit[1:] * beta[1:] / res.scales[1:, None]
            a_num += model.a * (res.alpha[:-1].T @ weighted)
            a_den += gamma[:-1].sum(axis=0)
        pi_num += gamma[0]
        for j in range(n):
            b_num[j] += np.bincount(obs, weights=gamma[:, j], minlength=m)
        b_den += gamma.sum(axis=0)
    return total_ll, pi_num, a_num, a_den, b_num, b_den


def _floor_and_normalize(row: np.ndarray, floor: float) -> np.ndarray:
    row = np.maximum(row, floor)
    return row / row.sum()


def baum_welch(
    model0: HmmModel,
    sequences: Sequence[SymbolSequence],
    config: TrainingConfig = TrainingConfig(),
):
    """Estimate HMM parameters from one or more sequences by EM.

    Returns the trained model and a TrainingTrace whose log-likelihoods
    are non-decreasing (exactly so when prob_floor is 0; within numerical
    slack otherwise). Stops after max_iters iterations or when the
    relative improvement drops below ll_tolerance.
    """
    if len(sequences) < 1:
        raise ValueError("baum_welch needs at least one training sequence")
    model0.require_valid()
    config.check(model0.n_states, model0.n_symbols)

    trace = TrainingTrace()
    model = model0
    ll, *stats = _total_ll_and_stats(model, sequences, config.prob_floor)
    trace.log_likelihoods.append(ll)
    for _ in range(config.max_iters):
        pi_num, a_num, a_den, b_num, b_den = stats
        n = model.n_states
        new_pi = model.pi if config.freeze_pi else _floor_and_normalize(
            pi_num / len(sequences), config.prob_floor
        )
        new_a = np.array(
            [
                _floor_and_normalize(a_num[i] / a_den[i], config.prob_floor)
                if a_den[i] > 0
                else model.a[i]
                for i in range(n)
            ]
        )
        new_b = np.array(
            [
                _floor_and_normalize(b_num[j] / b_den[j], config.prob_floor)
                if b_den[j] > 0
                else model.b[j]
                for j in range(n)
            ]
        )
        model = HmmModel(new_pi, new_a, new_b, model.symbol_names, model.state_names)
        prev_ll = trace.log_likelihoods[-1]
        ll, *stats = _total_ll_and_stats(model, sequences, config.prob_floor)
        trace.log_likelihoods.append(ll)
        trace.iterations_run += 1
        if np.isfinite(ll) and np.isfinite(prev_ll):
            if ll - prev_ll < config.ll_tolerance * abs(prev_ll):
                trace.converged = True
                break
    return model, trace
