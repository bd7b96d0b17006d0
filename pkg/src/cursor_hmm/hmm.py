"""Discrete hidden Markov model: scoring, decoding, posteriors, sampling.

All probabilities are natural-log when logged. The forward/backward pass
uses per-step scaling so that sequences of length up to a million symbols
can be scored without underflow; Viterbi runs entirely in log space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import AlphabetMismatchError, DegeneratePosteriorError, InvalidModelError

STOCHASTIC_TOL = 1e-9


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HmmModel:
    """A discrete HMM: initial distribution ``pi``, transition matrix ``a``
    (rows index the source state), emission matrix ``b`` (rows index the
    state, columns the symbol), and the named symbol alphabet.
    """

    pi: np.ndarray
    a: np.ndarray
    b: np.ndarray
    symbol_names: tuple
    state_names: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen_array(self.pi))
        object.__setattr__(self, "a", _frozen_array(self.a))
        object.__setattr__(self, "b", _frozen_array(self.b))
        object.__setattr__(self, "symbol_names", tuple(self.symbol_names))
        if self.state_names is not None:
            object.__setattr__(self, "state_names", tuple(self.state_names))

    @property
    def n_states(self) -> int:
        return self.pi.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.b.shape[1]

    def require_valid(self) -> "HmmModel":
        violations = validate(self)
        if violations:
            raise InvalidModelError(violations)
        return self


@dataclass(frozen=True)
class SymbolSequence:
    """An observation sequence of alphabet indices, with optional
    provenance metadata (trace id, resampling interval used, ...)."""

    symbols: np.ndarray
    source: Optional[dict] = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", _frozen_array(self.symbols, dtype=np.int64))
        if self.symbols.ndim != 1 or len(self.symbols) < 1:
            raise ValueError("a symbol sequence must be a non-empty 1-d index array")
        if np.any(self.symbols < 0):
            raise ValueError("symbol indices must be non-negative")

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class StatePath:
    """A decoded hidden-state path with the joint log-probability of the
    path together with the observations."""

    states: np.ndarray
    log_prob: float
    impossible: bool = False

    def __post_init__(self):
        object.__setattr__(self, "states", _frozen_array(self.states, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.states)


class ForwardResult(NamedTuple):
    alpha: np.ndarray  # T x N, each row normalized to sum 1
    scales: np.ndarray  # length T; prod(scales) = P(O | model)
    log_likelihood: float


def validate(model: HmmModel) -> list:
    """Return every invariant violation of the model, with its location.

    An empty list means the model is valid. Violations are data, not
    exceptions: callers decide whether to raise.
    """
    out = []
    n, m = model.n_states, model.n_symbols
    if n < 1:
        out.append("n_states must be >= 1")
    if m < 1:
        out.append("n_symbols must be >= 1")
    if model.pi.shape != (n,):
        out.append(f"pi has shape {model.pi.shape}, expected ({n},)")
    if model.a.shape != (n, n):
        out.append(f"a has shape {model.a.shape}, expected ({n}, {n})")
    if model.b.shape != (n, m):
        out.append(f"b has shape {model.b.shape}, expected ({n}, {m})")
    if out:
        return out

    def check_range(name, arr):
        bad = np.argwhere((arr < 0.0) | (arr > 1.0))
        for idx in bad:
            loc = ",".join(str(i) for i in idx)
            out.append(f"{name}[{loc}] = {arr[tuple(idx)]} outside [0, 1]")

    check_range("pi", model.pi)
    check_range("a", model.a)
    check_range("b", model.b)

    if abs(model.pi.sum() - 1.0) > STOCHASTIC_TOL:
        out.append(f"pi sums to {model.pi.sum()!r}, expected 1")
    for i, s in enumerate(model.a.sum(axis=1)):
        if abs(s - 1.0) > STOCHASTIC_TOL:
            out.append(f"a row {i} sums to {s!r}, expected 1")
    for j, s in enumerate(model.b.sum(axis=1)):
        if abs(s - 1.0) > STOCHASTIC_TOL:
            out.append(f"b row {j} sums to {s!r}, expected 1")

    if len(model.symbol_names) != m:
        out.append(f"{len(model.symbol_names)} symbol names for {m} symbols")
    elif len(set(model.symbol_names)) != m:
        out.append("symbol names are not unique")
    if model.state_names is not None and len(model.state_names) != n:
        out.append(f"{len(model.state_names)} state names for {n} states")
    return out


def check_alphabet(model: HmmModel, seq: SymbolSequence) -> None:
    """Raise if the sequence indexes symbols the model does not have."""
    hi = int(seq.symbols.max())
    if hi >= model.n_symbols:
        raise AlphabetMismatchError(
            f"sequence uses symbol index {hi} but the model alphabet has "
            f"only {model.n_symbols} symbols"
        )


def forward(model: HmmModel, seq: SymbolSequence) -> ForwardResult:
    """Scaled forward pass.

    Each returned alpha row is normalized to sum 1; the per-step scale
    factors multiply back to P(O | model), so the log-likelihood is the
    sum of their logs (-inf if the sequence is impossible).
    """
    check_alphabet(model, seq)
    obs = seq.symbols
    big_t, n = len(obs), model.n_states
    emit = model.b[:, obs].T  # T x N
    alpha = np.zeros((big_t, n))
    scales = np.zeros(big_t)
    cur = model.pi * emit[0]
    for t in range(big_t):
        if t > 0:
            cur = (cur @ model.a) * emit[t]
        s = cur.sum()
        if s == 0.0:
            # impossible from here on; rows stay zero
            return ForwardResult(alpha, scales, -np.inf)
        scales[t] = s
        cur = cur / s
        alpha[t] = cur
    return ForwardResult(alpha, scales, float(np.log(scales).sum()))


def backward(model: HmmModel, seq: SymbolSequence, scales: np.ndarray) -> np.ndarray:
    """Scaled backward pass reusing the forward pass's scale factors.

    With this scaling, sum_i alpha[t, i] * beta[t, i] == 1 for every t.
    """
    check_alphabet(model, seq)
    obs = seq.symbols
    big_t, n = len(obs), model.n_states
    emit = model.b[:, obs].T
    beta = np.zeros((big_t, n))
    beta[big_t - 1] = 1.0
    for t in range(big_t - 2, -1, -1):
        beta[t] = (model.a @ (emit[t + 1] * beta[t + 1])) / scales[t + 1]
    return beta


def log_likelihood(model: HmmModel, seq: SymbolSequence) -> float:
    """Natural-log probability of the sequence under the model; -inf if the
    sequence is impossible."""
    return forward(model, seq).log_likelihood


def posteriors(model: HmmModel, seq: SymbolSequence):
    """State posteriors gamma (T x N) and pairwise posteriors xi
    ((T-1) x N x N) given the whole sequence."""
    res = forward(model, seq)
    if not np.isfinite(res.log_likelihood):
        raise DegeneratePosteriorError(
            "sequence has zero probability under the model; posteriors undefined"
        )
    beta = backward(model, seq, res.scales)
    gamma = res.alpha * beta
    obs = seq.symbols
    big_t, n = len(obs), model.n_states
    xi = np.zeros((big_t - 1, n, n))
    for t in range(big_t - 1):
        emit_next = model.b[:, obs[t + 1]] * beta[t + 1]
        xi[t] = (res.alpha[t][:, None] * model.a * emit_next[None, :]) / res.scales[t + 1]
    return gamma, xi


def viterbi(model: HmmModel, seq: SymbolSequence) -> StatePath:
    """Most probable hidden-state path, computed in log space.

    Ties are broken toward the lower state index at every backtrack step,
    so the output is deterministic.
    """
    check_alphabet(model, seq)
    obs = seq.symbols
    big_t, n = len(obs), model.n_states
    with np.errstate(divide="ignore"):
        log_pi = np.log(model.pi)
        log_a = np.log(model.a)
        log_b = np.log(model.b)
    delta = log_pi + log_b[:, obs[0]]
    back = np.zeros((big_t, n), dtype=np.int64)
    for t in range(1, big_t):
        cand = delta[:, None] + log_a  # cand[i, j]: best-so-far into j via i
        back[t] = np.argmax(cand, axis=0)  # argmax takes the lowest index on ties
        delta = cand[back[t], np.arange(n)] + log_b[:, obs[t]]
    best_last = int(np.argmax(delta))
    best_log = float(delta[best_last])
    states = np.zeros(big_t, dtype=np.int64)
    states[big_t - 1] = best_last
    for t in range(big_t - 1, 0, -1):
        states[t - 1] = back[t, states[t]]
    return StatePath(states, best_log, impossible=not np.isfinite(best_log))


def path_log_prob(model: HmmModel, states, seq: SymbolSequence) -> float:
    """Joint log P(path, O | model) for an explicit state path."""
    check_alphabet(model, seq)
    obs = seq.symbols
    states = np.asarray(states, dtype=np.int64)
    with np.errstate(divide="ignore"):
        total = np.log(model.pi[states[0]]) + np.log(model.b[states[0], obs[0]])
        for t in range(1, len(obs)):
            total += np.log(model.a[states[t - 1], states[t]])
            total += np.log(model.b[states[t], obs[t]])
    return float(total)


def sample(model: HmmModel, length: int, seed: int):
    """Draw a state path and symbol sequence of the given length.

    Deterministic for a fixed seed: states come from pi then a, symbols
    from b, all via one seeded generator.
    """
    if length < 1:
        raise ValueError("sample length must be >= 1")
    rng = np.random.default_rng(seed)
    n = model.n_states
    cum_a = np.cumsum(model.a, axis=1)
    states = np.empty(length, dtype=np.int64)
    u_state = rng.random(length)
    states[0] = np.searchsorted(np.cumsum(model.pi), u_state[0], side="right")
    for t in range(1, length):
        states[t] = np.searchsorted(cum_a[states[t - 1]], u_state[t], side="right")
    np.clip(states, 0, n - 1, out=states)
    cum_b = np.cumsum(model.b, axis=1)
    u_sym = rng.random(length)
    symbols = (u_sym[:, None] > cum_b[states]).sum(axis=1)
    np.clip(symbols, 0, model.n_symbols - 1, out=symbols)
    seq = SymbolSequence(symbols, source={"sampled": True, "seed": seed})
    return StatePath(states, path_log_prob(model, states, seq)), seq
