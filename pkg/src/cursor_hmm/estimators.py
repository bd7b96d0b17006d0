"""Scikit-learn style wrappers around the functional core.

These let the vectorizer, the HMM trainer, and the task classifier slot
into sklearn pipelines and model-selection tooling: they expose
get_params/set_params via BaseEstimator and the usual fit/transform/
predict verbs. X is a list of traces (for the vectorizer) or a list of
symbol sequences (for the models); sequences may have different lengths,
so X is never coerced to a rectangular array.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import hmm
from .aoi import DEFAULT_DS_MS, AoiLayout, CursorTrace, vectorize
from .classify import TaskModelRegistry, TaskScoreReport, classify
from .hmm import HmmModel, SymbolSequence
from .training import TrainingConfig, baum_welch


def as_symbol_sequence(x) -> SymbolSequence:
    """Accept a SymbolSequence or any 1-d index array-like."""
    if isinstance(x, SymbolSequence):
        return x
    return SymbolSequence(np.asarray(x, dtype=np.int64))


class AoiVectorizer(TransformerMixin, BaseEstimator):
    """Turns timestamped cursor traces into AOI symbol sequences.

    Stateless apart from its parameters; fit only validates them.
    """

    def __init__(self, layout: Optional[AoiLayout] = None, ds_ms: float = DEFAULT_DS_MS):
        self.layout = layout
        self.ds_ms = ds_ms

    def fit(self, X=None, y=None):
        if self.layout is None:
            raise ValueError("AoiVectorizer requires a layout")
        if self.ds_ms <= 0:
            raise ValueError("ds_ms must be > 0")
        return self

    def transform(self, X: Sequence[CursorTrace]) -> List[SymbolSequence]:
        self.fit()
        return [vectorize(trace, self.layout, self.ds_ms) for trace in X]

    def get_feature_names_out(self, input_features=None):
        self.fit()
        return np.asarray(self.layout.alphabet, dtype=object)


class DiscreteHmm(BaseEstimator):
    """A single discrete HMM fitted by Baum-Welch.

    Either pass an explicit starting model (init_model) or let fit build a
    random row-stochastic start with n_states x n_symbols from
    random_state. After fit, model_ holds the trained model and
    training_trace_ the per-iteration log-likelihoods.
    """

    def __init__(
        self,
        n_states: int = 2,
        n_symbols: Optional[int] = None,
        init_model: Optional[HmmModel] = None,
        max_iters: int = 100,
        tol: float = 1e-6,
        prob_floor: float = 1e-6,
        freeze_pi: bool = False,
        random_state: Optional[int] = None,
    ):
        self.n_states = n_states
        self.n_symbols = n_symbols
        self.init_model = init_model
        self.max_iters = max_iters
        self.tol = tol
        self.prob_floor = prob_floor
        self.freeze_pi = freeze_pi
        self.random_state = random_state

    def _config(self) -> TrainingConfig:
        return TrainingConfig(
            max_iters=self.max_iters,
            ll_tolerance=self.tol,
            prob_floor=self.prob_floor,
            freeze_pi=self.freeze_pi,
        )

    def _starting_model(self, sequences) -> HmmModel:
        if self.init_model is not None:
            return self.init_model
        m = self.n_symbols
        if m is None:
            m = 1 + max(int(seq.symbols.max()) for seq in sequences)
        rng = np.random.default_rng(self.random_state)
        dirichlet = lambda size: rng.dirichlet(np.ones(size[-1]), size=size[:-1] or None)
        return HmmModel(
            pi=rng.dirichlet(np.ones(self.n_states)),
            a=dirichlet((self.n_states, self.n_states)),
            b=dirichlet((self.n_states, m)),
            symbol_names=tuple(str(k) for k in range(m)),
        )

    def fit(self, X, y=None):
        sequences = [as_symbol_sequence(x) for x in X]
        model0 = self._starting_model(sequences)
        self.model_, self.training_trace_ = baum_welch(model0, sequences, self._config())
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("this DiscreteHmm instance is not fitted yet")

    def score(self, X, y=None) -> float:
        """Total log-likelihood of the sequences under the fitted model."""
        self._check_fitted()
        return float(
            sum(hmm.log_likelihood(self.model_, as_symbol_sequence(x)) for x in X)
        )

    def score_samples(self, X) -> np.ndarray:
        self._check_fitted()
        return np.array(
            [hmm.log_likelihood(self.model_, as_symbol_sequence(x)) for x in X]
        )

    def decode(self, x) -> hmm.StatePath:
        self._check_fitted()
        return hmm.viterbi(self.model_, as_symbol_sequence(x))

    def sample(self, length: int, seed: int):
        self._check_fitted()
        return hmm.sample(self.model_, length, seed)


class TaskHmmClassifier(ClassifierMixin, BaseEstimator):
    """Maximum-likelihood task classifier: one HMM per label.

    fit trains a DiscreteHmm per distinct label in y on that label's
    sequences; predict scores a sequence under every per-task model and
    returns the label with the highest log-likelihood.
    """

    def __init__(
        self,
        n_states: int = 2,
        init_model: Optional[HmmModel] = None,
        max_iters: int = 100,
        tol: float = 1e-6,
        prob_floor: float = 1e-6,
        freeze_pi: bool = False,
        random_state: Optional[int] = None,
    ):
        self.n_states = n_states
        self.init_model = init_model
        self.max_iters = max_iters
        self.tol = tol
        self.prob_floor = prob_floor
        self.freeze_pi = freeze_pi
        self.random_state = random_state

    def fit(self, X, y):
        sequences = [as_symbol_sequence(x) for x in X]
        labels = np.asarray(y, dtype=object)
        if len(labels) != len(sequences):
            raise ValueError("X and y must have the same length")
        self.classes_ = np.unique(labels)
        n_symbols = 1 + max(int(seq.symbols.max()) for seq in sequences)
        entries = {}
        for label in self.classes_:
            member = [s for s, lab in zip(sequences, labels) if lab == label]
            est = DiscreteHmm(
                n_states=self.n_states,
                n_symbols=None if self.init_model is not None else n_symbols,
                init_model=self.init_model,
                max_iters=self.max_iters,
                tol=self.tol,
                prob_floor=self.prob_floor,
                freeze_pi=self.freeze_pi,
                random_state=self.random_state,
            ).fit(member)
            entries[str(label)] = est.model_
        self.registry_ = TaskModelRegistry(entries)
        return self

    def _check_fitted(self):
        if not hasattr(self, "registry_"):
            raise NotFittedError("this TaskHmmClassifier instance is not fitted yet")

    def classify(self, x) -> TaskScoreReport:
        """Full score report (all log-likelihoods, winner, margin, tie)."""
        self._check_fitted()
        return classify(self.registry_, as_symbol_sequence(x))

    def predict(self, X) -> np.ndarray:
        return np.array([self.classify(x).winner for x in X], dtype=object)

    def decision_margins(self, X) -> np.ndarray:
        """Winner-minus-runner-up log-likelihood gap per sequence."""
        return np.array([self.classify(x).margin for x in X])
