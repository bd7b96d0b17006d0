"""cursor_hmm: mouse-trace symbolization and HMM task inference.

Pipeline: a timestamped cursor trace is resampled onto areas of interest
(aoi), giving a discrete symbol sequence; per-task HMMs are trained on
such sequences (training); a new sequence is attributed to the task whose
model scores it highest (classify). hmm holds the scoring/decoding core,
io the file formats and bundled fixtures, estimators the sklearn-style
wrappers, cli the command line.
"""

from .aoi import AoiLayout, AoiRegion, CursorTrace, fixation_report, locate, vectorize
from .classify import (
    TaskModelRegistry,
    TaskScoreReport,
    classify,
    decide,
    score_all,
)
from .errors import (
    AlphabetMismatchError,
    CursorHmmError,
    DegeneratePosteriorError,
    InvalidModelError,
    ModelFormatError,
    NoDecisionError,
    ParameterError,
    TrainingDegeneracyError,
)
from .estimators import AoiVectorizer, DiscreteHmm, TaskHmmClassifier
from .hmm import (
    HmmModel,
    StatePath,
    SymbolSequence,
    backward,
    forward,
    log_likelihood,
    posteriors,
    sample,
    validate,
    viterbi,
)
from .training import TrainingConfig, TrainingTrace, baum_welch

__version__ = "0.1.0"
