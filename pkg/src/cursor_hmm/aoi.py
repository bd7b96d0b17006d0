"""Areas of interest: cursor-trace symbolization and fixation rates.

Coordinates are screen pixels, origin top-left, y growing downward.
Regions are half-open rectangles [x, x+w) x [y, y+h), so adjacent tiles
never both claim a boundary pixel; when regions overlap, the one declared
first wins, which makes layout order meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import AlphabetMismatchError, ParameterError
from .hmm import SymbolSequence

DEFAULT_DS_MS = 10.0


@dataclass(frozen=True)
class AoiRegion:
    name: str
    x: float
    y: float
    w: float
    h: float

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h


@dataclass(frozen=True)
class AoiLayout:
    """An ordered set of named screen regions plus the implicit catch-all
    symbol for "outside every region"."""

    regions: Tuple[AoiRegion, ...]
    catch_all: str = "R"

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        names = [r.name for r in self.regions]
        if len(set(names)) != len(names):
            raise ValueError("region names must be unique")
        if self.catch_all in names:
            raise ValueError("catch-all name collides with a region name")
        for r in self.regions:
            if r.w <= 0 or r.h <= 0:
                raise ValueError(f"region {r.name} must have positive width and height")

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return tuple(r.name for r in self.regions) + (self.catch_all,)

    @property
    def n_symbols(self) -> int:
        return len(self.regions) + 1


@dataclass(frozen=True)
class CursorTrace:
    """Timestamped cursor samples (t in ms, x and y in px), timestamps
    strictly increasing."""

    t_ms: np.ndarray
    x: np.ndarray
    y: np.ndarray
    trace_id: Optional[str] = None

    def __post_init__(self):
        t = np.asarray(self.t_ms, dtype=float)
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if not (len(t) == len(x) == len(y)):
            raise ValueError("t_ms, x, y must have equal length")
        if len(t) < 1:
            raise ValueError("a trace needs at least one sample")
        if np.any(np.diff(t) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        for name, arr in (("t_ms", t), ("x", x), ("y", y)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.t_ms)


def locate(layout: AoiLayout, x: float, y: float) -> int:
    """Symbol index of the point: the first declared region containing it,
    or the catch-all index. Total over the whole plane."""
    for i, region in enumerate(layout.regions):
        if region.contains(x, y):
            return i
    return len(layout.regions)


def vectorize(trace: CursorTrace, layout: AoiLayout, ds_ms: float = DEFAULT_DS_MS) -> SymbolSequence:
    """Resample the trace every ds_ms milliseconds and map each tick's
    cursor position to a symbol.

    Ticks run from the first timestamp to the last, inclusive; the
    position at a tick is the latest sample at or before it
    (last-observation-carried-forward).
    """
    if ds_ms <= 0:
        raise ParameterError("ds must be > 0 ms")
    t0, t_last = trace.t_ms[0], trace.t_ms[-1]
    n_ticks = int(np.floor((t_last - t0) / ds_ms)) + 1
    ticks = t0 + ds_ms * np.arange(n_ticks)
    idx = np.searchsorted(trace.t_ms, ticks, side="right") - 1
    symbols = np.fromiter(
        (locate(layout, trace.x[i], trace.y[i]) for i in idx),
        dtype=np.int64,
        count=n_ticks,
    )
    return SymbolSequence(
        symbols,
        source={"trace_id": trace.trace_id, "ds_ms": ds_ms, "alphabet": list(layout.alphabet)},
    )


def fixation_report(seq: SymbolSequence, layout: AoiLayout) -> np.ndarray:
    """Percentage of sequence symbols falling in each region (catch-all
    last); entries sum to 100 before any display rounding."""
    m = layout.n_symbols
    if int(seq.symbols.max()) >= m:
        raise AlphabetMismatchError(
            f"sequence uses symbol index {int(seq.symbols.max())} but the "
            f"layout alphabet has only {m} symbols"
        )
    counts = np.bincount(seq.symbols, minlength=m)
    return 100.0 * counts / len(seq)
