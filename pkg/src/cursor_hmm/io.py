"""File formats and bundled fixtures.

Model files store every probability as a decimal string so the printed
precision of transcribed parameters survives round trips exactly; values
are parsed to floats on load. One file holds one model; a task registry is
a directory of model files whose stems are the task names.

Formats:
  model / layout / report  JSON, UTF-8
  trace                    CSV with header ``t_ms,x,y``
  sequence                 whitespace-separated symbol names
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .aoi import AoiLayout, AoiRegion, CursorTrace
from .classify import TaskModelRegistry
from .errors import ModelFormatError
from .hmm import HmmModel, SymbolSequence, validate

MODEL_FORMAT_VERSION = 1
FIXTURES_ENV_VAR = "CURSOR_HMM_FIXTURES"

_BUNDLED_FIXTURES = Path(__file__).parent / "fixtures"


def fixtures_dir() -> Path:
    override = os.environ.get(FIXTURES_ENV_VAR)
    return Path(override) if override else _BUNDLED_FIXTURES


def _decimal(value: float) -> str:
    # shortest decimal string that round-trips the float exactly
    return repr(float(value))


# ---------------------------------------------------------------- models

def save_model(model: HmmModel, path, metadata: Optional[dict] = None) -> None:
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "model": {
            "n_states": model.n_states,
            "n_symbols": model.n_symbols,
            "symbol_names": list(model.symbol_names),
            "state_names": list(model.state_names) if model.state_names else None,
            "pi": [_decimal(v) for v in model.pi],
            "a": [[_decimal(v) for v in row] for row in model.a],
            "b": [[_decimal(v) for v in row] for row in model.b],
        },
        "metadata": metadata or {},
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_model(path, *, normalize_rows: bool = False) -> HmmModel:
    """Load and validate a model file.

    normalize_rows rescales any probability row whose sum is off by more
    than the stochasticity tolerance; rows already within tolerance are
    left byte-identical. Needed for the bundled learned-parameter
    fixtures, where printed rounding makes one emission row sum to 1.0001.
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: cannot read model file: {exc}") from exc
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise ModelFormatError(f"{path}: missing format_version")
    if payload["format_version"] != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format_version {payload['format_version']!r} "
            f"(this build reads v{MODEL_FORMAT_VERSION})"
        )
    try:
        raw = payload["model"]
        model = HmmModel(
            pi=[float(v) for v in raw["pi"]],
            a=[[float(v) for v in row] for row in raw["a"]],
            b=[[float(v) for v in row] for row in raw["b"]],
            symbol_names=tuple(raw["symbol_names"]),
            state_names=tuple(raw["state_names"]) if raw.get("state_names") else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model payload: {exc}") from exc
    if normalize_rows:
        model = _normalize_out_of_tolerance_rows(model)
    violations = validate(model)
    if violations:
        raise ModelFormatError(f"{path}: invalid model: " + "; ".join(violations))
    return model


def _normalize_out_of_tolerance_rows(model: HmmModel) -> HmmModel:
    from .hmm import STOCHASTIC_TOL

    def fix_vec(v):
        s = v.sum()
        return v / s if abs(s - 1.0) > STOCHASTIC_TOL else v

    return HmmModel(
        pi=fix_vec(model.pi),
        a=np.array([fix_vec(row) for row in model.a]),
        b=np.array([fix_vec(row) for row in model.b]),
        symbol_names=model.symbol_names,
        state_names=model.state_names,
    )


def load_model_metadata(path) -> dict:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return payload.get("metadata", {})


def load_registry(directory) -> TaskModelRegistry:
    """Load every ``*.json`` model in a directory; filename stems become
    task names."""
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise ModelFormatError(f"{directory}: no model files (*.json) found")
    return TaskModelRegistry({p.stem: load_model(p) for p in paths})


# ---------------------------------------------------------------- layouts

def save_layout(layout: AoiLayout, path) -> None:
    payload = {
        "catch_all": layout.catch_all,
        "regions": [
            {"name": r.name, "x": r.x, "y": r.y, "w": r.w, "h": r.h}
            for r in layout.regions
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_layout(path) -> AoiLayout:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        regions = tuple(
            AoiRegion(r["name"], r["x"], r["y"], r["w"], r["h"])
            for r in payload["regions"]
        )
        return AoiLayout(regions=regions, catch_all=payload.get("catch_all", "R"))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: cannot read layout file: {exc}") from exc


# ---------------------------------------------------------------- traces

def save_trace(trace: CursorTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_ms", "x", "y"])
        for t, x, y in zip(trace.t_ms, trace.x, trace.y):
            writer.writerow([_num(t), _num(x), _num(y)])


def _num(v: float):
    return int(v) if float(v).is_integer() else v


def load_trace(path) -> CursorTrace:
    t_ms, xs, ys = [], [], []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_ms", "x", "y"]:
            raise ModelFormatError(f"{path}: expected CSV header 't_ms,x,y'")
        for row in reader:
            if not row:
                continue
            try:
                t, x, y = (float(v) for v in row)
            except ValueError as exc:
                raise ModelFormatError(f"{path}: bad trace row {row!r}") from exc
            t_ms.append(t)
            xs.append(x)
            ys.append(y)
    if not t_ms:
        raise ModelFormatError(f"{path}: trace file has no samples")
    return CursorTrace(t_ms, xs, ys, trace_id=Path(path).stem)


# ---------------------------------------------------------------- sequences

def save_sequence(seq: SymbolSequence, symbol_names, path, per_line: int = 40) -> None:
    names = [symbol_names[i] for i in seq.symbols]
    lines = [
        " ".join(names[i:i + per_line]) for i in range(0, len(names), per_line)
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_sequence(path, symbol_names) -> SymbolSequence:
    index = {name: i for i, name in enumerate(symbol_names)}
    tokens = Path(path).read_text(encoding="utf-8").split()
    if not tokens:
        raise ModelFormatError(f"{path}: sequence file is empty")
    try:
        symbols = [index[tok] for tok in tokens]
    except KeyError as exc:
        raise ModelFormatError(
            f"{path}: unknown symbol {exc.args[0]!r}; alphabet is {list(symbol_names)}"
        ) from exc
    return SymbolSequence(
        np.asarray(symbols), source={"path": str(path), "alphabet": list(symbol_names)}
    )


# ---------------------------------------------------------------- reports

def save_report(report_jsonable: dict, path) -> None:
    Path(path).write_text(
        json.dumps(report_jsonable, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_report(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------- fixtures

@dataclass(frozen=True)
class Table2Row:
    """One published experiment: its declared task, fixation percentages,
    log-likelihood under each task model, and the printed decision."""

    task_id: str
    task_time: int
    task_type: str
    fixation_pct: Dict[str, float]
    scores: Dict[str, float]
    decision: str


def load_initial_model() -> HmmModel:
    return load_model(fixtures_dir() / "initial_model.json")


def load_lambda1() -> HmmModel:
    return load_model(fixtures_dir() / "lambda1.json", normalize_rows=True)


def load_lambda2() -> HmmModel:
    return load_model(fixtures_dir() / "lambda2.json", normalize_rows=True)


def load_example_layout() -> AoiLayout:
    return load_layout(fixtures_dir() / "layout.json")


def load_table2() -> List[Table2Row]:
    payload = json.loads((fixtures_dir() / "table2.json").read_text(encoding="utf-8"))
    return [
        Table2Row(
            task_id=row["task_id"],
            task_time=int(row["task_time"]),
            task_type=row["task_type"],
            fixation_pct={k: float(v) for k, v in row["fixation_pct"].items()},
            scores={k: float(v) for k, v in row["scores"].items()},
            decision=row["decision"],
        )
        for row in payload["rows"]
    ]
