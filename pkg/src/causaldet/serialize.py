"""JSON wire formats for states, channels, scenarios, experiment data and
boundary tables, plus the CSV writers used by the plot-facing outputs.

Parsing reports the JSON path of the offending field; physical validation
errors (for example a non-positive state) propagate as UnphysicalStateError
so callers can distinguish malformed input from unphysical input.
"""
from __future__ import annotations

import csv
import io
from typing import Any, Iterable, Sequence

import numpy as np

from .bounds import BoundaryTable
from .channels import MixedUnitaryChannel, Unitary2, axis_angle_unitary, haar_random_unitary
from .rng import make_rng
from .sampling import ExperimentData, ShotCounts
from .scenarios import CausalScenario, CommonCause, DirectCause, Mixture
from .states import (
    BlochForm,
    TwoQubitState,
    UnphysicalStateError,
    bell_state,
    bloch_compose,
    depolarize,
    werner_state,
)


class SchemaError(ValueError):
    """Malformed document; `path` points at the offending field."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(obj: dict, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError(f"expected an object, got {type(obj).__name__}", path)
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", path)
    return obj[key]


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", path)
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"expected an integer, got {value!r}", path)
    return value


def _real_matrix(value: Any, path: str, shape: tuple[int, int]) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("expected a numeric matrix", path) from None
    if arr.shape != shape:
        raise SchemaError(f"expected shape {shape}, got {arr.shape}", path)
    return arr


def _real_vector(value: Any, path: str, length: int) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("expected a numeric vector", path) from None
    if arr.shape != (length,):
        raise SchemaError(f"expected {length} components, got shape {arr.shape}", path)
    return arr


def _complex_matrix(obj: Any, path: str, n: int) -> np.ndarray:
    re = _real_matrix(_require(obj, "re", path), f"{path}.re", (n, n))
    im = np.zeros((n, n))
    if isinstance(obj, dict) and "im" in obj:
        im = _real_matrix(obj["im"], f"{path}.im", (n, n))
    return re + 1j * im


def state_from_json(obj: Any, path: str = "$") -> TwoQubitState:
    """Parse a state document: bell | werner | bloch | dense, with an optional
    trailing depolarize weight."""
    kind = _require(obj, "type", path)
    if kind == "bell":
        index = _integer(_require(obj, "index", path), f"{path}.index")
        if index not in (0, 1, 2, 3):
            raise SchemaError(f"Bell index must be in 0..3, got {index}", f"{path}.index")
        state = bell_state(index)
    elif kind == "werner":
        omega = _number(_require(obj, "omega", path), f"{path}.omega")
        state = werner_state(omega)
    elif kind == "bloch":
        v_a = _real_vector(_require(obj, "vA", path), f"{path}.vA", 3)
        v_b = _real_vector(_require(obj, "vB", path), f"{path}.vB", 3)
        m = _real_matrix(_require(obj, "M", path), f"{path}.M", (3, 3))
        try:
            state = bloch_compose(BlochForm(v_a, v_b, m))
        except UnphysicalStateError:
            raise
        except ValueError as exc:
            # component range violations are unphysical, not malformed
            raise UnphysicalStateError(f"not a physical state: {exc}") from None
    elif kind == "dense":
        state = TwoQubitState(_complex_matrix(obj, path, 4))
    else:
        raise SchemaError(f"unknown state type {kind!r}", f"{path}.type")
    if "depolarize" in obj:
        eps = _number(obj["depolarize"], f"{path}.depolarize")
        if not 0.0 <= eps <= 1.0:
            raise SchemaError(f"depolarize must lie in [0, 1], got {eps}", f"{path}.depolarize")
        state = depolarize(state, eps)
    return state


def state_to_json(state: TwoQubitState) -> dict:
    return {
        "type": "dense",
        "re": state.rho.real.tolist(),
        "im": state.rho.imag.tolist(),
    }


def _unitary_from_json(obj: Any, path: str) -> Unitary2:
    if isinstance(obj, dict) and "axis" in obj:
        axis = _real_vector(_require(obj, "axis", path), f"{path}.axis", 3)
        angle = _number(_require(obj, "angle", path), f"{path}.angle")
        try:
            return axis_angle_unitary(axis, angle)
        except ValueError as exc:
            raise SchemaError(str(exc), path) from None
    mat = _complex_matrix(obj, path, 2)
    try:
        return Unitary2(mat)
    except ValueError as exc:
        raise SchemaError(str(exc), path) from None


def channel_from_json(obj: Any, path: str = "$") -> MixedUnitaryChannel:
    """Parse a channel document: unitary | mixed | haar, or the axis-angle
    shorthand for a single unitary."""
    if isinstance(obj, dict) and "axis" in obj and "type" not in obj:
        return MixedUnitaryChannel(np.array([1.0]), (_unitary_from_json(obj, path),))
    kind = _require(obj, "type", path)
    if kind == "unitary":
        u = _unitary_from_json(_require(obj, "matrix", path), f"{path}.matrix")
        return MixedUnitaryChannel(np.array([1.0]), (u,))
    if kind == "mixed":
        terms = _require(obj, "terms", path)
        if not isinstance(terms, list) or not terms:
            raise SchemaError("expected a non-empty list of terms", f"{path}.terms")
        weights = []
        unitaries = []
        for i, term in enumerate(terms):
            tpath = f"{path}.terms[{i}]"
            weights.append(_number(_require(term, "weight", tpath), f"{tpath}.weight"))
            unitaries.append(
                _unitary_from_json(_require(term, "unitary", tpath), f"{tpath}.unitary")
            )
        try:
            return MixedUnitaryChannel(np.array(weights), tuple(unitaries))
        except ValueError as exc:
            raise SchemaError(str(exc), f"{path}.terms") from None
    if kind == "haar":
        seed = _integer(_require(obj, "seed", path), f"{path}.seed")
        return MixedUnitaryChannel(np.array([1.0]), (haar_random_unitary(make_rng(seed)),))
    raise SchemaError(f"unknown channel type {kind!r}", f"{path}.type")


def channel_to_json(ch: MixedUnitaryChannel) -> dict:
    return {
        "type": "mixed",
        "terms": [
            {
                "weight": float(w),
                "unitary": {"re": t.u.real.tolist(), "im": t.u.imag.tolist()},
            }
            for w, t in zip(ch.weights, ch.unitaries)
        ],
    }


def scenario_from_json(obj: Any, path: str = "$") -> CausalScenario:
    """Parse a scenario document: direct | common | mixture."""
    kind = _require(obj, "type", path)
    if kind == "direct":
        channel = channel_from_json(_require(obj, "channel", path), f"{path}.channel")
        return DirectCause(channel)
    if kind == "common":
        state = state_from_json(_require(obj, "state", path), f"{path}.state")
        return CommonCause(state)
    if kind == "mixture":
        p = _number(_require(obj, "p", path), f"{path}.p")
        if not 0.0 <= p <= 1.0:
            raise SchemaError(f"p must lie in [0, 1], got {p}", f"{path}.p")
        channel = channel_from_json(_require(obj, "channel", path), f"{path}.channel")
        state = state_from_json(_require(obj, "state", path), f"{path}.state")
        return Mixture(p, channel, state)
    raise SchemaError(f"unknown scenario type {kind!r}", f"{path}.type")


def scenario_to_json(sc: CausalScenario) -> dict:
    if isinstance(sc, DirectCause):
        return {"type": "direct", "channel": channel_to_json(sc.channel)}
    if isinstance(sc, CommonCause):
        return {"type": "common", "state": state_to_json(sc.state)}
    if isinstance(sc, Mixture):
        return {
            "type": "mixture",
            "p": sc.p,
            "channel": channel_to_json(sc.channel),
            "state": state_to_json(sc.state),
        }
    raise TypeError(f"not a causal scenario: {type(sc).__name__}")


def experiment_to_json(data: ExperimentData) -> dict:
    return {
        "scenario": data.scenario_descriptor,
        "shots": data.shots_per_setting,
        "seed": data.seed,
        "records": [
            {
                "j": r.j,
                "k": r.k,
                "npp": r.n_pp,
                "npm": r.n_pm,
                "nmp": r.n_mp,
                "nmm": r.n_mm,
            }
            for r in data.records
        ],
    }


def experiment_from_json(obj: Any, path: str = "$") -> ExperimentData:
    """Parse experiment counts; accepts externally recorded data."""
    shots = _integer(_require(obj, "shots", path), f"{path}.shots")
    seed = _integer(_require(obj, "seed", path), f"{path}.seed")
    records_obj = _require(obj, "records", path)
    if not isinstance(records_obj, list):
        raise SchemaError("expected a list of setting records", f"{path}.records")
    records = []
    for i, rec in enumerate(records_obj):
        rpath = f"{path}.records[{i}]"
        fields = {}
        for name in ("j", "k", "npp", "npm", "nmp", "nmm"):
            fields[name] = _integer(_require(rec, name, rpath), f"{rpath}.{name}")
        try:
            records.append(
                ShotCounts(
                    fields["j"],
                    fields["k"],
                    fields["npp"],
                    fields["npm"],
                    fields["nmp"],
                    fields["nmm"],
                )
            )
        except ValueError as exc:
            raise SchemaError(str(exc), rpath) from None
    scenario = obj.get("scenario") if isinstance(obj, dict) else None
    try:
        return ExperimentData(tuple(records), shots, seed, scenario)
    except ValueError as exc:
        raise SchemaError(str(exc), f"{path}.records") from None


def boundary_table_to_json(table: BoundaryTable) -> dict:
    return {
        "ndc_class": table.ndc_class,
        "p_grid": table.p_grid.tolist(),
        "lower": table.lower.tolist(),
        "upper": table.upper.tolist(),
        "restarts": table.restarts,
        "tolerance": table.tolerance,
        "seed": table.seed,
    }


def boundary_table_from_json(obj: Any, path: str = "$") -> BoundaryTable:
    ndc_class = _integer(_require(obj, "ndc_class", path), f"{path}.ndc_class")
    p_grid = _require(obj, "p_grid", path)
    lower = _require(obj, "lower", path)
    upper = _require(obj, "upper", path)
    try:
        return BoundaryTable(
            ndc_class=ndc_class,
            p_grid=np.asarray(p_grid, dtype=float),
            lower=np.asarray(lower, dtype=float),
            upper=np.asarray(upper, dtype=float),
            restarts=_integer(obj.get("restarts", 0), f"{path}.restarts"),
            tolerance=_number(obj.get("tolerance", 0.0), f"{path}.tolerance"),
            seed=_integer(obj.get("seed", 0), f"{path}.seed"),
        )
    except ValueError as exc:
        raise SchemaError(str(exc), path) from None


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as CSV: fixed header, UTF-8 friendly, '.' decimal point."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()
