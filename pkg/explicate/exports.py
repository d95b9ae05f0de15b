"""CSV and JSON artifacts of scenario runs.

CSV files are long-format tables with one comment line and a header, written with
full double precision so identical runs give identical files.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

import numpy as np
import pandas as pd

from .enums import Representation
from .evolution import EvolutionTrace, ResidualSeries
from .projection import ExplicateFrame, PolarField
from .trajectories import Trajectory, bohm_momentum_field, bohm_position_field

FLOAT_FORMAT = "%.17g"
CHECKPOINTS = 64


def checkpoint_stride(count: int, checkpoints: int = CHECKPOINTS) -> int:
    """Stride that keeps at most about ``checkpoints`` snapshots of a long run."""
    return max(1, math.ceil(count / checkpoints))


def to_jsonable(value: Any) -> Any:
    """Plain JSON types for reports; NaN and infinities become null."""
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(dataclasses.asdict(value))
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, (np.complexfloating, complex)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, Path):
        return str(value)
    return value


class ArtifactWriter:
    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def _register(self, name: str) -> Path:
        if name not in self.files:
            self.files.append(name)
        return self.directory / name

    def write_csv(self, name: str, frame: pd.DataFrame, description: str | None = None) -> Path:
        path = self._register(name)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            if description:
                handle.write(f"# {description}\n")
            frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, na_rep="NaN", lineterminator="\n")
        return path

    def write_json(self, name: str, data: Any) -> Path:
        path = self._register(name)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(to_jsonable(data), handle, indent=2, allow_nan=False)
            handle.write("\n")
        return path


def _coordinate_name(representation: str) -> str:
    return "x" if representation == Representation.POSITION else "p"


def trace_frame(trace: EvolutionTrace, stride: int = 1) -> pd.DataFrame:
    """Columns snapshot, t, x (or p), re_psi, im_psi."""
    indices = np.arange(0, len(trace), stride)
    amplitudes = trace.amplitudes[indices]
    size = trace.grid.size
    return pd.DataFrame(
        {
            "snapshot": np.repeat(indices, size),
            "t": np.repeat(trace.times[indices], size),
            _coordinate_name(trace.representation): np.tile(trace.grid.points, len(indices)),
            "re_psi": amplitudes.real.ravel(),
            "im_psi": amplitudes.imag.ravel(),
        }
    )


def field_frame(frames: Sequence[ExplicateFrame], stride: int = 1) -> pd.DataFrame:
    """Columns t, x (or p), P, S, Q and the conjugate Bohm field p_B (or x_B)."""
    selected = list(frames)[::stride]
    representation = selected[0].representation
    if representation == Representation.POSITION:
        conjugate_name, sign = "p_B", 1.0
    else:
        conjugate_name, sign = "x_B", -1.0

    size = selected[0].grid.size
    return pd.DataFrame(
        {
            "t": np.repeat([frame.time for frame in selected], size),
            _coordinate_name(representation): np.tile(selected[0].grid.points, len(selected)),
            "P": np.concatenate([frame.density for frame in selected]),
            "S": np.concatenate([frame.polar.phase for frame in selected]),
            "Q": np.concatenate([frame.quantum_potential for frame in selected]),
            conjugate_name: np.concatenate([sign * frame.phase_gradient for frame in selected]),
        }
    )


def bohm_field_frame(polars: Sequence[PolarField], stride: int = 1) -> pd.DataFrame:
    """Columns t, x (or p), P, S and the Bohm field, for fields without a quantum potential."""
    selected = list(polars)[::stride]
    representation = selected[0].representation
    if representation == Representation.POSITION:
        conjugate_name, bohm_field = "p_B", bohm_momentum_field
    else:
        conjugate_name, bohm_field = "x_B", bohm_position_field

    size = selected[0].grid.size
    return pd.DataFrame(
        {
            "t": np.repeat([polar.time for polar in selected], size),
            _coordinate_name(representation): np.tile(selected[0].grid.points, len(selected)),
            "P": np.concatenate([polar.amplitude**2 for polar in selected]),
            "S": np.concatenate([polar.phase for polar in selected]),
            conjugate_name: np.concatenate([bohm_field(polar) for polar in selected]),
        }
    )


def residual_frame(series: Dict[str, ResidualSeries]) -> pd.DataFrame:
    """One column per residual, outer-joined on t."""
    frame = None
    for name, residual in series.items():
        column = pd.DataFrame({"t": residual.times, name: residual.values})
        frame = column if frame is None else frame.merge(column, on="t", how="outer")
    return frame.sort_values("t", ignore_index=True)


def trajectory_frame(trajectories: Iterable[Trajectory]) -> pd.DataFrame:
    """Columns trajectory_id, t, x; samples after a trajectory stops are dropped."""
    parts = []
    for index, trajectory in enumerate(trajectories):
        keep = np.isfinite(trajectory.positions)
        parts.append(
            pd.DataFrame(
                {
                    "trajectory_id": index,
                    "t": trajectory.times[keep],
                    "x": trajectory.positions[keep],
                }
            )
        )
    return pd.concat(parts, ignore_index=True)
