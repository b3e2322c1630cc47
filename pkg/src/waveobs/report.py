"""Analysis reports: stable structured text plus a lossless JSON rendering.

The report holds only plain values (strings, numbers, lists), so the JSON
form round-trips exactly and text output is byte-stable for fixed inputs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .verdict import Verdict


@dataclass
class AnalysisReport:
    tool: str
    version: str
    region: str
    resolution: Dict[str, Any]
    seed: int
    gcc: Dict[str, Any]
    symmetry: Dict[str, Any]
    verdict: Dict[str, Any]
    estimator: Optional[Dict[str, Any]] = None
    simulation: Optional[Dict[str, Any]] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls(**json.loads(text))

    def to_text(self) -> str:
        lines: List[str] = []
        emit = lines.append
        emit(f"{self.tool} {self.version} analysis report")
        emit(f"region: {self.region}")
        emit("resolution:")
        for key in sorted(self.resolution):
            emit(f"  {key}: {_fmt(self.resolution[key])}")
        emit(f"seed: {self.seed}")
        emit("gcc:")
        for key in sorted(self.gcc):
            emit(f"  {key}: {_fmt(self.gcc[key])}")
        emit("symmetry:")
        for key in sorted(self.symmetry):
            emit(f"  {key}: {_fmt(self.symmetry[key])}")
        emit("verdict:")
        for key in sorted(self.verdict):
            emit(f"  {key}: {_fmt(self.verdict[key])}")
        if self.estimator is not None:
            emit("estimator:")
            for key in sorted(self.estimator):
                emit(f"  {key}: {_fmt(self.estimator[key])}")
        if self.simulation is not None:
            emit("simulation:")
            for key in sorted(self.simulation):
                emit(f"  {key}: {_fmt(self.simulation[key])}")
        return "\n".join(lines) + "\n"


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _bins_to_ranges(bins: np.ndarray) -> List[List[int]]:
    """Boolean bin mask -> list of [start, stop) index runs (cyclic not merged)."""
    idx = np.flatnonzero(np.asarray(bins, dtype=bool))
    runs: List[List[int]] = []
    for j in idx:
        if runs and runs[-1][1] == j:
            runs[-1][1] = int(j) + 1
        else:
            runs.append([int(j), int(j) + 1])
    return runs


def build_report(region_text: str, verdict: Verdict, seed: int,
                 version: str = "0.1.0") -> AnalysisReport:
    gcc = verdict.gcc
    gcc_block: Dict[str, Any] = {
        "holds": gcc.holds,
        "weak_holds": gcc.weak_holds,
        "c0_time": gcc.c0_est,
        "c0_line": gcc.c0_line_est,
        "floor": gcc.floor,
        "zero_fiber_count_xi": len(gcc.zero_fibers_xi),
        "zero_fiber_count_eta": len(gcc.zero_fibers_eta),
        "worst_fibers": [list(wf) for wf in gcc.worst_fibers[:4]],
    }
    sym_block: Dict[str, Any]
    if verdict.symmetry is None:
        sym_block = {"kind": "skipped"}
    else:
        sym = verdict.symmetry
        sym_block = {"kind": sym.kind, "components": sym.component_count}
        if sym.kind == "pair" and sym.pair is not None:
            dx = 2.0 * np.pi / len(sym.pair[0])
            sym_block["pair_a_arcs"] = [
                [r[0] * dx, r[1] * dx] for r in _bins_to_ranges(sym.pair[0])
            ]
            sym_block["pair_b_arcs"] = [
                [r[0] * dx, r[1] * dx] for r in _bins_to_ranges(sym.pair[1])
            ]
            sym_block["symdiff_measure"] = sym.symdiff_measure
        if sym.kind == "weak_gcc_failure":
            sym_block["zero_fibers_xi"] = [int(b) for b in sym.zero_fibers_xi[:16]]
            sym_block["zero_fibers_eta"] = [int(b) for b in sym.zero_fibers_eta[:16]]
    verdict_block: Dict[str, Any] = {
        "observable": verdict.observable,
        "controllable": verdict.controllable,
        "unique_continuation": verdict.ucp,
        "reasons": list(verdict.reasons),
    }
    est_block = None
    if verdict.estimator is not None:
        est_block = {
            "lambda_min": verdict.estimator.lambda_min,
            "c_obs": verdict.estimator.c_obs,
            "n_modes": verdict.estimator.n_modes,
            "trace": [[int(n), float(v)] for n, v in verdict.estimator.trace],
        }
    return AnalysisReport(
        tool="waveobs",
        version=version,
        region=region_text,
        resolution=dict(verdict.provenance),
        seed=seed,
        gcc=gcc_block,
        symmetry=sym_block,
        verdict=verdict_block,
        estimator=est_block,
    )
