"""File formats: JSON schemas for matrices, channels, ensembles, constraints,
reports, and CSV export of solver traces and sweep tables.

Matrices serialize as row-major arrays of [re, im] pairs.  Infinite values
serialize as the string "inf".  JSON emission is deterministic: floats are
rendered with 17 significant digits, so identical inputs give byte-identical
output.  CSV uses '.' decimals and LF line endings regardless of locale.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .channel import Channel, classical_channel, validate_channel
from .density import DensityMatrix
from .energy import HConstraint
from .ensemble import Ensemble

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "channel_to_dict",
    "channel_from_dict",
    "ensemble_to_dict",
    "ensemble_from_dict",
    "constraint_to_dict",
    "constraint_from_dict",
    "report_to_dict",
    "certificate_to_dict",
    "gap_report_to_dict",
    "dumps",
    "trace_to_csv",
    "counterexample_to_csv",
]


def matrix_to_json(mat: np.ndarray) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def channel_to_dict(phi: Channel) -> dict:
    out = {"dim_in": phi.dim_in, "dim_out": phi.dim_out}
    if phi.kind == "classical":
        out["kind"] = "classical"
        out["stochastic"] = [[float(x) for x in row] for row in phi.stochastic_matrix()]
    else:
        out["kind"] = "kraus"
        out["kraus"] = [matrix_to_json(k) for k in phi.kraus]
    return out


def channel_from_dict(data: dict) -> Channel:
    kind = data.get("kind", "kraus")
    if ("kraus" in data) == ("stochastic" in data):
        raise ValueError("exactly one of 'kraus'/'stochastic' must be present")
    if kind == "classical" or "stochastic" in data:
        return classical_channel(np.array(data["stochastic"], dtype=float))
    kraus = tuple(matrix_from_json(k) for k in data["kraus"])
    return validate_channel(
        Channel(int(data["dim_in"]), int(data["dim_out"]), kraus)
    )


def ensemble_to_dict(pi: Ensemble) -> dict:
    return {
        "weights": [float(w) for w in pi.weights],
        "states": [matrix_to_json(s) for s in pi.states],
    }


def ensemble_from_dict(data: dict, validate_states: bool = True) -> Ensemble:
    states = tuple(matrix_from_json(s) for s in data["states"])
    if validate_states:
        states = tuple(DensityMatrix.validated(s).entries for s in states)
    return Ensemble(np.array(data["weights"], dtype=float), states)


def constraint_to_dict(h: HConstraint) -> dict:
    return {"energies": [float(e) for e in h.energies], "bound": float(h.bound)}


def constraint_from_dict(data: dict) -> HConstraint:
    return HConstraint(np.array(data["energies"], dtype=float), float(data["bound"]))


def report_to_dict(report) -> dict:
    return {
        "chi_value": report.chi_value,
        "certificate_gap": report.certificate_gap,
        "constraint_active": report.constraint_active,
        "lagrange_multiplier": report.lagrange_multiplier,
        "ensemble": ensemble_to_dict(report.ensemble),
        "trace": [
            {
                "iteration": t.iteration,
                "chi": t.chi,
                "gap": t.gap,
                "mean_energy": t.mean_energy,
                "support_size": t.support_size,
            }
            for t in report.trace
        ],
    }


def certificate_to_dict(result, tol: float) -> dict:
    out = {"certificate_gap": result.gap, "optimal": bool(result.gap <= tol)}
    if result.witness is not None:
        out["witness"] = ensemble_to_dict(result.witness)
    return out


def gap_report_to_dict(report) -> dict:
    return {
        "sup_estimate": report.sup_estimate,
        "chi_limit_state": report.chi_limit_state,
        "gap": report.gap,
        "conclusion": report.conclusion,
        "points": [
            {
                "n": p.n,
                "q_n": p.q_n,
                "h_value": p.h_value,
                "one_minus_h": 1.0 - p.h_value,
                "residual": p.residual,
            }
            for p in report.points
        ],
    }


# ---------------------------------------------------------------------------
# deterministic emission


def _fmt_float(x: float) -> str:
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    return f"{x:.17g}"


def _emit(obj) -> str:
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{_emit(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return json.dumps(obj)


def dumps(obj) -> str:
    """Deterministic JSON with 17-significant-digit floats and "inf" markers."""
    return _emit(obj) + "\n"


def _csv_float(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.17g}"


def trace_to_csv(report) -> str:
    lines = ["iter,chi,gap,mean_energy,support_size"]
    for t in report.trace:
        lines.append(
            f"{t.iteration},{_csv_float(t.chi)},{_csv_float(t.gap)},"
            f"{_csv_float(t.mean_energy)},{t.support_size}"
        )
    return "\n".join(lines) + "\n"


def counterexample_to_csv(points) -> str:
    lines = ["n,q_n,h_value,one_minus_h,residual"]
    for p in points:
        lines.append(
            f"{p.n},{_csv_float(p.q_n)},{_csv_float(p.h_value)},"
            f"{_csv_float(1.0 - p.h_value)},{_csv_float(p.residual)}"
        )
    return "\n".join(lines) + "\n"
