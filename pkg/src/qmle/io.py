"""File formats: states and POMs (JSON), counts (text), traces (CSV).

Complex entries are ``[re, im]`` pairs. Counts files start with
``N <total copies>`` or ``N exact`` followed by ``<flat index> <value>``
lines, one per outcome with a nonzero count.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .likelihood import Frequencies
from .measurements import (POM, ProductPOM, pauli6_register, product_pom, sic_from_fiducial,
                           tetrahedron_register)
from .operators import add_white_noise, ghz_state, haar_random_pure, pure_to_density, w_state

TRACE_HEADER = ["iter", "elapsed_s", "F", "step", "restart", "phase"]


class FormatError(ValueError):
    pass


def _pairs(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _complex(x, what: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (2,):
        raise FormatError(f"{what}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _load_json(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return obj


def write_state(path, state: np.ndarray) -> None:
    """Write a density matrix (2-D) or pure state (1-D)."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        obj = {"dim": state.size, "amplitudes": _pairs(state)}
    else:
        obj = {"dim": state.shape[0], "matrix": _pairs(state)}
    Path(path).write_text(json.dumps(obj), encoding="utf-8")


def read_state(path) -> np.ndarray:
    """Matrix for ``matrix`` files, amplitude vector for ``amplitudes`` files."""
    obj = _load_json(path)
    try:
        d = int(obj["dim"])
        if "matrix" in obj:
            m = _complex(obj["matrix"], str(path))
            if m.shape != (d, d):
                raise FormatError(f"{path}: matrix shape {m.shape} does not match dim {d}")
            return m
        v = _complex(obj["amplitudes"], str(path))
    except KeyError as exc:
        raise FormatError(f"{path}: missing field {exc}") from exc
    if v.shape != (d,):
        raise FormatError(f"{path}: {v.size} amplitudes for dim {d}")
    return v


def read_density(path) -> np.ndarray:
    s = read_state(path)
    return pure_to_density(s) if s.ndim == 1 else s


def write_pom(path, pom: POM) -> None:
    obj = {"dim": pom.dim, "elements": [_pairs(e) for e in pom.elements]}
    Path(path).write_text(json.dumps(obj), encoding="utf-8")


def read_pom(path) -> POM:
    obj = _load_json(path)
    try:
        d = int(obj["dim"])
        els = _complex(obj["elements"], str(path))
    except KeyError as exc:
        raise FormatError(f"{path}: missing field {exc}") from exc
    if els.ndim != 3 or els.shape[1:] != (d, d):
        raise FormatError(f"{path}: elements must be {d}x{d} matrices")
    return POM.from_elements(els, Path(path).stem)


def parse_pom_spec(spec: str) -> POM | ProductPOM:
    """``pauli6``, ``tetrahedron``, ``sic:<fiducial file>``, ``file:<pom file>`` or ``prod:<register spec>:<n>``."""
    if spec == "pauli6":
        return pauli6_register()
    if spec == "tetrahedron":
        return tetrahedron_register()
    if spec.startswith("prod:"):
        inner, _, n = spec[5:].rpartition(":")
        if not inner or not n.isdigit():
            raise FormatError(f"bad product POM spec {spec!r}; expected prod:<register>:<n>")
        reg = parse_pom_spec(inner)
        if isinstance(reg, ProductPOM):
            raise FormatError("nested product POM specs are not supported")
        return product_pom(reg, int(n))
    if spec.startswith("sic:"):
        fid = read_state(spec[4:])
        if fid.ndim != 1:
            raise FormatError("SIC fiducial file must hold amplitudes")
        return sic_from_fiducial(fid)
    if spec.startswith("file:"):
        return read_pom(spec[5:])
    raise FormatError(f"unknown POM spec {spec!r}")


def parse_state_spec(spec: str, dim: int, noise: float = 0.0) -> np.ndarray:
    """Density matrix for ``haar:<seed>``, ``w``, ``ghz`` or ``file:<path>``, then depolarized."""
    if spec.startswith("haar:"):
        rho = pure_to_density(haar_random_pure(dim, int(spec[5:])))
    elif spec in ("w", "ghz"):
        n = int(round(math.log2(dim)))
        if 2**n != dim:
            raise FormatError(f"{spec} state needs a qubit system, got dimension {dim}")
        rho = pure_to_density(w_state(n) if spec == "w" else ghz_state(n))
    elif spec.startswith("file:"):
        rho = read_density(spec[5:])
        if rho.shape != (dim, dim):
            raise FormatError(f"state dimension {rho.shape[0]} does not match POM dimension {dim}")
    else:
        raise FormatError(f"unknown state spec {spec!r}")
    return add_white_noise(rho, noise)


def write_counts(path, freq: Frequencies) -> None:
    lines = []
    if freq.is_exact:
        lines.append("N exact")
        lines += [f"{k} {v!r}" for k, v in zip(freq.indices.tolist(), freq.values.tolist())]
    else:
        counts = np.rint(freq.values * freq.total).astype(np.int64)
        lines.append(f"N {freq.total}")
        lines += [f"{k} {c}" for k, c in zip(freq.indices.tolist(), counts.tolist())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_counts(path, num_outcomes: int | None = None) -> Frequencies:
    rows = [ln.split() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not rows or rows[0][0] != "N" or len(rows[0]) != 2:
        raise FormatError(f"{path}: first line must be 'N <total>' or 'N exact'")
    exact = rows[0][1] == "exact"
    try:
        total = None if exact else int(rows[0][1])
        idx = np.array([int(r[0]) for r in rows[1:]], dtype=np.int64)
        vals = np.array([float(r[1]) if exact else int(r[1]) for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed line ({exc})") from exc
    if any(len(r) != 2 for r in rows[1:]):
        raise FormatError(f"{path}: each data line needs exactly two fields")
    if idx.size == 0:
        raise FormatError(f"{path}: no outcomes")
    if np.any(idx < 0) or (num_outcomes is not None and np.any(idx >= num_outcomes)):
        raise FormatError(f"{path}: outcome index out of range")
    if np.any(vals <= 0):
        raise FormatError(f"{path}: values must be positive (omit zero counts)")
    if exact:
        if abs(vals.sum() - 1.0) > 1e-9:
            raise FormatError(f"{path}: exact frequencies sum to {vals.sum()!r}")
        if abs(vals.sum() - 1.0) > 1e-12:
            vals = vals / vals.sum()
    elif total <= 0 or int(vals.sum()) != total:
        raise FormatError(f"{path}: counts sum to {int(vals.sum())}, header says N {total}")
    try:
        return Frequencies(idx, vals if exact else vals / total, total)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_trace_csv(path, trace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for r in trace.records:
            w.writerow([r.iteration, f"{r.elapsed:.6f}", f"{r.F:.15g}", f"{r.step:.6g}", int(r.restarted), r.phase])


def read_trace_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
