"""On-disk formats: sampled-series CSV, decomposition JSON, group strings.

A series file is UTF-8 CSV with a header row; the first column ``s`` holds
the ascending sample grid (any real interval, affinely rescaled to [0, 1] on
ingestion) and the remaining columns ``t1..tN`` hold one curve each.  A
decomposition file is JSON carrying the eigentriples, the basis spec and the
original grid, with full double precision so golden files stay stable.
Group strings use semicolons between groups and comma/dash lists inside:
``"1;2-3;4-5"``.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .basis import BasisSystem, build_basis
from .core import Decomposition, Grouping
from .errors import ConfigurationError
from . import __version__

__all__ = [
    "read_series_csv",
    "write_series_csv",
    "rescale_grid",
    "decomposition_to_dict",
    "decomposition_from_dict",
    "parse_group_string",
    "format_group_string",
]

SIGN_CONVENTION = "largest-abs-entry-of-each-right-vector-positive"


def _fmt(x: float) -> str:
    return repr(float(x))


def read_series_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse a series file; returns (grid, values) with shapes (n,), (n, N)."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 3:
        raise ConfigurationError("series file needs a header and at least 2 grid rows")
    header, data = rows[0], rows[1:]
    width = len(header)
    if width < 5:
        raise ConfigurationError("series file needs at least 4 curve columns")
    try:
        parsed = np.array([[float(cell) for cell in row] for row in data])
    except ValueError as exc:
        raise ConfigurationError(f"non-numeric entry in series file: {exc}")
    if parsed.ndim != 2 or parsed.shape[1] != width:
        raise ConfigurationError("series file rows must all have the header's width")
    grid, values = parsed[:, 0], parsed[:, 1:]
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("grid column must be strictly increasing")
    return grid, values


def write_series_csv(grid, values) -> str:
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s"] + [f"t{j + 1}" for j in range(values.shape[1])])
    for i in range(grid.size):
        writer.writerow([_fmt(grid[i])] + [_fmt(x) for x in values[i]])
    return buf.getvalue()


def rescale_grid(grid: np.ndarray) -> tuple[np.ndarray, tuple[float, float]]:
    """Map an arbitrary real grid affinely onto [0, 1]; returns the domain."""
    lo, hi = float(grid[0]), float(grid[-1])
    if hi <= lo:
        raise ConfigurationError("grid must span a positive interval")
    return (grid - lo) / (hi - lo), (lo, hi)


def _basis_spec(basis: BasisSystem) -> dict:
    if basis.kind == "orthonormal_grid":
        return {"kind": "orthonormal_grid", "n": basis.d}
    return {
        "kind": "bspline",
        "degree": basis.degree,
        "interior_knots": [float(x) for x in basis.knots[basis.degree + 1 : -(basis.degree + 1)]],
    }


def _basis_from_spec(spec: dict) -> BasisSystem:
    if spec["kind"] == "orthonormal_grid":
        return build_basis("orthonormal_grid", int(spec["n"]))
    interior = spec.get("interior_knots", [])
    degree = int(spec["degree"])
    return build_basis("bspline", len(interior) + degree + 1, degree=degree,
                       interior_knots=interior)


def decomposition_to_dict(dec: Decomposition, grid, domain: tuple[float, float]) -> dict:
    return {
        "meta": {
            "version": __version__,
            "N": dec.N,
            "L": dec.L,
            "K": dec.K,
            "d": dec.basis.d,
            "r": dec.r,
            "basis": _basis_spec(dec.basis),
            "grid": [float(x) for x in np.asarray(grid)],
            "domain": [float(domain[0]), float(domain[1])],
        },
        "lambda": dec.eigvals.tolist(),
        "psi_coef": dec.psi.tolist(),
        "v": dec.v.tolist(),
        "sign_convention": SIGN_CONVENTION,
    }


def decomposition_from_dict(doc: dict) -> tuple[Decomposition, np.ndarray, tuple[float, float]]:
    """Rebuild (decomposition, original grid, domain) from a JSON document."""
    try:
        meta = doc["meta"]
        basis = _basis_from_spec(meta["basis"])
        lam = np.asarray(doc["lambda"], dtype=float)
        psi = np.asarray(doc["psi_coef"], dtype=float)
        v = np.asarray(doc["v"], dtype=float)
        L, K = int(meta["L"]), int(meta["K"])
        grid = np.asarray(meta["grid"], dtype=float)
        domain = (float(meta["domain"][0]), float(meta["domain"][1]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed decomposition file: {exc}")
    r = lam.size
    if psi.shape != (L * basis.d, r) or v.shape != (K, r):
        raise ConfigurationError("decomposition file dimensions are inconsistent")
    if np.any(np.diff(lam) > 0):
        raise ConfigurationError("eigenvalues must be non-ascending")
    if int(meta["N"]) != L + K - 1:
        raise ConfigurationError("meta.N inconsistent with L and K")
    dec = Decomposition(basis=basis, L=L, K=K, eigvals=lam, psi=psi, v=v)
    return dec, grid, domain


def parse_group_string(text: str, r: int | None = None) -> Grouping:
    """Parse ``"1;2-3;4-5"`` into a validated grouping.

    When ``r`` is given, dash-range endpoints are clipped to ``r`` (so
    ``"1-300"`` means "1 through the last component" when fewer exist);
    explicit single indices beyond ``r`` stay errors.
    """
    groups: list[tuple[int, ...]] = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            raise ConfigurationError("empty group in group string")
        members: list[int] = []
        for token in chunk.split(","):
            token = token.strip()
            try:
                if "-" in token:
                    a, b = token.split("-", 1)
                    lo, hi = int(a), int(b)
                    if r is not None:
                        hi = min(hi, r)
                    if lo > hi:
                        raise ConfigurationError(
                            f"range {token!r} is empty"
                            + (f" for r={r}" if r is not None else "")
                        )
                    members.extend(range(lo, hi + 1))
                else:
                    members.append(int(token))
            except ValueError:
                raise ConfigurationError(f"bad group token {token!r}")
        groups.append(tuple(members))
    grouping = Grouping(groups=tuple(groups))
    if r is not None:
        grouping.validate(r)
    return grouping


def format_group_string(grouping: Grouping) -> str:
    """Inverse of :func:`parse_group_string`, with runs collapsed to dashes."""
    parts = []
    for g in grouping.groups:
        idx = sorted(g)
        runs: list[list[int]] = [[idx[0], idx[0]]]
        for i in idx[1:]:
            if i == runs[-1][1] + 1:
                runs[-1][1] = i
            else:
                runs.append([i, i])
        parts.append(",".join(str(a) if a == b else f"{a}-{b}" for a, b in runs))
    return ";".join(parts)
