"""HTTP facade for interactive exploration.

Uploads and decompositions live in an in-memory session store keyed by
content hashes, so identical requests are idempotent and repeated grouping
experiments reuse cached eigentriples.  A second identical decompose request
arriving while the first is still running joins the in-flight computation.
With a data directory configured, series and decompositions are persisted in
the CLI file formats and reloaded on startup.

All endpoints sit under ``/api/v1``; errors come back as
``{"code": ..., "message": ...}`` with 404 for unknown ids, 422 for invalid
windows or groupings and 400 for bodies that cannot be parsed.
"""

from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import Future
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .basis import build_basis, gcv_select_dof, project_samples
from .core import Decomposition, Grouping, decompose, reconstruct
from .diagnostics import eigentriple_summary, wcor_matrix
from .errors import FSSAError
from .fileio import (
    decomposition_from_dict,
    decomposition_to_dict,
    read_series_csv,
    rescale_grid,
)

__all__ = ["create_app", "ApiError"]

DEFAULT_RENDER_POINTS = 200


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _not_found(what: str, key: str) -> ApiError:
    return ApiError(404, "not_found", f"unknown {what} id {key!r}")


@dataclass
class _SeriesEntry:
    grid: np.ndarray
    values: np.ndarray
    domain: tuple[float, float]
    text: str


@dataclass
class _DecompositionEntry:
    dec: Decomposition
    series_id: str
    grid: np.ndarray
    domain: tuple[float, float]


@dataclass
class SessionStore:
    """Immutable-once-created entries plus in-flight decompose futures."""

    data_dir: Path | None = None
    series: dict[str, _SeriesEntry] = field(default_factory=dict)
    decompositions: dict[str, _DecompositionEntry] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _jobs: dict[str, Future] = field(default_factory=dict)

    def load_persisted(self) -> None:
        if self.data_dir is None:
            return
        for path in sorted((self.data_dir / "series").glob("*.csv")):
            text = path.read_text()
            grid, values = read_series_csv(text)
            _, domain = rescale_grid(grid)
            self.series[path.stem] = _SeriesEntry(grid, values, domain, text)
        for path in sorted((self.data_dir / "decompositions").glob("*.json")):
            doc = json.loads(path.read_text())
            dec, grid, domain = decomposition_from_dict(doc)
            series_id = doc.get("meta", {}).get("series_id", "")
            self.decompositions[path.stem] = _DecompositionEntry(dec, series_id, grid, domain)

    def put_series(self, text: str) -> tuple[str, _SeriesEntry]:
        grid, values = read_series_csv(text)
        _, domain = rescale_grid(grid)
        key = hashlib.sha1(text.encode()).hexdigest()[:16]
        entry = _SeriesEntry(grid, values, domain, text)
        with self._lock:
            if key not in self.series:
                self.series[key] = entry
                if self.data_dir is not None:
                    folder = self.data_dir / "series"
                    folder.mkdir(parents=True, exist_ok=True)
                    (folder / f"{key}.csv").write_text(text)
            return key, self.series[key]

    def get_series(self, key: str) -> _SeriesEntry:
        with self._lock:
            if key not in self.series:
                raise _not_found("series", key)
            return self.series[key]

    def get_decomposition(self, key: str) -> _DecompositionEntry:
        with self._lock:
            if key not in self.decompositions:
                raise _not_found("decomposition", key)
            return self.decompositions[key]

    def decompose_cached(self, series_id: str, params: dict) -> str:
        """Compute (or join / reuse) the decomposition for these parameters."""
        entry = self.get_series(series_id)
        key_src = json.dumps({"series": series_id, **params}, sort_keys=True)
        key = hashlib.sha1(key_src.encode()).hexdigest()[:16]
        with self._lock:
            if key in self.decompositions:
                return key
            fut = self._jobs.get(key)
            if fut is None:
                fut = Future()
                self._jobs[key] = fut
                owner = True
            else:
                owner = False
        if not owner:
            fut.result()
            return key
        try:
            result = self._compute(entry, series_id, params)
            with self._lock:
                self.decompositions[key] = result
                self._jobs.pop(key, None)
            if self.data_dir is not None:
                folder = self.data_dir / "decompositions"
                folder.mkdir(parents=True, exist_ok=True)
                doc = decomposition_to_dict(result.dec, result.grid, result.domain)
                doc["meta"]["series_id"] = series_id
                (folder / f"{key}.json").write_text(json.dumps(doc))
            fut.set_result(key)
            return key
        except BaseException as exc:
            with self._lock:
                self._jobs.pop(key, None)
            fut.set_exception(exc)
            raise

    @staticmethod
    def _compute(entry: _SeriesEntry, series_id: str, params: dict) -> _DecompositionEntry:
        grid01, _ = rescale_grid(entry.grid)
        if params.get("gcv"):
            d = gcv_select_dof(grid01, entry.values, params["gcv"])
        else:
            d = params["d"]
        basis = build_basis("bspline", int(d))
        fts = project_samples(grid01, entry.values, basis)
        dec = decompose(fts, int(params["L"]), r=params.get("r"))
        return _DecompositionEntry(dec, series_id, entry.grid, entry.domain)


def _parse_groups(payload, r: int) -> Grouping:
    groups = payload.get("groups") if isinstance(payload, dict) else None
    if (
        not isinstance(groups, list)
        or not groups
        or not all(isinstance(g, list) and g for g in groups)
    ):
        raise ApiError(422, "invalid_grouping", "groups must be a non-empty list of index lists")
    try:
        grouping = Grouping(groups=tuple(tuple(int(i) for i in g) for g in groups))
        grouping.validate(r)
    except (FSSAError, TypeError, ValueError) as exc:
        raise ApiError(422, "invalid_grouping", str(exc))
    return grouping


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise ApiError(400, "malformed_body", "request body is not valid JSON")
    if not isinstance(body, dict):
        raise ApiError(400, "malformed_body", "request body must be a JSON object")
    return body


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    store = SessionStore(data_dir=Path(data_dir) if data_dir else None)
    store.load_persisted()

    app = FastAPI(title="fssa explorer service", version=__version__)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def on_api_error(_request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.exception_handler(FSSAError)
    async def on_fssa_error(_request, exc: FSSAError):
        return JSONResponse(status_code=422,
                            content={"code": "invalid_request", "message": str(exc)})

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/v1/series")
    async def upload_series(request: Request):
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            key, entry = store.put_series(text)
        except FSSAError as exc:
            raise ApiError(400, "malformed_body", str(exc))
        return {"series_id": key, "N": entry.values.shape[1], "n": entry.grid.size}

    @app.post("/api/v1/series/{series_id}/decompose")
    async def decompose_series(series_id: str, request: Request):
        body = await _json_body(request)
        if "L" not in body:
            raise ApiError(422, "invalid_window", "body must carry the window length L")
        params = {"L": body["L"]}
        if body.get("gcv"):
            if not isinstance(body["gcv"], list):
                raise ApiError(400, "malformed_body", "gcv must be a list of candidate dimensions")
            params["gcv"] = [int(x) for x in body["gcv"]]
        elif "d" in body:
            params["d"] = int(body["d"])
        else:
            raise ApiError(422, "invalid_request", "body must carry d or gcv candidates")
        if body.get("r") is not None:
            params["r"] = int(body["r"])
        key = store.decompose_cached(series_id, params)
        entry = store.get_decomposition(key)
        return {
            "decomposition_id": key,
            "K": entry.dec.K,
            "r": entry.dec.r,
            "d": entry.dec.basis.d,
            "lambda": entry.dec.eigvals.tolist(),
        }

    @app.get("/api/v1/decompositions/{dec_id}/summary")
    def summary(dec_id: str, grid: int = DEFAULT_RENDER_POINTS):
        entry = store.get_decomposition(dec_id)
        if grid < 2:
            raise ApiError(422, "invalid_request", "grid must be >= 2 points")
        out = eigentriple_summary(entry.dec, np.linspace(0.0, 1.0, grid))
        return {
            "singular_values": out.singular_values.tolist(),
            "percentages": out.percentages.tolist(),
            "v": out.v.T.tolist(),
            "dominant_freqs": out.dominant_freqs.tolist(),
            "render_grid": out.render_grid.tolist(),
            "psi_curves": out.psi_curves.tolist(),
            "lag_norms": out.lag_norms.tolist(),
        }

    @app.post("/api/v1/decompositions/{dec_id}/reconstruct")
    async def reconstruct_groups(dec_id: str, request: Request):
        entry = store.get_decomposition(dec_id)
        grouping = _parse_groups(await _json_body(request), entry.dec.r)
        grid01, _ = rescale_grid(entry.grid)
        series = reconstruct(entry.dec, grouping)
        return {
            "s": entry.grid.tolist(),
            "groups": [
                {
                    "label": label,
                    "indices": list(g),
                    "curves": fts.evaluate(grid01).tolist(),
                }
                for label, g, fts in zip(grouping.group_labels(), grouping.groups, series)
            ],
        }

    @app.post("/api/v1/decompositions/{dec_id}/wcor")
    async def wcor_groups(dec_id: str, request: Request):
        entry = store.get_decomposition(dec_id)
        grouping = _parse_groups(await _json_body(request), entry.dec.r)
        series = reconstruct(entry.dec, grouping)
        if len(series) == 1:
            return {"labels": list(grouping.group_labels()), "values": [[1.0]]}
        out = wcor_matrix(series, entry.dec.L, labels=grouping.group_labels())
        return {"labels": list(out.labels), "values": out.values.tolist()}

    return app
