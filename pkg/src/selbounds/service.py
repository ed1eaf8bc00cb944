"""Stateless HTTP JSON API.

Every endpoint is a pure function of its request body and mirrors the
library semantics exactly, so identical requests always produce identical
responses. Responses use a uniform envelope:

    {"ok": true,  "result": ...}
    {"ok": false, "error": {"code": ..., "message": ..., "field": ...}}

Status codes: 400 for malformed input, 422 for domain or computation
errors, 404 for unknown routes, 500 (with a generic message) for anything
unexpected. CORS is enabled for local development. When a static asset
directory is configured, GET requests outside /api serve the workbench.
"""

from __future__ import annotations

import json
import mimetypes
import posixpath
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from . import dataset as ds
from .bounds import (
    EstimandKind,
    ObservedSummary,
    SensitivityParamsSub,
    SensitivityParamsTotal,
    af_bound,
    sv_bound,
)
from .errors import (
    ConstructionError,
    DegenerateStratumError,
    InvalidInputError,
    ParameterDomainError,
    SelBoundsError,
    ZeroProbabilityError,
)
from .mstructure import MStructureSpec, sv_bound_parameters_m
from .sharpness import sharpness_grid, sv_bound_sharp

__all__ = ["build_server", "serve", "DEFAULT_MAX_BODY", "DEFAULT_GRID_CAP", "DEFAULT_SIM_CAP"]

DEFAULT_MAX_BODY = 50 * 1024 * 1024  # uploaded CSV cap
DEFAULT_GRID_CAP = 500               # per-axis grid cap
DEFAULT_SIM_CAP = 1_000_000          # rows per simulate request


def _optional_float(body: dict, key: str):
    value = body.get(key)
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{key} must be a number", field=key) from None


def _required_float(body: dict, key: str) -> float:
    value = _optional_float(body, key)
    if value is None:
        raise InvalidInputError(f"{key} is required", field=key)
    return value


def _estimand(body: dict) -> EstimandKind:
    code = body.get("estimand")
    if code is None:
        raise InvalidInputError("estimand is required", field="estimand")
    return EstimandKind.from_code(code)


def _observed_from_body(body: dict) -> ObservedSummary:
    return ObservedSummary(
        pY1_T1_S1=_required_float(body, "pY1_T1_S1"),
        pY1_T0_S1=_required_float(body, "pY1_T0_S1"),
        pT1_S1=_optional_float(body, "pT1_S1"),
        pS1=_optional_float(body, "pS1"),
    )


def _spec_from_body(body: dict) -> MStructureSpec:
    if body.get("zika"):
        return ds.zika_spec(selections=int(body.get("selections", 2)))
    model = body.get("model")
    if model is None:
        raise InvalidInputError("model is required (or set zika: true)", field="model")
    return MStructureSpec.from_dict(model)


class _Api:
    """Request handlers; every method takes a parsed JSON body."""

    def __init__(self, grid_cap: int, sim_cap: int):
        self.grid_cap = grid_cap
        self.sim_cap = sim_cap

    def sv_params(self, body: dict) -> dict:
        result = sv_bound_parameters_m(
            _spec_from_body(body),
            _estimand(body),
            _required_float(body, "pY1_T1_S1"),
            _required_float(body, "pY1_T0_S1"),
        )
        return result.to_dict()

    def sv_bound(self, body: dict) -> dict:
        estimand = _estimand(body)
        if estimand.is_subpopulation:
            params = SensitivityParamsSub(
                rr_uy_s1=_required_float(body, "rr_uy_s1"),
                rr_tu_s1=_required_float(body, "rr_tu_s1"),
            )
        else:
            params = SensitivityParamsTotal(
                rr_uy_t1=_required_float(body, "rr_uy_t1"),
                rr_uy_t0=_required_float(body, "rr_uy_t0"),
                rr_su_t1=_required_float(body, "rr_su_t1"),
                rr_su_t0=_required_float(body, "rr_su_t0"),
            )
        observed = None
        if body.get("pY1_T1_S1") is not None or body.get("pY1_T0_S1") is not None:
            observed = ObservedSummary(
                pY1_T1_S1=_required_float(body, "pY1_T1_S1"),
                pY1_T0_S1=_required_float(body, "pY1_T0_S1"),
            )
        return sv_bound(estimand, params, observed).to_dict()

    def af_bound(self, body: dict) -> dict:
        estimand = _estimand(body)
        if "summary" in body:
            return af_bound(estimand, _observed_from_body(body["summary"])).to_dict()
        outcome, treatment, selection = self._data_from_body(body)
        return ds.af_bound_from_data(estimand, outcome, treatment, selection).to_dict()

    def _data_from_body(self, body: dict):
        if "csv" in body:
            wanted = {
                "outcome": body.get("outcome_col", "mic_ceph"),
                "treatment": body.get("treatment_col", "zika"),
            }
            selection_col = body.get("selection_col")
            if selection_col is not None:
                wanted["selection"] = selection_col
            cols = ds.read_csv_columns_text(body["csv"], wanted, float_roles=("selection",))
            outcome = cols["outcome"]
            treatment = cols["treatment"]
            if selection_col is not None:
                selection = ds.selection_from_column(cols["selection"])
            else:
                selection = _required_float(body, "selection_prob")
        elif "data" in body:
            data = body["data"]
            outcome = data.get("outcome")
            treatment = data.get("treatment")
            if outcome is None or treatment is None:
                raise InvalidInputError("data needs outcome and treatment arrays", field="data")
            selection = data.get("selection")
            if selection is None:
                selection = _required_float(data, "selection_prob")
            if data.get("reverse_treatment") or body.get("reverse_treatment"):
                treatment = [1 - int(t) for t in treatment]
            return outcome, treatment, selection
        else:
            raise InvalidInputError(
                "af-bound needs one of: summary, data, csv", field="body"
            )
        if body.get("reverse_treatment"):
            treatment = 1 - treatment
        return outcome, treatment, selection

    def sharp(self, body: dict) -> dict:
        verdict = sv_bound_sharp(
            _required_float(body, "bf_u"),
            _required_float(body, "p0"),
            sv_bound=_optional_float(body, "sv"),
            af_bound=_optional_float(body, "af"),
            estimand=EstimandKind.from_code(body.get("estimand", "RR_sub")),
        )
        return verdict.to_dict()

    def sharpness_grid(self, body: dict) -> dict:
        uy = body.get("uy_axis")
        tu = body.get("tu_axis")
        if uy is None and "uy_min" in body:
            uy = np.linspace(
                _required_float(body, "uy_min"),
                _required_float(body, "uy_max"),
                int(body.get("uy_steps", 50)),
            ).tolist()
        if tu is None and "tu_min" in body:
            tu = np.linspace(
                _required_float(body, "tu_min"),
                _required_float(body, "tu_max"),
                int(body.get("tu_steps", 50)),
            ).tolist()
        if uy is None or tu is None:
            raise InvalidInputError(
                "provide uy_axis/tu_axis or uy_min/uy_max/uy_steps etc.", field="body"
            )
        if len(uy) > self.grid_cap or len(tu) > self.grid_cap:
            raise ParameterDomainError(
                f"grid axes are capped at {self.grid_cap} points per side", field="grid"
            )
        grid = sharpness_grid(uy, tu, _required_float(body, "p0"), _optional_float(body, "af"))
        return grid.to_dict()

    def simulate(self, body: dict) -> dict:
        n = int(body.get("n", 0))
        if n > self.sim_cap:
            raise ParameterDomainError(
                f"n is capped at {self.sim_cap} rows per request", field="n"
            )
        seed = int(body.get("seed", 0))
        data = ds.simulate(_spec_from_body(body), n, seed)
        return {
            "n": data.n,
            "seed": seed,
            "columns": {name: col.tolist() for name, col in data.columns.items()},
        }

    def summarize(self, body: dict) -> dict:
        if "csv" not in body:
            raise InvalidInputError("summarize needs csv text", field="csv")
        import os
        import tempfile

        # read_csv wants a path-like; keep the canonical parser in one place
        with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as fh:
            fh.write(body["csv"])
            path = fh.name
        try:
            data = ds.read_csv(path)
        finally:
            os.unlink(path)
        return ds.summarize(data, int(body.get("stage", len(data.selection_cols)))).to_dict()


def _error_payload(code: str, message: str, field=None) -> dict:
    return {"ok": False, "error": {"code": code, "message": message, "field": field}}


def _make_handler(api: _Api, static_dir, max_body: int):
    static_root = Path(static_dir).resolve() if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        server_version = "selbounds"
        protocol_version = "HTTP/1.1"

        routes = {
            "/api/sv-params": api.sv_params,
            "/api/sv-bound": api.sv_bound,
            "/api/af-bound": api.af_bound,
            "/api/sharp": api.sharp,
            "/api/sharpness-grid": api.sharpness_grid,
            "/api/simulate": api.simulate,
            "/api/summarize": api.summarize,
        }

        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _send_json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self._cors()
            self.end_headers()
            self.wfile.write(body)

        def _cors(self) -> None:
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")

        def do_OPTIONS(self):
            self.send_response(204)
            self._cors()
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            if self.path == "/api/health":
                self._send_json(200, {"ok": True, "result": {"status": "healthy"}})
                return
            if self.path.startswith("/api/"):
                self._send_json(404, _error_payload("not_found", f"unknown route {self.path}"))
                return
            self._serve_static()

        def _serve_static(self):
            if static_root is None:
                self._send_json(404, _error_payload("not_found", "no static assets configured"))
                return
            rel = posixpath.normpath(self.path.lstrip("/")) or "."
            if rel in (".", ""):
                rel = "index.html"
            target = (static_root / rel).resolve()
            if static_root not in target.parents and target != static_root:
                self._send_json(404, _error_payload("not_found", "path outside asset root"))
                return
            if target.is_dir():
                target = target / "index.html"
            if not target.is_file():
                self._send_json(404, _error_payload("not_found", f"no asset {self.path}"))
                return
            ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self._cors()
            self.end_headers()
            self.wfile.write(body)

        def do_POST(self):
            handler = self.routes.get(self.path)
            if handler is None:
                self._send_json(404, _error_payload("not_found", f"unknown route {self.path}"))
                return
            length = int(self.headers.get("Content-Length") or 0)
            if length > max_body:
                self._send_json(
                    413, _error_payload("too_large", f"request body exceeds {max_body} bytes")
                )
                return
            raw = self.rfile.read(length) if length else b""
            try:
                body = json.loads(raw.decode("utf-8")) if raw else {}
                if not isinstance(body, dict):
                    raise InvalidInputError("request body must be a JSON object")
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                self._send_json(400, _error_payload("bad_json", f"cannot parse body: {exc}"))
                return
            try:
                result = handler(body)
            except InvalidInputError as exc:
                self._send_json(
                    400, _error_payload("invalid_input", str(exc), getattr(exc, "field", None))
                )
            except ParameterDomainError as exc:
                self._send_json(
                    422, _error_payload("domain_error", str(exc), getattr(exc, "field", None))
                )
            except (DegenerateStratumError, ZeroProbabilityError, ConstructionError) as exc:
                self._send_json(422, _error_payload("computation_error", str(exc)))
            except SelBoundsError as exc:
                self._send_json(422, _error_payload("error", str(exc)))
            except Exception:
                # 500 must not leak internals
                self._send_json(500, _error_payload("internal_error", "internal server error"))
            else:
                self._send_json(200, {"ok": True, "result": result})

    return Handler


def build_server(
    port: int = 0,
    static_dir=None,
    max_body: int = DEFAULT_MAX_BODY,
    grid_cap: int = DEFAULT_GRID_CAP,
    sim_cap: int = DEFAULT_SIM_CAP,
) -> ThreadingHTTPServer:
    """Create (but do not start) the HTTP server; port 0 picks a free port."""
    api = _Api(grid_cap=grid_cap, sim_cap=sim_cap)
    handler = _make_handler(api, static_dir, max_body)
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(port: int = 8000, static_dir=None, **kwargs) -> None:
    """Run the service until interrupted."""
    server = build_server(port=port, static_dir=static_dir, **kwargs)
    host, actual_port = server.server_address[:2]
    # flush so callers watching a pipe see the address immediately
    print(f"selbounds service listening on http://{host}:{actual_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
