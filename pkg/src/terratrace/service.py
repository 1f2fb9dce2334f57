"""HTTP service exposing the analysis pipeline.

Endpoints: POST /api/analyze, GET /api/curve, GET /api/manifest,
GET /api/nearest, POST /api/chat.  The store is loaded once and read-only;
handlers are stateless apart from a bounded report cache that lets the chat
endpoint reference recent analyses by id.

Status codes: 400 invalid polygon/range/body, 404 no cells in polygon or
unknown cell, 422 insufficient data (partial report in the body), 502 LLM
backend failure (report still returned, llm_analysis absent).
"""

from __future__ import annotations

import json
import threading
from collections import OrderedDict
from datetime import date

from fastapi import Body, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from terratrace.analysis import AnalysisRequest, NoCellsInPolygon, run_analysis
from terratrace.classify import ClassifierConfigError, ClassifierParams
from terratrace.curves import eval_poly, polyfit
from terratrace.curves import CurveError, SignatureCurve
from terratrace.fires import FireEvent
from terratrace.geo import CellId, GeoError, GeoPoint, GeoPolygon
from terratrace.llm import LlmBackendError
from terratrace.store import Store

REPORT_CACHE_SIZE = 128
DEFAULT_NEAREST_MAX_M = 5000.0


class BadRequest(ValueError):
    pass


def parse_polygon(obj) -> GeoPolygon:
    """Accept ``{"vertices": [[lat, lon], ...]}`` or a geo-interchange style
    polygon (``coordinates`` outer ring in lon/lat order, closing vertex
    repeated)."""
    if not isinstance(obj, dict):
        raise BadRequest("polygon must be an object")
    try:
        if "vertices" in obj:
            return GeoPolygon.from_latlon(obj["vertices"])
        if obj.get("type") == "Polygon" and "coordinates" in obj:
            ring = obj["coordinates"][0]
            if len(ring) > 1 and ring[0] == ring[-1]:
                ring = ring[:-1]
            return GeoPolygon.from_latlon([(lat, lon) for lon, lat in ring])
    except (GeoError, TypeError, ValueError, IndexError) as exc:
        raise BadRequest(f"invalid polygon: {exc}")
    raise BadRequest("polygon must carry 'vertices' or Polygon 'coordinates'")


def _parse_date(raw, name: str) -> date | None:
    if raw is None:
        return None
    try:
        return date.fromisoformat(str(raw))
    except ValueError:
        raise BadRequest(f"invalid {name} date: {raw!r}")


def _json(payload, status_code: int = 200) -> Response:
    return Response(content=json.dumps(payload), status_code=status_code,
                    media_type="application/json")


def create_app(store: Store, llm_backend=None,
               params: ClassifierParams | None = None,
               fire_events: list[FireEvent] | None = None,
               fire_radius_km: float = 50.0,
               nearest_max_m: float = DEFAULT_NEAREST_MAX_M,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="terratrace", docs_url=None, redoc_url=None)
    base_params = params or ClassifierParams()
    reports: OrderedDict[str, dict] = OrderedDict()
    reports_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _bad_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def _cache(report: dict) -> None:
        with reports_lock:
            reports[report["report_id"]] = report
            while len(reports) > REPORT_CACHE_SIZE:
                reports.popitem(last=False)

    @app.post("/api/analyze")
    def analyze(body: dict = Body(...)):
        try:
            poly = parse_polygon(body.get("polygon"))
            first = _parse_date(body.get("from"), "from")
            last = _parse_date(body.get("to"), "to")
            degree = int(body.get("fit_degree", 3))
            req_params = base_params
            if body.get("params"):
                try:
                    req_params = ClassifierParams.from_dict(
                        base_params.to_dict() | dict(body["params"]))
                except (ClassifierConfigError, TypeError) as exc:
                    raise BadRequest(f"invalid params: {exc}")
            request = AnalysisRequest(
                polygon=poly,
                date_range=(first, last),
                fit_degree=degree,
                params=req_params,
                include_llm=bool(body.get("include_llm", False)),
                features_from=str(body.get("features_from", "raw")),
            )
        except BadRequest as exc:
            return _json({"detail": str(exc)}, 400)
        except (ValueError, GeoError) as exc:
            return _json({"detail": str(exc)}, 400)

        try:
            outcome = run_analysis(store, request, llm_backend=llm_backend,
                                   fire_events=fire_events,
                                   fire_radius_km=fire_radius_km)
        except NoCellsInPolygon as exc:
            return _json({"detail": str(exc)}, 404)
        except GeoError as exc:
            return _json({"detail": str(exc)}, 400)

        _cache(outcome.report)
        status = 200
        if outcome.insufficient:
            status = 422
        elif outcome.llm_failed:
            status = 502
        return _json(outcome.report, status)

    @app.get("/api/curve")
    def curve(cell: str, request: Request):
        try:
            region_id, row, col = (int(part) for part in cell.split(","))
            cell_id = CellId(region_id, row, col)
        except (ValueError, GeoError):
            return _json({"detail": f"invalid cell {cell!r}"}, 400)
        if not store.has_cell(cell_id):
            return _json({"detail": f"unknown cell {cell}"}, 404)
        try:
            first = _parse_date(request.query_params.get("from"), "from")
            last = _parse_date(request.query_params.get("to"), "to")
            degree = request.query_params.get("degree")
            degree = int(degree) if degree is not None else None
        except (BadRequest, ValueError) as exc:
            return _json({"detail": str(exc)}, 400)

        series = store.load_series(cell_id, (first, last))
        curve = SignatureCurve(series.days.astype(int), series.values.astype(float), 1)
        payload = curve.to_dict()
        if degree is not None:
            try:
                fit = polyfit(curve, degree)
                payload["fit"] = fit.to_dict()
                payload["fit_points"] = [[int(d), eval_poly(fit, int(d))]
                                         for d in curve.days]
            except CurveError as exc:
                payload["fit"] = None
                payload["warnings"] = [f"fit skipped: {exc}"]
        payload["cell"] = [region_id, row, col]
        return _json(payload)

    @app.get("/api/manifest")
    def manifest():
        return _json(store.manifest.to_dict())

    @app.get("/api/nearest")
    def nearest(lat: float, lon: float):
        try:
            point = GeoPoint(lat, lon)
        except GeoError as exc:
            return _json({"detail": str(exc)}, 400)
        if store.is_empty:
            return _json({"detail": "store is empty"}, 404)
        cell_id, dist = store.nearest_cell(point)
        if dist > nearest_max_m:
            return _json({"detail": "no data near point",
                          "distance_m": dist}, 404)
        return _json({"cell": [cell_id.region_id, cell_id.row, cell_id.col],
                      "distance_m": dist})

    @app.post("/api/chat")
    def chat(body: dict = Body(...)):
        message = body.get("message")
        if not message or not isinstance(message, str):
            return _json({"detail": "message is required"}, 400)
        report = body.get("report")
        if report is None and body.get("report_id"):
            with reports_lock:
                report = reports.get(str(body["report_id"]))
        if not isinstance(report, dict):
            return _json({"detail": "chat needs report context "
                                    "(inline report or known report_id)"}, 400)
        if llm_backend is None:
            return _json({"detail": "no LLM backend configured"}, 502)
        context = {
            "class": report.get("class"),
            "presence": report.get("presence"),
            "features": report.get("features"),
            "llm_analysis": report.get("llm_analysis"),
            "warnings": report.get("warnings", []),
        }
        try:
            reply = llm_backend.chat(context, message)
        except LlmBackendError as exc:
            return _json({"detail": str(exc)}, 502)
        return _json({"reply": reply})

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
