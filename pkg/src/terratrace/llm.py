"""LLM-assisted narrative analysis: curve image rendering, payload assembly,
and pluggable backends.

The mock backend is fully deterministic and never touches the network, so
test suites and offline deployments get stable output.  The remote backend
speaks a chat-completions style HTTP API; credentials come from the
environment (``TERRATRACE_LLM_KEY`` / ``TERRATRACE_LLM_URL``), never from
config files.
"""

from __future__ import annotations

import base64
import io
import json
import os
import threading
from dataclasses import dataclass

import httpx
from PIL import Image, ImageDraw

from terratrace.classify import CurveFeatures, LandUseClass, VegetationPresence
from terratrace.curves import SignatureCurve
from terratrace.geo import GeoPolygon

DEFAULT_MODEL = "gpt-4-turbo-2024-04-09"
DEFAULT_TIMEOUT_S = 30.0
DEFAULT_MAX_TOKENS = 1024
DEFAULT_CONCURRENCY = 4

IMAGE_SIZE = (320, 200)
IMAGE_MARGIN = 10

ENV_KEY = "TERRATRACE_LLM_KEY"
ENV_URL = "TERRATRACE_LLM_URL"

PROMPT_TEMPLATE = ("The area of interest is defined by the [{coordinates}]. "
                   "Please analyze the land cover type at this location.")


class LlmBackendError(RuntimeError):
    """Remote call failed (timeout, HTTP error); carries a retry hint."""

    def __init__(self, message: str, retryable: bool = True):
        hint = "retry may succeed" if retryable else "retry will not help"
        super().__init__(f"{message} ({hint})")
        self.retryable = retryable


class UnparseableResponseError(LlmBackendError):
    """Remote response did not match the expected wire shape."""

    def __init__(self, raw: str):
        super().__init__("unparseable response", retryable=False)
        self.raw = raw


def render_curve_image(curve: SignatureCurve) -> bytes:
    """Deterministic grayscale PNG of the curve: 320x200, white background,
    black polyline of the display-normalized values, 10 px margins."""
    if len(curve) == 0:
        raise ValueError("cannot render an empty curve")
    width, height = IMAGE_SIZE
    m = IMAGE_MARGIN
    days = curve.days.astype(float)
    values = curve.values.astype(float)
    vmin, vmax = values.min(), values.max()
    if vmax > vmin:
        norm = (values - vmin) / (vmax - vmin)
    else:
        norm = [0.5] * len(values)  # flat curve sits at mid-height
    d0, d1 = days[0], days[-1]
    span = (d1 - d0) or 1.0
    xy = []
    for day, v in zip(days, norm):
        x = m + (day - d0) / span * (width - 1 - 2 * m)
        y = (height - 1 - m) - v * (height - 1 - 2 * m)
        xy.append((int(round(x)), int(round(y))))
    image = Image.new("L", IMAGE_SIZE, 255)
    draw = ImageDraw.Draw(image)
    if len(xy) == 1:
        draw.point(xy[0], fill=0)
    else:
        draw.line(xy, fill=0, width=1)
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


def build_prompt(poly: GeoPolygon) -> str:
    """Query prompt with the polygon rendered as (lat,lon) pairs at six
    decimal places."""
    coords = ", ".join(f"({v.lat:.6f},{v.lon:.6f})" for v in poly.vertices)
    return PROMPT_TEMPLATE.format(coordinates=coords)


@dataclass(frozen=True)
class LlmPayload:
    coordinates: list[list[float]]
    stats: dict[str, float]
    vegetation: str
    image_b64: str
    prompt: str

    def to_json(self) -> str:
        return json.dumps({
            "coordinates": self.coordinates,
            "stats": self.stats,
            "vegetation": self.vegetation,
            "image_b64": self.image_b64,
            "prompt": self.prompt,
        })

    @classmethod
    def from_json(cls, raw: str) -> "LlmPayload":
        d = json.loads(raw)
        return cls(d["coordinates"], d["stats"], d["vegetation"],
                   d["image_b64"], d["prompt"])


def build_payload(features: CurveFeatures, presence: VegetationPresence,
                  image: bytes, poly: GeoPolygon,
                  mean_ndvi: float) -> LlmPayload:
    """Assemble the JSON payload: stats snapshot (median plus an explicit
    arithmetic mean), presence label, base64 PNG, and the prompt."""
    stats = {
        "max": features.max,
        "min": features.min,
        "median": features.median,
        "mean": mean_ndvi,
        "range": features.range,
        "growth_rate": features.growth_rate,
        "decline_rate": features.decline_rate,
    }
    return LlmPayload(
        coordinates=[[v.lat, v.lon] for v in poly.vertices],
        stats=stats,
        vegetation=presence.value,
        image_b64=base64.b64encode(image).decode("ascii"),
        prompt=build_prompt(poly),
    )


_LAND_COVER_TEXT = {
    LandUseClass.ANNUAL_CROP: "annual crop (rule-based)",
    LandUseClass.PERENNIAL_VEGETATION: "perennial vegetation (rule-based)",
    LandUseClass.SPARSE_VEGETATION: "sparse vegetation (rule-based)",
    LandUseClass.NON_VEGETATIVE: "non-vegetative (rule-based)",
    LandUseClass.INSUFFICIENT_DATA: "undetermined (insufficient data)",
}

_PRESENCE_TEXT = {
    VegetationPresence.NON_VEGETATIVE.value: "no significant vegetation signal",
    VegetationPresence.SOME_VEGETATION.value: "some vegetation present",
    VegetationPresence.HEALTHY_VEGETATION.value: "healthy vegetation",
}


class MockBackend:
    """Deterministic analysis table interpolated from the payload stats;
    its land-cover row always equals the rule-based classification."""

    kind = "mock"

    def analyze(self, payload: LlmPayload,
                rule_class: LandUseClass | None = None) -> dict[str, str]:
        stats = payload.stats
        if rule_class is not None:
            land_cover = _LAND_COVER_TEXT[rule_class]
        elif stats["median"] < 0.1:
            land_cover = _LAND_COVER_TEXT[LandUseClass.NON_VEGETATIVE]
        else:
            land_cover = _PRESENCE_TEXT[payload.vegetation]
        seasonal = (stats["growth_rate"] > 0.005 and stats["decline_rate"] < -0.005)
        return {
            "land_cover": land_cover,
            "vegetation_health": (f"{_PRESENCE_TEXT[payload.vegetation]} "
                                  f"(median NDVI {stats['median']:.4f})"),
            "seasonality": ("distinct growth and decline phases "
                            f"(max rise {stats['growth_rate']:.4f}, "
                            f"max drop {stats['decline_rate']:.4f})"
                            if seasonal else
                            "low seasonal variation"),
            "confidence_note": ("derived from rule-based statistics without a "
                                "model call; values are exact curve features"),
        }

    def chat(self, context: dict, message: str) -> str:
        analysis = context.get("llm_analysis") or {}
        land_cover = analysis.get("land_cover") or context.get("class", "unknown")
        median = (context.get("features") or {}).get("median")
        median_text = f"{median:.4f}" if isinstance(median, (int, float)) else "n/a"
        return (f"[mock] Land cover: {land_cover}. Median NDVI {median_text}. "
                f"You asked: {message}")


class RemoteBackend:
    """Chat-completions style HTTP backend with a bounded concurrency slot
    pool and per-request deadline."""

    kind = "remote"

    def __init__(self, endpoint: str | None = None, model: str = DEFAULT_MODEL,
                 api_key: str | None = None, timeout_s: float = DEFAULT_TIMEOUT_S,
                 max_concurrency: int = DEFAULT_CONCURRENCY):
        self.endpoint = endpoint or os.environ.get(ENV_URL)
        self.api_key = api_key or os.environ.get(ENV_KEY)
        if not self.endpoint:
            raise LlmBackendError(
                f"remote backend needs an endpoint ({ENV_URL})", retryable=False)
        if not self.api_key:
            raise LlmBackendError(
                f"remote backend needs a credential ({ENV_KEY})", retryable=False)
        self.model = model
        self.timeout_s = timeout_s
        self._slots = threading.Semaphore(max_concurrency)

    def _post(self, messages: list[dict], max_tokens: int = DEFAULT_MAX_TOKENS) -> str:
        body = {"model": self.model, "messages": messages, "max_tokens": max_tokens}
        headers = {"Authorization": f"Bearer {self.api_key}"}
        with self._slots:
            try:
                response = httpx.post(self.endpoint, json=body, headers=headers,
                                      timeout=self.timeout_s)
            except httpx.TimeoutException as exc:
                raise LlmBackendError(f"backend timeout after {self.timeout_s}s: {exc}") from exc
            except httpx.HTTPError as exc:
                raise LlmBackendError(f"backend request failed: {exc}") from exc
        if response.status_code >= 400:
            raise LlmBackendError(
                f"backend HTTP {response.status_code}: {response.text[:200]}",
                retryable=response.status_code >= 500)
        try:
            data = response.json()
            content = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            raise UnparseableResponseError(response.text)
        if not isinstance(content, str):
            raise UnparseableResponseError(response.text)
        return content

    @staticmethod
    def _content_to_table(content: str) -> dict[str, str]:
        text = content.strip()
        if text.startswith("```"):
            text = text.strip("`")
            if text.startswith("json"):
                text = text[4:]
        try:
            parsed = json.loads(text)
            if isinstance(parsed, dict):
                return {str(k): str(v) for k, v in parsed.items()}
        except ValueError:
            pass
        return {"analysis": content}

    def analyze(self, payload: LlmPayload,
                rule_class: LandUseClass | None = None) -> dict[str, str]:
        content = self._post([{"role": "user", "content": payload.to_json()}])
        return self._content_to_table(content)

    def chat(self, context: dict, message: str) -> str:
        return self._post([
            {"role": "system", "content": json.dumps(context)},
            {"role": "user", "content": message},
        ])


def make_backend(kind: str, **kwargs):
    if kind == "mock":
        return MockBackend()
    if kind == "remote":
        return RemoteBackend(**kwargs)
    raise ValueError(f"unknown LLM backend kind: {kind}")


def analyze(payload: LlmPayload, backend,
            rule_class: LandUseClass | None = None) -> dict[str, str]:
    """Obtain the analysis table for a payload from the given backend."""
    return backend.analyze(payload, rule_class=rule_class)
