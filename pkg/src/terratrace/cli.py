"""Command-line interface: dataset build, polygon analysis, HTTP service,
and the synthetic fixture generator.

Exit codes: 0 success, 1 usage error (bad flags or unusable input files),
2 data error (bad dataset content).  Diagnostics go to stderr; data to stdout.
"""

from __future__ import annotations

import json
import sys
from datetime import date
from pathlib import Path

import click

from terratrace.analysis import AnalysisRequest, NoCellsInPolygon, run_analysis
from terratrace.classify import ClassifierConfigError, ClassifierParams
from terratrace.config import ServiceConfig
from terratrace.fires import FireCsvError, load_fires
from terratrace.fixtures import PROFILES, write_fixture_csv
from terratrace.geo import GeoError, default_regions
from terratrace.ingest import IngestError, filter_clouds, grid_assign, parse_observations
from terratrace.llm import LlmBackendError, make_backend
from terratrace.service import create_app, parse_polygon
from terratrace.store import DatasetManifest, Store, StoreError, build_store
from terratrace.geo import DEFAULT_EXTENT


class DataError(click.ClickException):
    """Input data is unusable (exit code 2)."""

    exit_code = 2


@click.group()
def cli():
    """Land-use analysis over a gridded NDVI time-series store."""


@cli.command("ingest")
@click.option("--obs", "obs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--extent", "extent_path", type=click.Path(exists=True, dir_okay=False),
              help="Manifest JSON whose region layout should be reused "
                   "(defaults to the built-in extent).")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--cloud-max", default=0.10, show_default=True,
              help="Maximum cloud mask ratio kept.")
@click.option("--force", is_flag=True, help="Overwrite an existing store.")
def ingest_cmd(obs_path, extent_path, out_dir, cloud_max, force):
    """Parse observations, filter clouds, compute NDVI, build the store."""
    if extent_path:
        try:
            manifest = DatasetManifest.load(Path(extent_path))
            regions, extent = manifest.regions, manifest.extent
        except (StoreError, ValueError, KeyError) as exc:
            raise click.UsageError(f"unusable extent manifest: {exc}")
    else:
        regions, extent = default_regions(), DEFAULT_EXTENT

    try:
        with open(obs_path, encoding="utf-8") as fh:
            parsed = parse_observations(fh)
    except IngestError as exc:
        raise DataError(str(exc))
    for err in parsed.errors:
        click.echo(f"row error at line {err.line}: {err.message}", err=True)

    kept = filter_clouds(parsed.observations, cloud_max)
    samples, stats = grid_assign(kept, regions)
    try:
        build_store(samples, out_dir, regions, extent, force=force)
    except StoreError as exc:
        raise DataError(str(exc))

    click.echo(json.dumps({
        "rows": parsed.rows,
        "parsed": len(parsed.observations),
        "cloud_filtered": len(parsed.observations) - len(kept),
        "out_of_extent": stats.out_of_extent,
        "undefined_ndvi": stats.undefined_ndvi,
    }))


def _load_polygon_file(path: str):
    try:
        obj = json.loads(Path(path).read_text())
        return parse_polygon(obj)
    except (OSError, ValueError) as exc:
        raise click.UsageError(f"unusable polygon file {path}: {exc}")


def _parse_cli_date(raw: str | None, name: str) -> date | None:
    if raw is None:
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise click.UsageError(f"invalid {name} date: {raw!r}")


def _load_fire_events(path: str | None):
    if not path:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            result = load_fires(fh)
    except (OSError, FireCsvError) as exc:
        raise DataError(f"unusable fire CSV {path}: {exc}")
    for err in result.errors:
        click.echo(f"fire row error at line {err.line}: {err.message}", err=True)
    return result.events


@cli.command("analyze")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--polygon", "polygon_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--from", "from_date", default=None)
@click.option("--to", "to_date", default=None)
@click.option("--degree", default=3, show_default=True)
@click.option("--llm", "llm_kind", type=click.Choice(["none", "mock", "remote"]),
              default="none", show_default=True)
@click.option("--params", "params_json", default=None,
              help="Classifier params overrides as JSON.")
@click.option("--fire-csv", "fire_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--fire-radius-km", default=50.0, show_default=True)
def analyze_cmd(store_dir, polygon_path, from_date, to_date, degree,
                llm_kind, params_json, fire_csv, fire_radius_km):
    """Print the analysis report for a polygon as JSON."""
    poly = _load_polygon_file(polygon_path)
    first = _parse_cli_date(from_date, "--from")
    last = _parse_cli_date(to_date, "--to")
    params = ClassifierParams()
    if params_json:
        try:
            params = ClassifierParams.from_dict(
                params.to_dict() | json.loads(params_json))
        except (ValueError, ClassifierConfigError, TypeError) as exc:
            raise click.UsageError(f"invalid --params: {exc}")

    try:
        store = Store.load(store_dir)
    except StoreError as exc:
        raise DataError(str(exc))

    backend = None
    if llm_kind != "none":
        try:
            backend = make_backend(llm_kind)
        except LlmBackendError as exc:
            raise click.UsageError(str(exc))

    try:
        request = AnalysisRequest(polygon=poly, date_range=(first, last),
                                  fit_degree=degree, params=params,
                                  include_llm=backend is not None)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        outcome = run_analysis(store, request, llm_backend=backend,
                               fire_events=_load_fire_events(fire_csv),
                               fire_radius_km=fire_radius_km)
    except NoCellsInPolygon as exc:
        raise DataError(str(exc))
    except GeoError as exc:
        raise click.UsageError(str(exc))
    click.echo(json.dumps(outcome.report))


@cli.command("serve")
@click.option("--store", "store_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=None, type=int)
@click.option("--llm", "llm_kind", type=click.Choice(["none", "mock", "remote"]), default=None)
@click.option("--params", "params_json", default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--fire-csv", "fire_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False),
              help="Serve built web-UI assets from this directory at /.")
def serve_cmd(store_dir, port, llm_kind, params_json, config_path, fire_csv, ui_dir):
    """Start the HTTP service (flags override the config file)."""
    import uvicorn

    config = ServiceConfig.load(config_path) if config_path else ServiceConfig()
    if store_dir:
        config.store_dir = store_dir
    if port is not None:
        config.port = port
    if llm_kind is not None:
        config.llm.kind = llm_kind
    if fire_csv:
        config.fire_csv = fire_csv
    if params_json:
        try:
            config.classifier_params = ClassifierParams.from_dict(
                config.classifier_params.to_dict() | json.loads(params_json))
        except (ValueError, ClassifierConfigError, TypeError) as exc:
            raise click.UsageError(f"invalid --params: {exc}")

    try:
        store = Store.load(config.store_dir)
    except StoreError as exc:
        raise DataError(str(exc))

    backend = None
    if config.llm.kind != "none":
        try:
            backend = make_backend(config.llm.kind,
                                   **({"endpoint": config.llm.endpoint,
                                       "model": config.llm.model}
                                      if config.llm.kind == "remote" else {}))
        except LlmBackendError as exc:
            raise click.UsageError(str(exc))

    app = create_app(store, llm_backend=backend,
                     params=config.classifier_params,
                     fire_events=_load_fire_events(config.fire_csv),
                     fire_radius_km=config.fire_radius_km,
                     static_dir=ui_dir)
    click.echo(f"serving store {config.store_dir} on port {config.port}", err=True)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="warning")


@cli.command("gen-fixture")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--cells", default=100, show_default=True)
@click.option("--days", default=270, show_default=True)
@click.option("--profile", type=click.Choice(list(PROFILES)), default="annual",
              show_default=True)
@click.option("--seed", default=42, show_default=True)
def gen_fixture_cmd(out_path, cells, days, profile, seed):
    """Write a reproducible synthetic observation CSV."""
    if cells <= 0 or days <= 0:
        raise click.UsageError("--cells and --days must be positive")
    rows = write_fixture_csv(out_path, profile, cells, days, seed)
    click.echo(f"wrote {rows} observations to {out_path}", err=True)


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.exceptions.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
