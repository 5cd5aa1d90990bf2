"""Command-line entry points: headless tracking, scoring, serving, fixtures.

stdout stays line-oriented and stable for golden testing; diagnostics go
to stderr. Exit codes for `track`: 0 success, 1 validation error,
2 pipeline failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import dataio, evalharness, reporting
from .domain import MonitoringRange, ORDER_CHRONOLOGICAL, ORDER_REVERSE, validate_pledge
from .errors import InputFileError, PledgewatchError, ValidationError
from .pipeline import PipelineOptions, execute_pipeline, write_run_artifacts
from .providers.config import MODE_FIXTURE, MODE_LIVE, load_settings, make_providers
from .providers.fixtures import completion_key


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Track political pledge fulfilment from web evidence."""


@main.command()
@click.option("--speaker", required=True, help="Who made the pledge.")
@click.option("--date", "pledge_date", required=True, help="Pledge date, YYYY-MM-DD.")
@click.option("--geo", default="UK", show_default=True, help="Geographic scope.")
@click.option("--claim", required=True, help="Pledge claim text.")
@click.option("--from", "range_start", required=True, help="Monitoring range start, YYYY-MM-DD.")
@click.option("--to", "range_end", required=True, help="Monitoring range end, YYYY-MM-DD.")
@click.option("--keep-all", is_flag=True, help="Review mode: keep filtered-out events with decisions.")
@click.option(
    "--order",
    type=click.Choice([ORDER_CHRONOLOGICAL, ORDER_REVERSE]),
    default=ORDER_REVERSE,
    show_default=True,
)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for ICL sampling.")
@click.option("--out", "out_dir", type=click.Path(), default="run_out", show_default=True)
@click.option(
    "--providers",
    "providers_mode",
    type=click.Choice([MODE_LIVE, MODE_FIXTURE]),
    default=None,
    help="Provider mode (defaults to config/env, then fixture).",
)
@click.option("--fixtures", "fixtures_dir", type=click.Path(exists=True), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
@click.option("--fig/--no-fig", default=True, show_default=True, help="Render a timeline figure.")
def track(
    speaker,
    pledge_date,
    geo,
    claim,
    range_start,
    range_end,
    keep_all,
    order,
    seed,
    out_dir,
    providers_mode,
    fixtures_dir,
    config_path,
    corpus_path,
    fig,
):
    """Run the full pipeline synchronously and write the timeline."""
    try:
        pledge = validate_pledge(speaker, pledge_date, geo, claim)
        try:
            from datetime import date as _date

            date_range = MonitoringRange(
                start=_date.fromisoformat(range_start), end=_date.fromisoformat(range_end)
            )
        except ValueError as exc:
            raise ValidationError("range", f"invalid date: {exc}") from exc
    except ValidationError as exc:
        _fail(str(exc), 1)

    try:
        settings = load_settings(
            config_path, mode=providers_mode, fixtures_dir=fixtures_dir, corpus_path=corpus_path
        )
        providers = make_providers(settings)
        corpus = []
        if settings.corpus_path:
            corpus, _ = dataio.load_annotated_corpus(settings.corpus_path)
        options = PipelineOptions(keep_all=keep_all, order=order, seed=seed)
        result = execute_pipeline(
            pledge,
            date_range,
            providers,
            options,
            corpus=corpus,
            on_stage=lambda stage: click.echo(f"stage: {stage}"),
        )
        paths = write_run_artifacts(result, out_dir)
        if fig:
            figure_path = Path(out_dir) / "timeline.png"
            reporting.render_timeline_figure(result.timeline, figure_path)
            paths["figure"] = str(figure_path)
    except (PledgewatchError, ValueError, OSError) as exc:
        _fail(f"pipeline failed: {exc}", 2)

    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"documents: {len(result.retrieval.documents)}")
    click.echo(f"candidates: {len(result.assembly.candidates)}")
    click.echo(f"unresolved: {len(result.assembly.unresolved)}")
    click.echo(f"timeline_events: {len(result.timeline.events)}")
    click.echo(f"timeline: {paths['timeline']}")


@main.group()
def score():
    """Score predictions, retrieval judgments, or corpus splits."""


def _write_report(out_dir, report_dict, table, render, fig):
    if not out_dir:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dataio.dump_json(report_dict, out / "report.json")
    (out / "report.txt").write_text(table + "\n", encoding="utf-8")
    if fig:
        render(out / "report.png")


@score.command()
@click.option("--predictions", "predictions_path", type=click.Path(exists=True), required=True)
@click.option("--gold", "gold_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--fig/--no-fig", default=True, show_default=True)
def filtering(predictions_path, gold_path, out_dir, fig):
    """Precision/recall/F1 of usefulness predictions against gold labels."""
    try:
        predictions = dataio.load_predictions(predictions_path)
        gold, gold_ids = dataio.load_annotated_corpus(gold_path)
        precision, recall, f1 = evalharness.filtering_metrics(predictions, gold, gold_ids)
    except (InputFileError, PledgewatchError) as exc:
        _fail(str(exc), 1)
    table = reporting.filtering_table(precision, recall, f1)
    click.echo(table)
    _write_report(
        out_dir,
        reporting.filtering_report_dict(precision, recall, f1),
        table,
        lambda path: reporting.render_filtering_figure(precision, recall, f1, path),
        fig,
    )


@score.command()
@click.option("--judgments", "judgments_path", type=click.Path(exists=True), required=True)
@click.option("--system", "systems", multiple=True, help="Systems to score (default: all present).")
@click.option("--skip-empty", is_flag=True, help="Skip requests where the system returned nothing.")
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--fig/--no-fig", default=True, show_default=True)
def retrieval(judgments_path, systems, skip_empty, out_dir, fig):
    """Pledge-level, URL-level, and novelty metrics from pooled judgments."""
    try:
        judgments = dataio.load_judgments_csv(judgments_path)
    except InputFileError as exc:
        _fail(str(exc), 1)
    names = list(systems) or sorted({j.system_name for j in judgments})
    reports = [
        evalharness.retrieval_metrics(judgments, name, skip_unreturned_requests=skip_empty)
        for name in names
    ]
    for report in reports:
        if report.warning:
            click.echo(f"warning: {report.warning}", err=True)
    table = reporting.retrieval_table(reports)
    click.echo(table)
    _write_report(
        out_dir,
        reporting.retrieval_report_dict(reports),
        table,
        lambda path: reporting.render_retrieval_figure(reports, path),
        fig,
    )


@score.command()
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--split-map", "split_map_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--fig/--no-fig", default=True, show_default=True)
def splits(corpus_path, split_map_path, out_dir, fig):
    """Per-split useful percentage and events per pledge."""
    try:
        corpus, ids = dataio.load_annotated_corpus(corpus_path)
        split_map = dataio.load_split_map(split_map_path)
        stats = evalharness.split_stats(corpus, split_map, ids)
    except (InputFileError, PledgewatchError) as exc:
        _fail(str(exc), 1)
    table = reporting.splits_table(stats)
    click.echo(table)
    _write_report(
        out_dir,
        reporting.splits_report_dict(stats),
        table,
        lambda path: reporting.render_splits_figure(stats, path),
        fig,
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-dir", type=click.Path(), default="pledgewatch_data", show_default=True)
@click.option(
    "--providers",
    "providers_mode",
    type=click.Choice([MODE_LIVE, MODE_FIXTURE]),
    default=None,
)
@click.option("--fixtures", "fixtures_dir", type=click.Path(exists=True), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
def serve(host, port, data_dir, providers_mode, fixtures_dir, config_path, corpus_path):
    """Start the HTTP API consumed by the web UI."""
    import uvicorn

    from .service import PledgeService, create_app

    settings = load_settings(
        config_path, mode=providers_mode, fixtures_dir=fixtures_dir, corpus_path=corpus_path
    )
    providers = make_providers(settings)
    service = PledgeService(
        data_dir=data_dir, providers=providers, corpus_path=settings.corpus_path or None
    )
    uvicorn.run(create_app(service), host=host, port=port)


@main.group()
def fixtures():
    """Inspect and maintain offline fixture worlds."""


@fixtures.command()
@click.argument("fixtures_dir", type=click.Path(exists=True, file_okay=False))
def check(fixtures_dir):
    """Validate a fixture directory: files parse, hit URLs have pages."""
    root = Path(fixtures_dir)
    problems = []
    worlds = {}
    for name in ("queries.json", "pages.json", "completions.json"):
        path = root / name
        if not path.exists():
            worlds[name] = {}
            click.echo(f"{name}: missing (treated as empty)")
            continue
        try:
            worlds[name] = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            problems.append(f"{name}: invalid JSON ({exc.msg} at line {exc.lineno})")
            worlds[name] = {}
    pages = worlds.get("pages.json", {})
    hit_urls = {
        hit["url"]
        for hits in worlds.get("queries.json", {}).values()
        for hit in hits
        if isinstance(hit, dict) and "url" in hit
    }
    unbacked = sorted(url for url in hit_urls if url not in pages)
    for url in unbacked:
        click.echo(f"note: hit URL has no page entry (will scrape-fail): {url}")
    click.echo(f"queries: {len(worlds.get('queries.json', {}))}")
    click.echo(f"pages: {len(pages)}")
    click.echo(f"completions: {len(worlds.get('completions.json', {}))}")
    if problems:
        for problem in problems:
            click.echo(f"error: {problem}", err=True)
        sys.exit(1)
    click.echo("fixture world ok")


@fixtures.command(name="hash")
@click.argument("prompt_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--system-instruction", default="", help="System instruction half of the key.")
def hash_prompt(prompt_file, system_instruction):
    """Print the completion key for a prompt file."""
    prompt = Path(prompt_file).read_text(encoding="utf-8")
    click.echo(completion_key(system_instruction, prompt))


if __name__ == "__main__":
    main()
