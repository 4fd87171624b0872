"""Command-line entry point: index, match, eval, serve, demo.

Exit codes: 0 success, 1 input/IO error, 2 backend error, 64 usage error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from ecolink import demo as demo_mod
from ecolink import evaluation, pipeline
from ecolink.embedding import (
    DEFAULT_LOCAL_DIM,
    DEFAULT_REMOTE_MODEL,
    EmbeddingBackendDescriptor,
    create_embedding_backend,
)
from ecolink.errors import BackendError, EcolinkError, IngestError
from ecolink.index import build_index, load_index, save_index
from ecolink.ingest import load_bom, load_datasheets, load_gold_labels, load_lca_db
from ecolink.llm import DEFAULT_CHAT_MODEL, CannedChatBackend, RemoteChatBackend
from ecolink.model import Mode, PipelineConfig, validate_activities, validate_bom

USAGE_EXIT = 64


def _embedding_backend(kind: str, dim: int, url: str | None, model: str):
    descriptor = EmbeddingBackendDescriptor(
        kind=kind,
        endpoint=url,
        model=model,
        dim=dim,
    )
    return create_embedding_backend(descriptor)


def _chat_backend(kind: str, fixtures: str | None, url: str | None, model: str):
    if kind == "canned":
        if not fixtures:
            raise click.UsageError("--llm canned requires --llm-fixtures")
        return CannedChatBackend(fixtures)
    if not url:
        raise click.UsageError("--llm remote requires --llm-url")
    return RemoteChatBackend(endpoint=url, model=model)


@click.group()
def cli() -> None:
    """Map BOM components to LCA activities and aggregate footprints."""


@cli.command("index")
@click.option("--db", "db_path", required=True, help="LCA database (JSON records, one per line)")
@click.option("--out", "out_path", required=True, help="Where to write the index file")
@click.option(
    "--backend",
    type=click.Choice(["local-hash", "remote"]),
    default="local-hash",
    show_default=True,
)
@click.option("--dim", default=DEFAULT_LOCAL_DIM, show_default=True, help="local-hash dimension")
@click.option("--embed-url", default=None, help="remote embedding endpoint")
@click.option("--embed-model", default=DEFAULT_REMOTE_MODEL, show_default=True)
def cmd_index(db_path: str, out_path: str, backend: str, dim: int, embed_url: str | None, embed_model: str) -> None:
    """Embed every database activity and save the search index."""
    activities = load_lca_db(db_path)
    issues = validate_activities(activities)
    if issues:
        raise IngestError("invalid LCA database: " + "; ".join(str(i) for i in issues))
    embedder = _embedding_backend(backend, dim, embed_url, embed_model)
    index = build_index(activities, embedder)
    save_index(index, out_path)
    click.echo(f"indexed {len(index)} activities (fingerprint {index.fingerprint})")


@cli.command("match")
@click.option("--bom", "bom_path", required=True)
@click.option("--index", "index_path", required=True)
@click.option("--datasheets", "datasheets_dir", default=None)
@click.option(
    "--mode",
    type=click.Choice([m.value for m in Mode]),
    required=True,
)
@click.option("--report", "report_path", required=True)
@click.option(
    "--backend",
    type=click.Choice(["local-hash", "remote"]),
    default="local-hash",
    show_default=True,
)
@click.option("--dim", default=DEFAULT_LOCAL_DIM, show_default=True)
@click.option("--embed-url", default=None)
@click.option("--embed-model", default=DEFAULT_REMOTE_MODEL, show_default=True)
@click.option("--llm", type=click.Choice(["canned", "remote"]), default="canned", show_default=True)
@click.option("--llm-fixtures", default=None, help="canned responses file")
@click.option("--llm-url", default=None, help="remote chat endpoint")
@click.option("--llm-model", default=DEFAULT_CHAT_MODEL, show_default=True)
@click.option("--threshold", default=0.5, show_default=True, help="datasheet match threshold")
@click.option("--top-k", default=5, show_default=True)
@click.option("--timings", is_flag=True, help="record per-stage milliseconds in the report")
def cmd_match(
    bom_path: str,
    index_path: str,
    datasheets_dir: str | None,
    mode: str,
    report_path: str,
    backend: str,
    dim: int,
    embed_url: str | None,
    embed_model: str,
    llm: str,
    llm_fixtures: str | None,
    llm_url: str | None,
    llm_model: str,
    threshold: float,
    top_k: int,
    timings: bool,
) -> None:
    """Run the pipeline over a BOM and write the run report."""
    entries = load_bom(bom_path)
    issues = validate_bom(entries)
    if issues:
        raise IngestError("invalid BOM: " + "; ".join(str(i) for i in issues))
    index = load_index(index_path)
    embedder = _embedding_backend(backend, dim, embed_url, embed_model)
    if not index.matches_backend(embedder):
        click.echo(
            f"warning: index fingerprint {index.fingerprint} does not match "
            f"live backend {embedder.fingerprint}",
            err=True,
        )
    run_mode = Mode(mode)
    pool = load_datasheets(datasheets_dir) if datasheets_dir else []
    chat = None
    if run_mode is not Mode.SEMANTIC_ONLY:
        chat = _chat_backend(llm, llm_fixtures, llm_url, llm_model)
    config = PipelineConfig(datasheet_threshold=threshold, top_k=top_k, timings=timings)
    result = pipeline.run_bom(
        entries, run_mode, index, pool, config, pipeline.Backends(embedder=embedder, chat=chat)
    )
    pipeline.save_report(result, report_path)
    for report in result.reports:
        if report.error is not None:
            click.echo(f"{report.component_id}\tFAILED\t{report.error}")
        elif report.candidates:
            top_id, top_score = report.candidates[0]
            click.echo(f"{report.component_id}\t{top_id}\t{top_score:.6f}")
        else:
            click.echo(f"{report.component_id}\t-\t-")
    failed = len(result.failures)
    if failed:
        click.echo(f"warning: {failed} component(s) failed; see report", err=True)


@cli.command("eval")
@click.option("--report", "report_path", required=True)
@click.option("--gold", "gold_path", required=True)
@click.option("--n", "ns_text", default="1,5", show_default=True, help="comma-separated cutoffs")
@click.option("--out", "out_path", default=None, help="machine-readable records file")
@click.option("--db", "db_path", default=None, help="validate gold labels against this database")
def cmd_eval(report_path: str, gold_path: str, ns_text: str, out_path: str | None, db_path: str | None) -> None:
    """Score a run report against gold labels with Hits@n."""
    try:
        ns = [int(part) for part in ns_text.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"--n expects comma-separated integers, got {ns_text!r}")
    if not ns:
        raise click.UsageError("--n needs at least one cutoff")
    run = pipeline.load_report(report_path)
    gold = load_gold_labels(gold_path)
    known = None
    if db_path:
        known = {act.id for act in load_lca_db(db_path)}
    result = evaluation.hits_at(run.rankings, gold, ns, known_activity_ids=known)
    if result.missing:
        click.echo(
            "warning: no ranking for component(s) "
            + ", ".join(result.missing)
            + "; counted as misses",
            err=True,
        )
    click.echo(evaluation.format_eval_table([result], ns), nl=False)
    if out_path:
        evaluation.save_eval_records([result], ns, out_path)


@cli.command("serve")
@click.option("--report", "report_path", required=True)
@click.option("--bom", "bom_path", required=True)
@click.option("--db", "db_path", required=True)
@click.option("--listen", default="127.0.0.1:8799", show_default=True)
@click.option("--data", "data_dir", required=True, help="directory for the decisions log")
@click.option("--static", "static_dir", default=None, help="serve a UI bundle from this directory")
def cmd_serve(report_path: str, bom_path: str, db_path: str, listen: str, data_dir: str, static_dir: str | None) -> None:
    """Serve the expert review API over a completed run."""
    import uvicorn

    from ecolink.service import create_app, session_from_files

    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.UsageError(f"--listen expects HOST:PORT, got {listen!r}")
    entries = load_bom(bom_path)
    db = load_lca_db(db_path)
    run = pipeline.load_report(report_path)
    session = session_from_files(entries, db, run, data_dir)
    app = create_app(session, static_dir=static_dir)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")


@cli.command("demo")
@click.option("--out", "out_dir", required=True)
@click.option("--seed", default=demo_mod.DEMO_SEED, show_default=True)
def cmd_demo(out_dir: str, seed: int) -> None:
    """Write the bundled synthetic demo corpus."""
    corpus = demo_mod.generate_demo_corpus(seed)
    paths = demo_mod.write_demo_corpus(corpus, out_dir)
    click.echo(
        f"wrote demo corpus to {paths.root}: {len(corpus.bom)} components, "
        f"{len(corpus.activities)} activities, {len(corpus.datasheets)} datasheets, "
        f"{len(corpus.gold)} gold labels, {len(corpus.chat_fixtures)} chat fixtures"
    )


def main(argv: list[str] | None = None) -> int:
    """Run the CLI with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return USAGE_EXIT
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except BackendError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (EcolinkError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
