"""Command-line client for the catch-up service.

Every subcommand builds a request, sends it to the service (in-process by
default, or a remote instance via ``--server``), and renders the response as
a report. Reports start with a run manifest; two runs with the same manifest
(timestamp aside) produce byte-identical output. All randomness flows from
the ``--seed`` flag.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import sys
from datetime import datetime, timezone
from typing import Callable, Iterable, Optional

import click
import httpx

from . import __version__
from .errors import CatchupError, DataFormatError

TEXT = "text"
MACHINE = "machine"


def _post(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server.rstrip("/"), timeout=None) as client:
            return client.post(path, json=payload)

    from .service import app  # deferred: keeps --help fast

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://catchup.internal", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _call(server: Optional[str], path: str, payload: dict) -> dict:
    try:
        resp = _post(server, path, payload)
    except httpx.HTTPError as exc:
        raise CatchupError(f"request to {path} failed: {exc}") from exc
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail")
        except Exception:
            detail = resp.text
        raise CatchupError(f"{path}: {detail}")
    return resp.json()


def _read_input(path: str) -> tuple[str, str]:
    """(file text, sha256 hex digest); unreadable files are data errors."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    return raw.decode("utf-8"), hashlib.sha256(raw).hexdigest()


def _manifest(command: str, args: dict, seed: Optional[int], digest: str) -> dict:
    return {
        "command": command,
        "args": {k: ("-" if v is None else str(v)) for k, v in args.items()},
        "seed": "-" if seed is None else seed,
        "input_sha256": digest,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _emit(fmt: str, manifest: dict, results, text_lines: Callable[[], Iterable[str]]) -> None:
    if fmt == MACHINE:
        click.echo(json.dumps({"manifest": manifest, "results": results}, sort_keys=True, indent=2))
        return
    click.echo(f"# catchup {manifest['version']}")
    click.echo(f"# command: {manifest['command']}")
    args = " ".join(f"{k}={v}" for k, v in sorted(manifest["args"].items()))
    click.echo(f"# args: {args}")
    click.echo(f"# seed: {manifest['seed']}")
    click.echo(f"# input-sha256: {manifest['input_sha256']}")
    click.echo(f"# timestamp: {manifest['timestamp']}")
    for line in text_lines():
        click.echo(line)


def _pct(v: Optional[float]) -> str:
    return "undefined" if v is None else f"{100 * v:.4f}%"


def _report_line(rep: dict) -> str:
    parts = [
        f"model={rep['model']}",
        f"mpf={_pct(rep['mpf'])}",
        f"mfp={_pct(rep['mfp'])}",
        f"n_pass={rep['n_pass']}",
        f"n_fail={rep['n_fail']}",
        f"reps={rep['reps']}",
        f"excluded=mpf:{rep['exclusions']['mpf']},mfp:{rep['exclusions']['mfp']}",
    ]
    if rep.get("mean_adjusted_r2") is not None:
        parts.append(f"mean_adj_r2={rep['mean_adjusted_r2']:.6f}")
    if rep.get("degenerate_reps"):
        parts.append(f"degenerate_reps={rep['degenerate_reps']}")
    if rep.get("group_relative_mpf") is not None:
        parts.append(f"group_mpf={_pct(rep['group_relative_mpf'])}")
    if rep.get("group_relative_mfp") is not None:
        parts.append(f"group_mfp={_pct(rep['group_relative_mfp'])}")
    if rep.get("empty_classes"):
        parts.append(f"empty_classes={rep['empty_classes']}")
    return " ".join(parts)


def _decision_line(d: dict) -> str:
    parts = [
        f"case={d['case_id']}",
        f"year={d['year']}",
        f"region={d['region']}",
        f"engine={d['engine']}",
        f"verdict={d['verdict']}",
    ]
    if d["verdict"] == "Undecidable":
        parts.append(f"reason={d['reason']}")
        return " ".join(parts)
    parts.append(f"grade4P={_pct(d['grade4p'])}")
    parts.append(f"votes={d['pass_votes']}/{d['reps']}")
    if d.get("mean_estimate") is not None:
        parts.append(f"mean_grade={d['mean_estimate']:.4f}")
    if d.get("modal_estimate") is not None:
        parts.append(f"modal_grade={d['modal_estimate']}")
    return " ".join(parts)


def server_option(f):
    return click.option("--server", default=None, help="Remote service URL (default: in-process).")(f)


def format_option(f):
    return click.option(
        "--format", "fmt", type=click.Choice([TEXT, MACHINE]), default=TEXT, help="Report format."
    )(f)


def split_options(f):
    f = click.option("--train-frac", type=click.FloatRange(0, 1, min_open=True, max_open=True),
                     default=0.75, show_default=True, help="Target train fraction.")(f)
    f = click.option("--paper-split", is_flag=True,
                     help="Legacy fixed-draw-count split instead of the exact fraction.")(f)
    return f


@click.group()
@click.version_option(version=__version__, prog_name="catchup")
def cli() -> None:
    """Decide pass/fail for students who missed one of the four core exams."""


@cli.command()
@click.option("--n", "n_records", type=click.IntRange(min=1), required=True, help="Population size.")
@click.option("--missing-rate", type=click.FloatRange(0, 1, max_open=True), default=0.0, show_default=True)
@click.option("--noise", type=click.FloatRange(min=0), default=0.75, show_default=True,
              help="Per-subject noise spread.")
@click.option("--ability-center", type=float, default=5.0, show_default=True)
@click.option("--ability-spread", type=click.FloatRange(min=0), default=2.0, show_default=True)
@click.option("--gender-split", type=click.FloatRange(0, 1), default=0.5, show_default=True)
@click.option("--years", type=int, multiple=True, default=(2015, 2017), show_default=True)
@click.option("--regions", type=click.IntRange(1, 6), multiple=True, default=(1, 2, 3), show_default=True)
@click.option("--target", type=click.IntRange(1, 4), default=4, show_default=True,
              help="Grade position that goes missing.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output record file.")
@server_option
@format_option
def gen(n_records, missing_rate, noise, ability_center, ability_spread, gender_split,
        years, regions, target, seed, out, server, fmt) -> None:
    """Generate a synthetic exam population."""
    payload = {
        "n_records": n_records,
        "years": list(years),
        "regions": list(regions),
        "gender_split": gender_split,
        "ability_center": ability_center,
        "ability_spread": ability_spread,
        "noise_spread": noise,
        "missing_rate": missing_rate,
        "target_index_for_missing": target,
        "seed": seed,
    }
    results = _call(server, "/v1/generate", payload)
    try:
        with open(out, "w") as fh:
            fh.write(results["records_csv"])
    except OSError as exc:
        raise DataFormatError(f"cannot write {out}: {exc}") from exc
    manifest = _manifest(
        "gen",
        dict(n=n_records, missing_rate=missing_rate, noise=noise, ability_center=ability_center,
             ability_spread=ability_spread, gender_split=gender_split,
             years=",".join(map(str, years)), regions=",".join(map(str, regions)),
             target=target, out=out, format=fmt),
        seed,
        "-",
    )
    _emit(fmt, manifest, {"n_records": results["n_records"], "out": out},
          lambda: [f"wrote {results['n_records']} records to {out}"])


@cli.command()
@click.option("--input", "input_path", required=True, help="Record file.")
@click.option("--target", type=click.IntRange(1, 4), default=4, show_default=True)
@click.option("--year", type=int, default=None)
@click.option("--region", type=click.IntRange(1, 6), default=None)
@server_option
@format_option
def scan(input_path, target, year, region, server, fmt) -> None:
    """List rescuable cases (exactly one missing grade, at the target position)."""
    text, digest = _read_input(input_path)
    payload = {"records_csv": text, "target_index": target, "year": year, "region": region}
    results = _call(server, "/v1/scan", payload)
    manifest = _manifest(
        "scan", dict(input=input_path, target=target, year=year, region=region, format=fmt),
        None, digest,
    )

    def lines():
        cases = results["cases"]
        yield f"records={results['n_records']} rescuable={len(cases)} valid={sum(c['valid'] for c in cases)}"
        for c in cases:
            obs = ",".join(str(g) for g in c["observed"])
            yield (f"case={c['case_id']} year={c['year']} region={c['region']} "
                   f"observed={obs} missing_index={c['missing_index']} "
                   f"valid={'yes' if c['valid'] else 'no'}")

    _emit(fmt, manifest, results, lines)


@cli.command("eval-regression")
@click.option("--input", "input_path", required=True)
@click.option("--target", type=click.IntRange(1, 4), default=4, show_default=True)
@click.option("--year", type=int, default=None)
@click.option("--region", type=click.IntRange(1, 6), default=None)
@click.option("--gender", type=click.IntRange(1, 2), default=None)
@click.option("--reps", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@split_options
@server_option
@format_option
def eval_regression(input_path, target, year, region, gender, reps, seed,
                    train_frac, paper_split, server, fmt) -> None:
    """Monte Carlo misclassification rates of the regression imputer."""
    text, digest = _read_input(input_path)
    payload = {
        "records_csv": text, "target_index": target, "year": year, "region": region,
        "gender": gender, "reps": reps, "seed": seed,
        "split": {"paper_mode": paper_split, "train_fraction": train_frac},
    }
    results = _call(server, "/v1/eval/regression", payload)
    manifest = _manifest(
        "eval-regression",
        dict(input=input_path, target=target, year=year, region=region, gender=gender,
             reps=reps, train_frac=train_frac, paper_split=paper_split, format=fmt),
        seed, digest,
    )
    _emit(fmt, manifest, results, lambda: [_report_line(results["report"])])


@cli.command("eval-hybrid")
@click.option("--input", "input_path", required=True)
@click.option("--target", type=click.IntRange(1, 4), default=4, show_default=True)
@click.option("--year", type=int, default=None)
@click.option("--region", type=click.IntRange(1, 6), default=None)
@click.option("--gender", type=click.IntRange(1, 2), default=None)
@click.option("--k", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--rule", type=click.Choice(["avg", "mode"]), default=None,
              help="Report only one decision rule (default: both).")
@click.option("--distance", type=click.Choice(["euclid2", "chebyshev"]), default="euclid2",
              show_default=True)
@click.option("--epsilon", type=click.FloatRange(min=0), default=None,
              help="Fixed-radius neighborhoods instead of the similar/completed branching.")
@click.option("--bands", is_flag=True, help="Encode predictor grades as credit/pass/fail bands.")
@click.option("--paper-normalization", is_flag=True,
              help="Also report rates normalized by group size.")
@click.option("--reps", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@split_options
@server_option
@format_option
def eval_hybrid(input_path, target, year, region, gender, k, rule, distance, epsilon, bands,
                paper_normalization, reps, seed, train_frac, paper_split, server, fmt) -> None:
    """Monte Carlo misclassification rates of the similar-case/NN imputer."""
    text, digest = _read_input(input_path)
    payload = {
        "records_csv": text, "target_index": target, "year": year, "region": region,
        "gender": gender, "reps": reps, "seed": seed, "k": k, "rule": rule,
        "distance": distance, "epsilon": epsilon, "band_features": bands,
        "paper_normalization": paper_normalization,
        "split": {"paper_mode": paper_split, "train_fraction": train_frac},
    }
    results = _call(server, "/v1/eval/hybrid", payload)
    manifest = _manifest(
        "eval-hybrid",
        dict(input=input_path, target=target, year=year, region=region, gender=gender,
             k=k, rule=rule, distance=distance, epsilon=epsilon, bands=bands,
             paper_normalization=paper_normalization, reps=reps,
             train_frac=train_frac, paper_split=paper_split, format=fmt),
        seed, digest,
    )
    _emit(fmt, manifest, results, lambda: [_report_line(r) for r in results["reports"]])


@cli.command()
@click.option("--input", "input_path", required=True)
@click.option("--case", "case_id", type=int, required=True, help="Case id to decide.")
@click.option("--engine", type=click.Choice(["reg", "hybrid", "hybrid-avg", "hybrid-mode"]),
              default="reg", show_default=True)
@click.option("--target", type=click.IntRange(1, 4), default=4, show_default=True)
@click.option("--k", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--restrict-gender", is_flag=True, help="Cohort restricted to the case's gender.")
@click.option("--reps", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@split_options
@server_option
@format_option
def predict(input_path, case_id, engine, target, k, restrict_gender, reps, seed,
            train_frac, paper_split, server, fmt) -> None:
    """Majority-vote pass/fail decision for one rescuable case."""
    text, digest = _read_input(input_path)
    payload = {
        "records_csv": text, "case_id": case_id, "target_index": target, "engine": engine,
        "reps": reps, "seed": seed, "k": k, "restrict_gender": restrict_gender,
        "split": {"paper_mode": paper_split, "train_fraction": train_frac},
    }
    results = _call(server, "/v1/predict", payload)
    manifest = _manifest(
        "predict",
        dict(input=input_path, case=case_id, engine=engine, target=target, k=k,
             restrict_gender=restrict_gender, reps=reps, train_frac=train_frac,
             paper_split=paper_split, format=fmt),
        seed, digest,
    )

    def lines():
        yield _decision_line(results["decision"])
        ests = results["per_rep_estimates"]
        yield (f"estimates: n={len(ests)} min={min(ests):.4f} "
               f"max={max(ests):.4f} mean={sum(ests) / len(ests):.4f}")

    _emit(fmt, manifest, results, lines)


@cli.command("rescue-all")
@click.option("--input", "input_path", required=True)
@click.option("--target", type=click.IntRange(1, 4), default=4, show_default=True)
@click.option("--engine", type=click.Choice(["reg", "hybrid", "hybrid-avg", "hybrid-mode"]),
              default="reg", show_default=True)
@click.option("--k", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--restrict-gender", is_flag=True)
@click.option("--reps", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@split_options
@server_option
@format_option
def rescue_all_cmd(input_path, target, engine, k, restrict_gender, reps, seed,
                   train_frac, paper_split, server, fmt) -> None:
    """Decide every valid rescuable case against its own (year, region) cohort."""
    text, digest = _read_input(input_path)
    payload = {
        "records_csv": text, "target_index": target, "engine": engine,
        "reps": reps, "seed": seed, "k": k, "restrict_gender": restrict_gender,
        "split": {"paper_mode": paper_split, "train_fraction": train_frac},
    }
    results = _call(server, "/v1/rescue-all", payload)
    manifest = _manifest(
        "rescue-all",
        dict(input=input_path, target=target, engine=engine, k=k,
             restrict_gender=restrict_gender, reps=reps, train_frac=train_frac,
             paper_split=paper_split, format=fmt),
        seed, digest,
    )

    def lines():
        outcomes = results["outcomes"]
        yield f"decisions={len(outcomes)}"
        for d in outcomes:
            yield _decision_line(d)

    _emit(fmt, manifest, results, lines)


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point with explicit exit codes (0 ok, 1 usage, 2 data)."""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        cli.main(args=args, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.exceptions.NoArgsIsHelpError as exc:
        click.echo(exc.format_message(), err=True)
        return 1
    except click.UsageError as exc:
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except CatchupError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


def run() -> None:
    sys.exit(main())
