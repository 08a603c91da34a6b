"""Operator entry point: run evolution experiments, benchmark heuristics,
evaluate stored programs, generate instances, and emit reports.

Exit codes: 0 success, 2 configuration problem, 3 replay fixture problem,
4 LLM endpoint problem, 5 runtime failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import instances as instances_mod
from .config import TOOL_VERSION, ConfigError, RunConfig, load_config
from .evolution import (
    EvolutionEngine,
    InProcessEvaluator,
    InvalidHeuristic,
    RunAborted,
    SnapshotError,
    run_instances,
)
from .fitness import fitness as fitness_eq
from .fitness import solved_only_fitness
from .llm import AuthError, HttpChatClient, MissingFixtureError, ReplayClient, TransportError
from .problems import PROBLEMS, get_problem
from .search import DuplicatePolicy, SearchLimits

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FIXTURE = 3
EXIT_ENDPOINT = 4
EXIT_RUNTIME = 5


def parse_seeds(text: str) -> list[int]:
    """'0-9', '0,3,7' or any comma mix of values and inclusive ranges."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:  # allow negative single values
            lo, hi = part.split("-", 1) if not part.startswith("-") else (part, "")
            if hi == "":
                seeds.append(int(lo))
            else:
                seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise click.BadParameter(f"no seeds in {text!r}")
    return seeds


def parse_params(pairs: tuple[str, ...]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.BadParameter(f"--param expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                params[key] = value
    return params


def _limits_for(problem: str, timeout: float | None, max_nodes: int | None, penalty: int | None) -> SearchLimits:
    defaults = get_problem(problem).default_limits
    return SearchLimits(
        timeout_seconds=timeout if timeout is not None else defaults.timeout_seconds,
        max_evaluated_nodes=max_nodes if max_nodes is not None else defaults.max_evaluated_nodes,
        max_moves_penalty=penalty if penalty is not None else defaults.max_moves_penalty,
    )


def _resolve_instances(problem: str, seeds: list[int] | None, instances_dir: str | None, params: dict):
    """(seed, state, lower_bound) triples from generator seeds or a directory
    of instance files."""
    spec = get_problem(problem)
    triples = []
    if instances_dir:
        paths = sorted(Path(instances_dir).glob("*.json"))
        if not paths:
            raise click.ClickException(f"no instance files under {instances_dir}")
        for path in paths:
            inst = instances_mod.load_instance(path)
            if inst.problem != problem:
                raise click.ClickException(f"{path} holds a {inst.problem} instance, expected {problem}")
            triples.append((inst.seed, inst.state, spec.lower_bound(inst.state)))
    else:
        merged = dict(spec.default_instance_params)
        merged.update(params)
        for seed in seeds or []:
            state = spec.generate(seed, **merged)
            triples.append((seed, state, spec.lower_bound(state)))
    if not triples:
        raise click.ClickException("no instances: pass --seeds or --instances-dir")
    return triples


def _score_fn_for(problem: str, heuristic: str, stored: str | None):
    """Resolve a heuristic name or stored program to (label, score_fn)."""
    spec = get_problem(problem)
    if heuristic != "stored":
        try:
            native = spec.builtin_heuristics[heuristic]
        except KeyError:
            raise click.ClickException(
                f"unknown heuristic {heuristic!r} for {problem}; "
                f"built-ins: {sorted(spec.builtin_heuristics)} or 'stored'"
            )
        return heuristic, native
    if not stored:
        raise click.ClickException("--stored FILE is required with --heuristic stored")
    path = Path(stored)
    if not path.exists():
        raise click.ClickException(f"stored heuristic file not found: {path}")
    if path.suffix == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        code = payload["code"] if isinstance(payload, dict) else str(payload)
    else:
        code = path.read_text(encoding="utf-8")
    from .codeexec import CodeRejected, load_score_fn

    try:
        fn = load_score_fn(code)
    except CodeRejected as exc:
        raise click.ClickException(f"stored heuristic rejected: {exc}")
    to_payload = spec.to_payload
    return path.name, lambda state: fn(to_payload(state))


@click.group()
@click.version_option(version=TOOL_VERSION, prog_name="evoastar")
def main() -> None:
    """Evolve, benchmark and inspect tree-search guiding heuristics."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--resume", is_flag=True, help="Continue from the latest snapshot in the output dir.")
@click.option("--dry-run", is_flag=True, help="Build and count every prompt without calling the LLM.")
@click.option("--mode", type=str, default=None, help="Override the augmentation mode.")
@click.option("--problem", type=click.Choice(PROBLEMS), default=None, help="Override the problem.")
@click.option("--seed", type=int, default=None, help="Override the run RNG seed.")
def evolve(config_path: str, resume: bool, dry_run: bool, mode: str | None, problem: str | None, seed: int | None) -> None:
    """Run the full evolutionary loop described by a config file."""
    try:
        config = load_config(
            config_path, overrides={"mode": mode, "problem": problem, "rng_seed": seed}
        )
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    run_dir = Path(config.output_dir)

    if dry_run:
        engine = EvolutionEngine(config, client=None, evaluator=None, run_dir=run_dir)
        counts = engine.dry_run()
        click.echo(
            f"dry run: {counts['init_prompts']} initialization prompts + "
            f"{counts['evolution_prompts']} evolution prompts = "
            f"{counts['total_prompts']} total"
        )
        return

    try:
        client = _make_client(config)
        evaluator = _make_evaluator(config)
    except MissingFixtureError as exc:
        click.echo(f"fixture error: {exc}", err=True)
        sys.exit(EXIT_FIXTURE)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    resume_from = None
    if resume:
        snapshots = sorted(run_dir.glob("snapshots/generation_*.json"))
        if not snapshots:
            click.echo(f"nothing to resume: no snapshots under {run_dir}", err=True)
            sys.exit(EXIT_RUNTIME)
        resume_from = snapshots[-1]

    engine = EvolutionEngine(config, client=client, evaluator=evaluator, run_dir=run_dir)
    try:
        population = engine.run(resume_from=resume_from)
    except MissingFixtureError as exc:
        click.echo(f"fixture error: {exc}", err=True)
        sys.exit(EXIT_FIXTURE)
    except (AuthError, TransportError) as exc:
        click.echo(f"endpoint error: {exc}", err=True)
        sys.exit(EXIT_ENDPOINT)
    except (RunAborted, SnapshotError) as exc:
        click.echo(f"run failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)

    from .report import write_report

    written = write_report(run_dir, plots=config.plots)
    click.echo(
        f"run complete: generation {population.generation}, "
        f"best fitness {population.best_fitness:.6f}, "
        f"{engine.prompt_index} prompts issued"
    )
    for path in written:
        click.echo(f"  wrote {path}")


def _make_client(config: RunConfig):
    if config.llm.backend == "replay":
        if not config.llm.fixture:
            raise ConfigError("llm.fixture is required for the replay backend")
        return ReplayClient(config.llm.fixture)
    return HttpChatClient(
        endpoint=config.llm.endpoint,
        api_key_env=config.llm.api_key_env,
        max_retries=config.llm.max_retries,
    )


def _make_evaluator(config: RunConfig):
    if config.evaluation.backend == "worker":
        from .sandbox import WorkerEvaluator

        return WorkerEvaluator(config)
    return InProcessEvaluator(config)


@main.command()
@click.option("--problem", type=click.Choice(PROBLEMS), required=True)
@click.option("--heuristic", required=True, help="Built-in name, or 'stored' with --stored FILE.")
@click.option("--stored", type=click.Path(), default=None, help="Stored heuristic (.py or .json).")
@click.option("--seeds", default=None, help="Generator seeds, e.g. 0-9.")
@click.option("--instances-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--param", "params", multiple=True, help="Instance parameter override key=value.")
@click.option("--policy", type=click.Choice(["paper", "strict"]), default="paper")
@click.option("--timeout", type=float, default=None, help="Search timeout seconds.")
@click.option("--max-nodes", type=int, default=None, help="Evaluated-node limit.")
@click.option("--penalty", type=int, default=None, help="Objective charged when unsolved.")
@click.option("--out", type=click.Path(), default=None, help="Also write the table as CSV.")
def bench(problem, heuristic, stored, seeds, instances_dir, params, policy, timeout, max_nodes, penalty, out):
    """Benchmark a heuristic: solved count, mean fitness and mean time over
    the solved instances (penalized fitness reported alongside)."""
    limits = _limits_for(problem, timeout, max_nodes, penalty)
    triples = _resolve_instances(
        problem, parse_seeds(seeds) if seeds else None, instances_dir, parse_params(params)
    )
    label, score_fn = _score_fn_for(problem, heuristic, stored)
    spec = get_problem(problem)
    results = run_instances(spec, score_fn, triples, limits, DuplicatePolicy(policy))

    solved = [r for r in results if r.solved]
    mean_fit = solved_only_fitness(results)
    mean_time = sum(r.elapsed_seconds for r in solved) / len(solved) if solved else None
    penalized = fitness_eq(results)

    header = ["heuristic", "instances", "solved", "fitness_solved_only", "mean_time_solved", "fitness_penalized"]
    row = [
        label,
        str(len(results)),
        f"{len(solved)}/{len(results)}",
        f"{mean_fit:.6f}" if mean_fit is not None else "n/a",
        f"{mean_time:.4f}" if mean_time is not None else "n/a",
        f"{penalized:.6f}",
    ]
    widths = [max(len(h), len(v)) for h, v in zip(header, row)]
    click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    click.echo("  ".join(v.ljust(w) for v, w in zip(row, widths)))

    if out:
        import csv as csv_mod

        with open(out, "w", newline="", encoding="utf-8") as handle:
            writer = csv_mod.writer(handle)
            writer.writerow(header)
            writer.writerow(row)
        click.echo(f"wrote {out}")


@main.command("eval")
@click.option("--problem", type=click.Choice(PROBLEMS), required=True)
@click.option("--heuristic", required=True)
@click.option("--stored", type=click.Path(), default=None)
@click.option("--seeds", default=None)
@click.option("--instances-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--param", "params", multiple=True)
@click.option("--policy", type=click.Choice(["paper", "strict"]), default="paper")
@click.option("--timeout", type=float, default=None)
@click.option("--max-nodes", type=int, default=None)
@click.option("--penalty", type=int, default=None)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable per-instance output.")
def eval_cmd(problem, heuristic, stored, seeds, instances_dir, params, policy, timeout, max_nodes, penalty, as_json):
    """Evaluate a heuristic and print one row per instance."""
    limits = _limits_for(problem, timeout, max_nodes, penalty)
    triples = _resolve_instances(
        problem, parse_seeds(seeds) if seeds else None, instances_dir, parse_params(params)
    )
    label, score_fn = _score_fn_for(problem, heuristic, stored)
    spec = get_problem(problem)
    results = run_instances(spec, score_fn, triples, limits, DuplicatePolicy(policy))
    if as_json:
        payload = [
            {
                "seed": r.instance_seed,
                "solved": r.solved,
                "moves": r.moves,
                "lower_bound": r.lower_bound,
                "evaluated_nodes": r.evaluated_nodes,
                "elapsed_seconds": r.elapsed_seconds,
            }
            for r in results
        ]
        click.echo(json.dumps({"heuristic": label, "policy": policy, "results": payload}, indent=2))
        return
    click.echo(f"heuristic: {label}  policy: {policy}")
    for r in results:
        status = "solved" if r.solved else "unsolved"
        click.echo(
            f"  seed {r.instance_seed:>4}  {status:>8}  moves {r.moves:>4}  "
            f"lb {r.lower_bound:>4}  nodes {r.evaluated_nodes:>8}  {r.elapsed_seconds:.4f}s"
        )


@main.command("gen-instances")
@click.option("--problem", type=click.Choice(PROBLEMS), required=True)
@click.option("--seeds", required=True, help="Generator seeds, e.g. 0-9.")
@click.option("--param", "params", multiple=True, help="Instance parameter override key=value.")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
def gen_instances(problem, seeds, params, out_dir):
    """Write one instance file per seed; reruns are byte-identical."""
    spec = get_problem(problem)
    merged = dict(spec.default_instance_params)
    merged.update(parse_params(params))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for seed in parse_seeds(seeds):
        state = spec.generate(seed, **merged)
        record = spec.make_record(state, seed, **merged)
        path = out / f"{problem}_{seed:04d}.json"
        instances_mod.write_instance(path, record)
        click.echo(f"wrote {path}")


@main.command()
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--plots/--no-plots", default=True)
def report(run_dir, out_dir, plots):
    """Regenerate the fitness series and token usage report for a run."""
    from .report import ReportError, write_report

    try:
        written = write_report(run_dir, out_dir, plots=plots)
    except ReportError as exc:
        click.echo(f"report error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    for path in written:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
