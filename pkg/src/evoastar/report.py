"""Run reports: best-fitness-per-generation series and per-mode token-usage
means, written as CSV files with matplotlib figures rendered alongside.
Everything is regenerated from the run directory's snapshots and log."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .llm import usage_report
from .prompts import AugmentationMode


class ReportError(RuntimeError):
    """Run directory has no usable artifacts."""


def best_fitness_series(run_dir: str | Path) -> list[tuple[int, float]]:
    snapshots = sorted(Path(run_dir).glob("snapshots/generation_*.json"))
    if not snapshots:
        raise ReportError(f"no snapshots under {run_dir}")
    series = []
    for path in snapshots:
        payload = json.loads(path.read_text(encoding="utf-8"))
        members = payload.get("members", [])
        best = min((m["fitness"] for m in members), default=float("inf"))
        series.append((int(payload["generation"]), best))
    series.sort()
    return series


def token_usage_rows(run_dir: str | Path) -> list[dict]:
    """Rows shaped like the usage summary table: one row per problem, one
    input/output column pair per augmentation mode."""
    report = usage_report(Path(run_dir) / "run_log.jsonl")
    problems = sorted({problem for problem, _ in report})
    rows = []
    for problem in problems:
        row: dict = {"problem": problem}
        for mode in AugmentationMode:
            stats = report.get((problem, mode.value))
            row[f"{mode.value}_input"] = round(stats["mean_input_tokens"], 1) if stats else ""
            row[f"{mode.value}_output"] = round(stats["mean_output_tokens"], 1) if stats else ""
        rows.append(row)
    return rows


def _write_series_csv(series: list[tuple[int, float]], path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["generation", "best_fitness"])
        for generation, best in series:
            writer.writerow([generation, best])


def _write_tokens_csv(rows: list[dict], path: Path) -> None:
    columns = ["problem"]
    for mode in AugmentationMode:
        columns += [f"{mode.value}_input", f"{mode.value}_output"]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def _plot_series(series: list[tuple[int, float]], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    generations = [g for g, _ in series]
    best = [b for _, b in series]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(generations, best, where="post", marker="o")
    ax.set_xlabel("generation")
    ax.set_ylabel("best fitness")
    ax.set_title("Best heuristic fitness per generation")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_tokens(rows: list[dict], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    modes = [m.value for m in AugmentationMode]
    width = 0.35
    for i, row in enumerate(rows):
        inputs = [row[f"{m}_input"] or 0 for m in modes]
        outputs = [row[f"{m}_output"] or 0 for m in modes]
        positions = [x + i * 0.1 for x in range(len(modes))]
        ax.bar([p - width / 2 for p in positions], inputs, width, label=f"{row['problem']} input")
        ax.bar([p + width / 2 for p in positions], outputs, width, label=f"{row['problem']} output")
    ax.set_xticks(range(len(modes)))
    ax.set_xticklabels(modes)
    ax.set_ylabel("mean tokens per prompt")
    ax.set_title("Token usage by augmentation mode")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _run_provenance(run_dir: Path) -> dict:
    snapshots = sorted(run_dir.glob("snapshots/generation_*.json"))
    if not snapshots:
        return {}
    payload = json.loads(snapshots[0].read_text(encoding="utf-8"))
    return {
        "config_digest": payload.get("config_digest"),
        "tool_version": payload.get("tool_version"),
    }


def write_report(run_dir: str | Path, out_dir: str | Path | None = None, plots: bool = True) -> list[Path]:
    """Emit the report files; returns the paths written."""
    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir / "report"
    out_dir.mkdir(parents=True, exist_ok=True)

    series = best_fitness_series(run_dir)
    rows = token_usage_rows(run_dir)

    written = []
    meta = out_dir / "report_meta.json"
    meta.write_text(json.dumps(_run_provenance(run_dir), indent=2) + "\n", encoding="utf-8")
    written.append(meta)
    series_csv = out_dir / "fitness_series.csv"
    _write_series_csv(series, series_csv)
    written.append(series_csv)

    tokens_csv = out_dir / "token_usage.csv"
    _write_tokens_csv(rows, tokens_csv)
    written.append(tokens_csv)

    if plots:
        series_png = out_dir / "fitness_over_generations.png"
        _plot_series(series, series_png)
        written.append(series_png)
        if rows:
            tokens_png = out_dir / "token_usage.png"
            _plot_tokens(rows, tokens_png)
            written.append(tokens_png)
    return written
