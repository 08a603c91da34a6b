"""Run configuration: a YAML file validated up front, with shipped defaults
matching the evaluation protocol of each problem. Secrets never live in the
file; the LLM API key is read from an environment variable named there."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import yaml

from .problems import PROBLEMS, get_problem
from .prompts import AugmentationMode
from .search import SearchLimits

TOOL_VERSION = "0.1.0"


class ConfigError(ValueError):
    """Rejected configuration; nothing has been written yet."""


@dataclass(frozen=True)
class LlmSettings:
    backend: str = "replay"  # replay | http
    endpoint: str = ""
    model: str = ""
    temperature: float = 1.0
    max_output_tokens: int = 4096
    api_key_env: str = "EVOASTAR_API_KEY"
    max_retries: int = 3
    fixture: str = ""


@dataclass(frozen=True)
class EvaluationSettings:
    backend: str = "inprocess"  # inprocess | worker
    worker_command: tuple[str, ...] = ()
    parallelism: int = 1


@dataclass(frozen=True)
class RunConfig:
    problem: str
    mode: AugmentationMode
    generations: int
    survivors: int
    repetitions: int
    parents: int
    init_calls: int
    rng_seed: int
    training_seeds: tuple[int, ...]
    limits: SearchLimits
    instance_params: dict
    llm: LlmSettings
    evaluation: EvaluationSettings
    output_dir: str
    plots: bool = True

    def digest(self) -> str:
        """Stable hash of the run's semantic parameters. Where artifacts are
        written (output_dir) and how reports render (plots) do not change
        run results, so they are excluded."""
        payload = asdict(self)
        payload["mode"] = self.mode.value
        payload.pop("output_dir", None)
        payload.pop("plots", None)
        canonical = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def build_config(data: dict, overrides: dict | None = None) -> RunConfig:
    """Validate a raw mapping (parsed YAML) into a RunConfig."""
    data = dict(data or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    problem = data.get("problem")
    _require(problem in PROBLEMS, f"problem must be one of {PROBLEMS}, got {problem!r}")
    spec = get_problem(problem)

    mode_raw = data.get("mode", "eoh")
    try:
        mode = AugmentationMode(mode_raw)
    except ValueError:
        raise ConfigError(
            f"mode must be one of {[m.value for m in AugmentationMode]}, got {mode_raw!r}"
        ) from None

    generations = int(data.get("generations", 20))
    survivors = int(data.get("survivors", 20))
    repetitions = int(data.get("repetitions", 20))
    parents = int(data.get("parents", 5))
    init_calls = int(data.get("init_calls", 2 * survivors))
    rng_seed = int(data.get("rng_seed", 0))
    _require(generations >= 0, "generations must be >= 0")
    _require(survivors >= 1, "survivors must be >= 1")
    _require(repetitions >= 1, "repetitions must be >= 1")
    _require(parents >= 1, "parents must be >= 1")
    _require(init_calls >= 1, "init_calls must be >= 1")

    training_seeds = tuple(int(s) for s in data.get("training_seeds", range(10)))
    _require(len(training_seeds) >= 1, "training_seeds must be non-empty")

    limits_raw = dict(data.get("limits") or {})
    default_limits = spec.default_limits
    try:
        limits = SearchLimits(
            timeout_seconds=float(limits_raw.get("timeout_seconds", default_limits.timeout_seconds)),
            max_evaluated_nodes=int(
                limits_raw.get("max_evaluated_nodes", default_limits.max_evaluated_nodes)
            ),
            max_moves_penalty=int(
                limits_raw.get("max_moves_penalty", default_limits.max_moves_penalty)
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid limits: {exc}") from exc

    instance_params = dict(spec.default_instance_params)
    instance_params.update(data.get("instance") or {})
    unknown = set(instance_params) - set(spec.default_instance_params)
    _require(not unknown, f"unknown instance parameters for {problem}: {sorted(unknown)}")

    llm_raw = dict(data.get("llm") or {})
    llm = LlmSettings(
        backend=str(llm_raw.get("backend", "replay")),
        endpoint=str(llm_raw.get("endpoint", "")),
        model=str(llm_raw.get("model", "")),
        temperature=float(llm_raw.get("temperature", 1.0)),
        max_output_tokens=int(llm_raw.get("max_output_tokens", 4096)),
        api_key_env=str(llm_raw.get("api_key_env", "EVOASTAR_API_KEY")),
        max_retries=int(llm_raw.get("max_retries", 3)),
        fixture=str(llm_raw.get("fixture", "")),
    )
    _require(llm.backend in ("replay", "http"), f"llm.backend must be replay or http, got {llm.backend!r}")
    if llm.backend == "http":
        _require(bool(llm.endpoint), "llm.endpoint is required for the http backend")
        _require(bool(llm.model), "llm.model is required for the http backend")

    eval_raw = dict(data.get("evaluation") or {})
    evaluation = EvaluationSettings(
        backend=str(eval_raw.get("backend", "inprocess")),
        worker_command=tuple(eval_raw.get("worker_command") or ()),
        parallelism=int(eval_raw.get("parallelism", 1)),
    )
    _require(
        evaluation.backend in ("inprocess", "worker"),
        f"evaluation.backend must be inprocess or worker, got {evaluation.backend!r}",
    )
    if evaluation.backend == "worker":
        _require(bool(evaluation.worker_command), "evaluation.worker_command is required for the worker backend")
    _require(evaluation.parallelism >= 1, "evaluation.parallelism must be >= 1")

    report_raw = dict(data.get("report") or {})
    output_dir = str(data.get("output_dir", "runs/run"))

    return RunConfig(
        problem=problem,
        mode=mode,
        generations=generations,
        survivors=survivors,
        repetitions=repetitions,
        parents=parents,
        init_calls=init_calls,
        rng_seed=rng_seed,
        training_seeds=training_seeds,
        limits=limits,
        instance_params=instance_params,
        llm=llm,
        evaluation=evaluation,
        output_dir=output_dir,
        plots=bool(report_raw.get("plots", True)),
    )


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return build_config(data, overrides)
