"""The evolutionary loop: seeded initialization, per-generation strategy
scheduling, evaluation with penalties, elitist survivor selection, snapshot
persistence and resumption.

Determinism contract: with a replay LLM client and a fixed rng_seed, entire
runs are byte-identical. Everything that feeds a snapshot is derived from
the prompt index (record ids, parent sampling) or from deterministic
evaluation (move counts, node counts); wall-clock timings live only in the
run log.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Protocol

from .config import TOOL_VERSION, RunConfig
from .fitness import InstanceResult, fitness
from .llm import (
    AuthError,
    CompletionRequest,
    LlmError,
    MissingFixtureError,
    prompt_sha256,
)
from .problems import ProblemSpec, get_problem
from .prompts import (
    EVOLUTION_STRATEGIES,
    STRATEGY_ARITY,
    ParseError,
    StrategyKind,
    build_prompt,
    normalized_code_hash,
    parse_response,
    validate_code,
)
from .search import DuplicatePolicy, HeuristicError, SearchLimits, astar

SNAPSHOT_SCHEMA = "evoastar-population"
SNAPSHOT_SCHEMA_VERSION = 1


@dataclass
class HeuristicRecord:
    id: str
    thought: str
    code: str
    fitness: float
    per_instance: list[InstanceResult]
    parent_ids: list[str]
    strategy: str
    generation: int
    created_with_mode: str


@dataclass
class Population:
    generation: int
    members: list[HeuristicRecord]  # ascending fitness

    @property
    def best_fitness(self) -> float:
        return self.members[0].fitness if self.members else float("inf")


class InvalidHeuristic(Exception):
    """Code was rejected or crashed during evaluation; the record is
    discarded rather than penalized."""


class RunAborted(Exception):
    """The run cannot continue (for example, no valid heuristic at all
    after initialization)."""


class SnapshotError(Exception):
    """Snapshot missing, corrupted, or from a different configuration."""


class Evaluator(Protocol):
    def evaluate(self, code: str) -> list[InstanceResult]: ...


def run_instances(
    spec: ProblemSpec,
    score_fn: Callable[[Any], float],
    training: list[tuple[int, Any, int]],
    limits: SearchLimits,
    policy: DuplicatePolicy = DuplicatePolicy.PAPER,
) -> list[InstanceResult]:
    """Run one scorer over (seed, state, lower_bound) triples; unsolved
    instances are charged the penalty move count."""
    results = []
    for seed, state, lower_bound in training:
        outcome = astar(spec.domain, score_fn, state, limits, policy)
        moves = outcome.objective_value if outcome.solved else limits.max_moves_penalty
        results.append(
            InstanceResult(
                instance_seed=seed,
                moves=moves,
                lower_bound=lower_bound,
                solved=outcome.solved,
                evaluated_nodes=outcome.evaluated_nodes,
                elapsed_seconds=outcome.elapsed_seconds,
            )
        )
    return results


def make_training_instances(config: RunConfig) -> list[tuple[int, Any, int]]:
    spec = get_problem(config.problem)
    training = []
    for seed in config.training_seeds:
        state = spec.generate(seed, **config.instance_params)
        training.append((seed, state, spec.lower_bound(state)))
    return training


class InProcessEvaluator:
    """Runs generated code through the native engine after authoritative
    structural screening, inside a restricted namespace."""

    def __init__(self, config: RunConfig) -> None:
        self.spec = get_problem(config.problem)
        self.limits = config.limits
        self.training = make_training_instances(config)

    def evaluate(self, code: str) -> list[InstanceResult]:
        from .codeexec import CodeRejected, load_score_fn

        try:
            fn = load_score_fn(code)
        except CodeRejected as exc:
            raise InvalidHeuristic(f"code rejected: {exc}") from exc
        to_payload = self.spec.to_payload

        def scorer(state: Any) -> float:
            return fn(to_payload(state))

        try:
            return run_instances(self.spec, scorer, self.training, self.limits)
        except HeuristicError as exc:
            raise InvalidHeuristic(f"evaluation failed: {exc}") from exc


class RunLog:
    """Append-only JSONL event stream."""

    def __init__(self, path: Path) -> None:
        self.path = path
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def event(self, event: str, **fields: Any) -> None:
        record = {"event": event, **fields}
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")


def sample_parents(
    members: list[HeuristicRecord], count: int, rng: random.Random
) -> list[HeuristicRecord]:
    """Uniform sample without replacement; asking for more than the pool
    holds returns the whole pool."""
    if count >= len(members):
        return list(members)
    return rng.sample(members, count)


def _parent_rng(rng_seed: int, prompt_index: int) -> random.Random:
    digest = hashlib.sha256(f"{rng_seed}:parents:{prompt_index}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _record_payload(record: HeuristicRecord) -> dict:
    return {
        "id": record.id,
        "thought": record.thought,
        "code": record.code,
        "fitness": record.fitness,
        "parent_ids": list(record.parent_ids),
        "strategy": record.strategy,
        "generation": record.generation,
        "created_with_mode": record.created_with_mode,
        "per_instance": [
            {
                "instance_seed": r.instance_seed,
                "moves": r.moves,
                "lower_bound": r.lower_bound,
                "solved": r.solved,
                "evaluated_nodes": r.evaluated_nodes,
                # timings are not reproducible across runs; they live in the
                # run log so snapshots stay byte-identical
                "elapsed_seconds": 0.0,
            }
            for r in record.per_instance
        ],
    }


def _record_from_payload(payload: dict) -> HeuristicRecord:
    return HeuristicRecord(
        id=payload["id"],
        thought=payload["thought"],
        code=payload["code"],
        fitness=float(payload["fitness"]),
        per_instance=[
            InstanceResult(
                instance_seed=int(r["instance_seed"]),
                moves=int(r["moves"]),
                lower_bound=int(r["lower_bound"]),
                solved=bool(r["solved"]),
                evaluated_nodes=int(r["evaluated_nodes"]),
                elapsed_seconds=float(r["elapsed_seconds"]),
            )
            for r in payload["per_instance"]
        ],
        parent_ids=list(payload["parent_ids"]),
        strategy=payload["strategy"],
        generation=int(payload["generation"]),
        created_with_mode=payload["created_with_mode"],
    )


def persist_snapshot(
    population: Population, path: str | Path, prompt_index: int, config_digest: str
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema": SNAPSHOT_SCHEMA,
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "config_digest": config_digest,
        "generation": population.generation,
        "rng_state": {"prompt_index": prompt_index},
        "members": [_record_payload(m) for m in population.members],
    }
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def resume_snapshot(path: str | Path, config_digest: str | None = None) -> tuple[Population, int]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
    if payload.get("schema") != SNAPSHOT_SCHEMA:
        raise SnapshotError(f"{path} is not a population snapshot")
    if payload.get("schema_version") != SNAPSHOT_SCHEMA_VERSION:
        raise SnapshotError(f"unsupported snapshot schema version {payload.get('schema_version')}")
    if config_digest is not None and payload.get("config_digest") != config_digest:
        raise SnapshotError(
            "snapshot was written by a different configuration "
            f"(digest {payload.get('config_digest')} != {config_digest})"
        )
    try:
        members = [_record_from_payload(m) for m in payload["members"]]
        generation = int(payload["generation"])
        prompt_index = int(payload["rng_state"]["prompt_index"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError(f"corrupted snapshot {path}: {exc}") from exc
    return Population(generation, members), prompt_index


PLACEHOLDER_PARENT = (
    "{Placeholder used for prompt counting only.}",
    "def score_state(state):\n    return 0",
)


class EvolutionEngine:
    def __init__(
        self,
        config: RunConfig,
        client: Any,
        evaluator: Evaluator,
        run_dir: str | Path,
    ) -> None:
        self.config = config
        self.client = client
        self.evaluator = evaluator
        self.run_dir = Path(run_dir)
        self.log = RunLog(self.run_dir / "run_log.jsonl")
        self.prompt_index = 0
        self._failed_responses: list[dict] = []

    # -- prompt plumbing ---------------------------------------------------

    def _issue_prompt(
        self, strategy: StrategyKind, generation: int, pool: list[HeuristicRecord]
    ) -> HeuristicRecord | None:
        """One full prompt->parse->validate->evaluate attempt. Returns the
        accepted record, or None when the attempt failed and was logged."""
        index = self.prompt_index
        self.prompt_index += 1

        arity = STRATEGY_ARITY[strategy]
        count = self.config.parents if arity is None else arity
        rng = _parent_rng(self.config.rng_seed, index)
        parents = sample_parents(pool, count, rng) if count else []

        spec = build_prompt(
            strategy,
            self.config.mode,
            self.config.problem,
            [(p.thought, p.code) for p in parents],
        )
        tag = f"{strategy.value}/g{generation}/p{index}"
        self.log.event(
            "prompt_issued",
            prompt_index=index,
            strategy=strategy.value,
            generation=generation,
            parent_ids=[p.id for p in parents],
            prompt_sha256=prompt_sha256(spec.rendered_text),
        )

        try:
            result = self.client.complete(
                CompletionRequest(
                    model=self.config.llm.model,
                    prompt=spec.rendered_text,
                    temperature=self.config.llm.temperature,
                    max_output_tokens=self.config.llm.max_output_tokens,
                    request_tag=tag,
                )
            )
        except (MissingFixtureError, AuthError):
            raise  # configuration-level failures abort the run
        except LlmError as exc:
            self.log.event("response_failed", prompt_index=index, error=str(exc))
            self._failed_responses.append({"prompt_index": index, "error": str(exc)})
            return None

        self.log.event(
            "llm_response",
            prompt_index=index,
            problem=self.config.problem,
            mode=self.config.mode.value,
            input_tokens=result.input_tokens,
            output_tokens=result.output_tokens,
            latency_seconds=result.latency_seconds,
            estimated=result.estimated,
        )

        try:
            parsed = parse_response(result.text)
        except ParseError as exc:
            self.log.event(
                "parse_failed", prompt_index=index, category=exc.category, error=str(exc)
            )
            self._failed_responses.append({"prompt_index": index, "raw": result.text, "error": str(exc)})
            return None

        violations = validate_code(parsed.code)
        if violations:
            self.log.event(
                "validation_failed",
                prompt_index=index,
                violations=[v.code for v in violations],
            )
            self._failed_responses.append(
                {"prompt_index": index, "raw": result.text, "error": str(violations)}
            )
            return None

        try:
            per_instance = self.evaluator.evaluate(parsed.code)
        except InvalidHeuristic as exc:
            self.log.event("evaluation_failed", prompt_index=index, error=str(exc))
            self._failed_responses.append({"prompt_index": index, "raw": result.text, "error": str(exc)})
            return None

        record = HeuristicRecord(
            id=f"h{index:04d}",
            thought=parsed.thought,
            code=parsed.code,
            fitness=fitness(per_instance),
            per_instance=per_instance,
            parent_ids=[p.id for p in parents],
            strategy=strategy.value,
            generation=generation,
            created_with_mode=self.config.mode.value,
        )
        self.log.event(
            "heuristic_accepted",
            prompt_index=index,
            record_id=record.id,
            strategy=strategy.value,
            generation=generation,
            fitness=record.fitness,
            parent_ids=record.parent_ids,
        )
        return record

    @staticmethod
    def _select(pool: list[HeuristicRecord], survivors: int) -> list[HeuristicRecord]:
        return sorted(pool, key=lambda r: r.fitness)[:survivors]

    def _try_add(
        self, record: HeuristicRecord, pool: list[HeuristicRecord], hashes: dict[str, str]
    ) -> None:
        code_hash = normalized_code_hash(record.code)
        if code_hash in hashes:
            self.log.event(
                "duplicate_discarded", record_id=record.id, duplicate_of=hashes[code_hash]
            )
            return
        hashes[code_hash] = record.id
        pool.append(record)

    # -- phases ------------------------------------------------------------

    def initialize_population(self) -> Population:
        pool: list[HeuristicRecord] = []
        hashes: dict[str, str] = {}
        for _ in range(self.config.init_calls):
            record = self._issue_prompt(StrategyKind.I1, 0, [])
            if record is not None:
                self._try_add(record, pool, hashes)
        if not pool:
            bundle = self.run_dir / "init_diagnostics.json"
            bundle.write_text(
                json.dumps(self._failed_responses, indent=2) + "\n", encoding="utf-8"
            )
            raise RunAborted(
                f"no valid heuristic after {self.config.init_calls} initialization "
                f"prompts; raw responses dumped to {bundle}"
            )
        members = self._select(pool, self.config.survivors)
        if len(members) < self.config.survivors:
            self.log.event(
                "init_shortfall",
                valid=len(members),
                requested=self.config.survivors,
            )
        population = Population(0, members)
        self.log.event(
            "selection",
            generation=0,
            member_ids=[m.id for m in members],
            best_fitness=population.best_fitness,
        )
        return population

    def run_generation(self, population: Population) -> Population:
        generation = population.generation + 1
        pool = list(population.members)
        hashes = {normalized_code_hash(r.code): r.id for r in pool}
        for strategy in EVOLUTION_STRATEGIES:
            for _ in range(self.config.repetitions):
                record = self._issue_prompt(strategy, generation, pool)
                if record is not None:
                    # visible to later prompts within this generation
                    self._try_add(record, pool, hashes)
        members = self._select(pool, self.config.survivors)
        next_population = Population(generation, members)
        self.log.event(
            "selection",
            generation=generation,
            member_ids=[m.id for m in members],
            best_fitness=next_population.best_fitness,
        )
        return next_population

    # -- orchestration -----------------------------------------------------

    def snapshot_path(self, generation: int) -> Path:
        return self.run_dir / "snapshots" / f"generation_{generation:04d}.json"

    def _fast_forward_client(self) -> None:
        """Replay clients consume fixture entries per prompt; after a resume
        the entries already used by the interrupted attempt must be skipped
        so duplicate prompt texts keep lining up with their recordings."""
        if not hasattr(self.client, "fast_forward") or not self.log.path.exists():
            return
        issued: dict[int, str] = {}
        with self.log.path.open(encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event.get("event") == "prompt_issued":
                    # later attempts re-issue the same prompt for an index;
                    # keep one hash per index
                    issued[event["prompt_index"]] = event["prompt_sha256"]
        hashes = [issued[i] for i in sorted(issued) if i < self.prompt_index]
        self.client.fast_forward(hashes)

    def _write_snapshot(self, population: Population) -> None:
        path = persist_snapshot(
            population, self.snapshot_path(population.generation), self.prompt_index,
            self.config.digest(),
        )
        self.log.event("snapshot_written", generation=population.generation, path=str(path))

    def run(self, resume_from: str | Path | None = None) -> Population:
        started = time.monotonic()
        self.log.event(
            "run_started",
            config_digest=self.config.digest(),
            tool_version=TOOL_VERSION,
            problem=self.config.problem,
            mode=self.config.mode.value,
            resumed=bool(resume_from),
        )
        if resume_from is not None:
            population, self.prompt_index = resume_snapshot(resume_from, self.config.digest())
            self._fast_forward_client()
        else:
            population = self.initialize_population()
            self._write_snapshot(population)
        while population.generation < self.config.generations:
            population = self.run_generation(population)
            self._write_snapshot(population)
        self.log.event(
            "run_completed",
            prompts_issued=self.prompt_index,
            generations=population.generation,
            best_fitness=population.best_fitness,
            elapsed_seconds=time.monotonic() - started,
        )
        return population

    def dry_run(self) -> dict:
        """Build and count every prompt the configured run would issue,
        without contacting the LLM or evaluating anything."""
        placeholder_pool = [PLACEHOLDER_PARENT] * max(self.config.parents, 1)
        build_prompt(StrategyKind.I1, self.config.mode, self.config.problem, [])
        for strategy in EVOLUTION_STRATEGIES:
            arity = STRATEGY_ARITY[strategy]
            count = self.config.parents if arity is None else arity
            build_prompt(
                strategy, self.config.mode, self.config.problem, placeholder_pool[:count]
            )
        init_prompts = self.config.init_calls
        evolution_prompts = self.config.generations * len(EVOLUTION_STRATEGIES) * self.config.repetitions
        return {
            "init_prompts": init_prompts,
            "evolution_prompts": evolution_prompts,
            "total_prompts": init_prompts + evolution_prompts,
        }
