"""Prompt composition and LLM response handling.

Prompts are assembled from versioned text assets under templates/: one file
per (problem, mode, strategy) plus shared algorithmic-context and
problem-context blocks that get injected verbatim. Responses come back as a
brace-delimited one-sentence description plus a single score_state function,
which this module extracts and statically screens.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

TEMPLATE_VERSION = "1"


class AugmentationMode(str, Enum):
    EOH = "eoh"
    P_CEOH = "p_ceoh"
    A_CEOH = "a_ceoh"
    PA_CEOH = "pa_ceoh"

    @property
    def includes_problem_context(self) -> bool:
        return self in (AugmentationMode.P_CEOH, AugmentationMode.PA_CEOH)

    @property
    def includes_algorithmic_context(self) -> bool:
        return self in (AugmentationMode.A_CEOH, AugmentationMode.PA_CEOH)


class StrategyKind(str, Enum):
    I1 = "i1"
    E1 = "e1"
    E2 = "e2"
    M1 = "m1"
    M2 = "m2"


# Parent arity: exact count, or None for "any positive number" (the
# exploration strategies take however many parents the run is configured
# to sample).
STRATEGY_ARITY: dict[StrategyKind, int | None] = {
    StrategyKind.I1: 0,
    StrategyKind.E1: None,
    StrategyKind.E2: None,
    StrategyKind.M1: 1,
    StrategyKind.M2: 1,
}

EVOLUTION_STRATEGIES = (StrategyKind.E1, StrategyKind.E2, StrategyKind.M1, StrategyKind.M2)


@dataclass(frozen=True)
class PromptSpec:
    strategy: StrategyKind
    mode: AugmentationMode
    problem: str
    parents: tuple[tuple[str, str], ...]
    rendered_text: str


@dataclass(frozen=True)
class ParsedResponse:
    thought: str
    code: str


class TemplateError(ValueError):
    """Missing template asset or unsupported template version."""


class ParseError(ValueError):
    def __init__(self, category: str, message: str) -> None:
        super().__init__(f"{category}: {message}")
        self.category = category


MISSING_THOUGHT = "MISSING_THOUGHT"
MISSING_CODE = "MISSING_CODE"
AMBIGUOUS_CODE = "AMBIGUOUS_CODE"
EXTRA_DEFINITION = "EXTRA_DEFINITION"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


FORBIDDEN_IMPORT = "FORBIDDEN_IMPORT"
FORBIDDEN_WHILE = "FORBIDDEN_WHILE"
FORBIDDEN_RANDOM = "FORBIDDEN_RANDOM"
NESTED_DEFINITION = "NESTED_DEFINITION"
WRONG_NAME = "WRONG_NAME"
WRONG_ARITY = "WRONG_ARITY"
SYNTAX = "SYNTAX"

# Deliberately conservative: generic words like "sample" or "seed" are fine
# as variable names, so only unambiguous randomness names are screened.
_RANDOM_TOKENS = frozenset(
    {
        "random",
        "randint",
        "randrange",
        "shuffle",
        "choice",
        "choices",
        "uniform",
        "gauss",
        "normalvariate",
        "getrandbits",
    }
)


def _asset_text(*parts: str) -> str:
    node = resources.files("evoastar").joinpath("templates")
    for part in parts:
        node = node.joinpath(part)
    try:
        return node.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as exc:
        raise TemplateError(f"missing template asset {'/'.join(parts)}") from exc


def _template_body(raw: str, name: str) -> str:
    header, _, body = raw.partition("\n")
    if header.strip() != f"version: {TEMPLATE_VERSION}":
        raise TemplateError(f"template {name} has unsupported version header {header.strip()!r}")
    return body.lstrip("\n")


def _render_parents(parents: tuple[tuple[str, str], ...]) -> str:
    count = len(parents)
    noun = "algorithm" if count == 1 else "algorithms"
    possessive = "its code" if count == 1 else "their codes"
    lines = [f"I have {count} existing {noun} with {possessive} as follows:"]
    for index, (thought, code) in enumerate(parents, start=1):
        lines.append(f"No. {index} algorithm and the corresponding code are:")
        body = thought.strip()
        if not body.startswith("{"):
            body = "{" + body + "}"
        lines.append(body)
        lines.append(code.strip())
    return "\n".join(lines)


def build_prompt(
    strategy: StrategyKind,
    mode: AugmentationMode,
    problem: str,
    parents: list[tuple[str, str]] | tuple[tuple[str, str], ...],
) -> PromptSpec:
    """Deterministic text assembly from the template store."""
    if problem not in ("spp", "upmp"):
        raise ValueError(f"unknown problem {problem!r}")
    parents = tuple((str(t), str(c)) for t, c in parents)
    arity = STRATEGY_ARITY[strategy]
    if arity is None:
        if not parents:
            raise ValueError(f"strategy {strategy.value} requires at least one parent")
    elif len(parents) != arity:
        raise ValueError(
            f"strategy {strategy.value} takes exactly {arity} parent(s), got {len(parents)}"
        )

    raw = _asset_text(problem, mode.value, f"{strategy.value}.txt")
    body = _template_body(raw, f"{problem}/{mode.value}/{strategy.value}.txt")

    if mode.includes_algorithmic_context:
        block = _template_body(
            _asset_text(f"algorithmic_context_{problem}.txt"),
            f"algorithmic_context_{problem}.txt",
        )
        body = body.replace("<<ALGORITHMIC_CONTEXT>>", block.rstrip("\n"))
    if mode.includes_problem_context:
        block = _template_body(
            _asset_text(f"problem_context_{problem}.txt"),
            f"problem_context_{problem}.txt",
        )
        body = body.replace("<<PROBLEM_CONTEXT>>", block.rstrip("\n"))
    if strategy is not StrategyKind.I1:
        body = body.replace("<<PARENTS>>", _render_parents(parents))

    if "<<" in body:
        leftover = re.findall(r"<<[A-Z_]+>>", body)
        raise TemplateError(f"unresolved template placeholders: {leftover}")
    return PromptSpec(strategy, mode, problem, parents, body)


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)
_TOP_DEF_RE = re.compile(r"^def\s+(\w+)\s*\(", re.MULTILINE)


def _mask_fences(text: str) -> str:
    def blank(match: re.Match) -> str:
        return " " * len(match.group(0))

    return _FENCE_RE.sub(blank, text)


def _first_brace_span(text: str) -> str | None:
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return text[start + 1 : i]
    return None


def _code_region(raw: str) -> str | None:
    fences = _FENCE_RE.findall(raw)
    if fences:
        return fences[0].strip()
    lines = raw.splitlines()
    for i, line in enumerate(lines):
        if line.startswith("def score_state"):
            region = [line]
            for following in lines[i + 1 :]:
                if following.strip() == "" or following.startswith((" ", "\t")):
                    region.append(following)
                else:
                    break
            return "\n".join(region).rstrip()
    return None


def parse_response(raw: str) -> ParsedResponse:
    """Extract (thought, code): the first balanced brace span outside code
    fences, and the first fenced block (or the bare score_state region)."""
    thought = _first_brace_span(_mask_fences(raw))
    if thought is None:
        raise ParseError(MISSING_THOUGHT, "no balanced brace-delimited description found")
    code = _code_region(raw)
    if code is None or "def score_state" not in code:
        raise ParseError(MISSING_CODE, "no score_state definition found")
    names = _TOP_DEF_RE.findall(code)
    if names.count("score_state") > 1:
        raise ParseError(AMBIGUOUS_CODE, "multiple score_state definitions")
    if len(names) > 1:
        raise ParseError(EXTRA_DEFINITION, f"multiple top-level definitions: {names}")
    return ParsedResponse(thought=thought.strip(), code=code)


def canonical_response(parsed: ParsedResponse) -> str:
    """The answer shape prompts ask for; parse_response inverts it."""
    return "{" + parsed.thought + "}\n```python\n" + parsed.code + "\n```\n"


def validate_code(code: str) -> list[Violation]:
    """Static screen for the constraints the prompts impose on generated
    code. A clean pass here is a cheap pre-filter only; the evaluation
    backend repeats these checks authoritatively before executing anything.
    """
    try:
        tree = ast.parse(code)
    except SyntaxError as exc:
        return [Violation(SYNTAX, f"syntax error: {exc}")]

    violations: list[Violation] = []
    top_defs = [n for n in tree.body if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))]
    if not top_defs or top_defs[0].name != "score_state":
        named = [d.name for d in top_defs]
        violations.append(Violation(WRONG_NAME, f"expected a score_state function, found {named}"))
    if len(top_defs) > 1:
        violations.append(
            Violation(NESTED_DEFINITION, f"extra top-level definitions: {[d.name for d in top_defs[1:]]}")
        )
    if top_defs and top_defs[0].name == "score_state":
        args = top_defs[0].args
        arity = len(args.args) + len(args.posonlyargs)
        if arity != 1 or args.vararg or args.kwarg or args.kwonlyargs:
            violations.append(Violation(WRONG_ARITY, "score_state must take exactly one argument"))

    for node in ast.walk(tree):
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            violations.append(Violation(FORBIDDEN_IMPORT, "import statements are not allowed"))
        elif isinstance(node, ast.While):
            violations.append(Violation(FORBIDDEN_WHILE, "'while' loops are not allowed"))
        elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node not in tree.body:
            violations.append(Violation(NESTED_DEFINITION, f"nested definition {node.name}"))
        elif isinstance(node, ast.Name) and node.id in _RANDOM_TOKENS:
            violations.append(Violation(FORBIDDEN_RANDOM, f"randomness identifier {node.id!r}"))
        elif isinstance(node, ast.Attribute) and node.attr in _RANDOM_TOKENS:
            violations.append(Violation(FORBIDDEN_RANDOM, f"randomness identifier {node.attr!r}"))
    return violations


def normalized_code_hash(code: str) -> str:
    """Whitespace/comment-insensitive identity used for deduplication."""
    import hashlib

    tree = ast.parse(code)
    return hashlib.sha256(ast.dump(tree).encode("utf-8")).hexdigest()
