"""In-process execution backend for generated score_state programs.

Code is screened structurally (same rules as the static pre-filter, applied
here authoritatively before anything runs) and compiled into a namespace
with a whitelist of builtins and nothing else: no imports, no file or
process access. Each score call receives a fresh nested-list copy of the
domain state, so a misbehaving program cannot corrupt the search.
"""

from __future__ import annotations

from typing import Any, Callable

from .prompts import Violation, validate_code

_ALLOWED_BUILTINS = {
    name: __builtins__[name] if isinstance(__builtins__, dict) else getattr(__builtins__, name)
    for name in (
        "abs",
        "all",
        "any",
        "bool",
        "dict",
        "divmod",
        "enumerate",
        "filter",
        "float",
        "frozenset",
        "int",
        "isinstance",
        "len",
        "list",
        "map",
        "max",
        "min",
        "pow",
        "range",
        "reversed",
        "round",
        "set",
        "sorted",
        "str",
        "sum",
        "tuple",
        "zip",
    )
}


class CodeRejected(ValueError):
    """Structural screening refused the program."""

    def __init__(self, violations: list[Violation]) -> None:
        super().__init__("; ".join(f"{v.code}: {v.message}" for v in violations))
        self.violations = violations


def load_score_fn(code: str) -> Callable[[Any], float]:
    """Validate and compile a score_state program; returns the callable."""
    violations = validate_code(code)
    if violations:
        raise CodeRejected(violations)
    namespace: dict[str, Any] = {"__builtins__": dict(_ALLOWED_BUILTINS)}
    exec(compile(code, "<score_state>", "exec"), namespace)  # noqa: S102 - screened above
    fn = namespace.get("score_state")
    if not callable(fn):
        raise CodeRejected([Violation("WRONG_NAME", "score_state not defined after exec")])
    return fn
