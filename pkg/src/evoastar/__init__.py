"""Evolving A* guiding heuristics with an LLM inside an evolutionary loop."""

from .config import TOOL_VERSION

__version__ = TOOL_VERSION
