"""Prompt templates: versioned text files with $placeholder variables."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from string import Template


@lru_cache(maxsize=None)
def template_text(template_id: str) -> str:
    path = resources.files("tableread").joinpath("prompts", f"{template_id}.txt")
    return path.read_text(encoding="utf-8")


def render(template_id: str, variables: dict[str, str]) -> str:
    """Render a template; unknown placeholders raise KeyError.

    A `repair_hint` variable (added by the structured-output retry loop) is
    appended to the rendered prompt when the template has no slot for it.
    """
    text = template_text(template_id)
    rendered = Template(text).substitute(variables)
    hint = variables.get("repair_hint")
    if hint and "$repair_hint" not in text:
        rendered = f"{rendered}\n\n{hint}"
    return rendered


def available_templates() -> list[str]:
    root = resources.files("tableread").joinpath("prompts")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".txt"))
