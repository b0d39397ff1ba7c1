"""Model-driven application scaffold generator."""

from pathlib import Path

from ._sfgen import (
    ModelError,
    PackError,
    PathCollision,
    TemplateError,
    compare_kind,
    digest,
    generate,
    lint,
    percentages,
    render_template,
    run_cli,
    sql_operator,
    validate,
)

WEBSTACK = Path(__file__).parent / "packs" / "webstack"

__all__ = [
    "ModelError",
    "PackError",
    "PathCollision",
    "TemplateError",
    "WEBSTACK",
    "compare_kind",
    "digest",
    "generate",
    "lint",
    "percentages",
    "render_template",
    "run_cli",
    "sql_operator",
    "validate",
]
