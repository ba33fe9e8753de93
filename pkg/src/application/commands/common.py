import functools
import logging
from typing import List, Optional, Sequence

import click

from src.errors import SyncNetError, exit_code_for
from src.schemas.reports import AnalysisReport

logger = logging.getLogger(__name__)


def parse_floats(text: Optional[str], option: str = "value") -> Optional[List[float]]:
    """'0.25,0.25,0.5' -> [0.25, 0.25, 0.5]"""
    if text is None:
        return None
    try:
        return [float(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise click.BadParameter(f"{option} must be comma-separated numbers, got {text!r}")


def parse_gains(values: Sequence[str], n_layers: int) -> list:
    """One --gains per layer; a single --gains is reused for every layer.

    A lone number d pins the first node with gain d.
    """
    if not values:
        raise click.BadParameter("at least one --gains is required", param_hint="--gains")
    parsed = []
    for text in values:
        gains = parse_floats(text, "--gains")
        parsed.append(gains[0] if len(gains) == 1 else gains)
    if len(parsed) == 1:
        parsed = parsed * n_layers
    return parsed


def load_matrices(storage, paths: Sequence[str]) -> List[List[List[float]]]:
    return [storage.read_matrix(path) for path in paths]


def emit_report(storage, report: AnalysisReport, out: Optional[str]) -> None:
    if out:
        storage.write_report(report, out)
    else:
        click.echo(report.model_dump_json(indent=2))


def handle_errors(command):
    """Map domain errors escaping a command to the documented exit codes"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except SyncNetError as e:
            code = exit_code_for(e)
            logger.error(f"{type(e).__name__}: {str(e)}")
            click.echo(f"error: {type(e).__name__}: {str(e)}", err=True)
            click.get_current_context().exit(code)

    return wrapper
