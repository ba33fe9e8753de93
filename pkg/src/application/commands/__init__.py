"""
CLI Commands Package
Contains the click commands of the syncnet tool.
"""

from src.application.commands.analysis_commands import analyze, check, combine, control
from src.application.commands.simulation_commands import conjecture, simulate

__all__ = [
    "analyze",
    "combine",
    "control",
    "check",
    "simulate",
    "conjecture",
]
