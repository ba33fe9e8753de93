# Import commands from the commands package
from src.application.commands import analyze, check, combine, conjecture, control, simulate


def register_commands(cli):
    for command in (analyze, combine, control, check, simulate, conjecture):
        cli.add_command(command)
