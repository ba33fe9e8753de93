import logging
import sys

import click

from config.config_loader import DEFAULTS_PATH, ConfigLoader
from src.application.api import register_commands
from src.network_twin.twin_factory import TwinFactory
from src.services.storage_service import StorageService


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    # stderr only: stdout carries reports and CSV
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


class SyncNetApp:
    def __init__(self, defaults_path: str = None):
        self.config = {}
        self._init_components(defaults_path or str(DEFAULTS_PATH))

    def _init_components(self, defaults_path: str):
        """Initialize all required components and store them in the app config"""
        self.config["DEFAULTS"] = ConfigLoader.load_defaults(defaults_path)
        self.config["TWIN_FACTORY"] = TwinFactory()
        self.config["STORAGE"] = StorageService()


@click.group(name="syncnet")
@click.option("--verbose", is_flag=True, help="Debug logging")
@click.option("--quiet", is_flag=True, help="Warnings and errors only")
@click.option("--defaults", type=click.Path(dir_okay=False), default=None, help="Defaults YAML")
@click.pass_context
def cli(ctx, verbose, quiet, defaults):
    """Synchronization analysis and simulation of multi-weighted networks"""
    configure_logging(verbose, quiet)
    ctx.obj = SyncNetApp(defaults).config


register_commands(cli)


if __name__ == "__main__":
    cli()
