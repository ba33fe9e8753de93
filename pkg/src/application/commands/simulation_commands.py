import os

import click

from config.config_loader import ConfigLoader
from src.application.commands.common import handle_errors


def _default_prefix(config_path: str) -> str:
    return os.path.splitext(os.path.basename(config_path))[0]


@click.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--out", default=None, help="Output prefix for <out>.csv and <out>.report.json")
@click.option("--seed", type=int, default=None, help="Override the config's seed")
@click.pass_obj
@handle_errors
def simulate(obj, config_path, out, seed):
    """Integrate a run config and write the trajectory CSV and JSON report"""
    defaults = obj["DEFAULTS"]
    config = ConfigLoader.load_run_config(config_path, defaults)
    twin = obj["TWIN_FACTORY"].create_twin_from_config(
        config, services=["SimulationService"], service_config=defaults
    )
    trajectory, report = twin.execute_service("SimulationService", config=config, seed=seed)

    prefix = out or _default_prefix(config_path)
    storage = obj["STORAGE"]
    storage.write_trajectory(trajectory, f"{prefix}.csv")
    storage.write_report(report, f"{prefix}.report.json")

    summary = report.simulation
    click.echo(
        f"{summary.rows} rows, {summary.error_label}(t_end)={summary.final_error:.6e}, "
        f"c(t_end)={summary.final_c:.6g}, converged={summary.converged}"
    )


@click.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--trials", type=click.IntRange(min=0), default=None, help="Number of seeds")
@click.option("--seed", type=int, default=None, help="First seed (default: the config's seed)")
@click.option("--threshold", type=float, default=None, help="Error level for time-to-threshold")
@click.option("--out", default=None, help="Summary CSV path (default: stdout)")
@click.pass_obj
@handle_errors
def conjecture(obj, config_path, trials, seed, threshold, out):
    """Compare synchronization of each layer alone against all layers together"""
    defaults = obj["DEFAULTS"]
    config = ConfigLoader.load_run_config(config_path, defaults)
    twin = obj["TWIN_FACTORY"].create_twin_from_config(
        config, services=["ConjectureService"], service_config=defaults, strict=False
    )
    if trials is None:
        trials = int(defaults.get("conjecture", {}).get("trials", 5))
    rows = twin.execute_service(
        "ConjectureService",
        config=config,
        trials=trials,
        seed=seed,
        threshold=threshold,
        workers=ConfigLoader.worker_count(defaults),
    )

    storage = obj["STORAGE"]
    if out:
        storage.write_conjecture(rows, out)
    else:
        click.echo(storage.conjecture_frame(rows).to_csv(index=False), nl=False)
