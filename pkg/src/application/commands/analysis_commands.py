import click

from src.application.commands.common import (
    emit_report,
    handle_errors,
    load_matrices,
    parse_floats,
    parse_gains,
)
from src.services.simulation_service import expand_gains

theta_option = click.option("--theta", default=None, help="Weight vector, e.g. 0.25,0.25,0.5")
lh_option = click.option("--lh", "lambda_h", type=float, default=None, help="QUAD constant L_h")
out_option = click.option("--out", default=None, help="Write the JSON report here instead of stdout")


def _twin(ctx_obj, paths, service, strict=True):
    storage = ctx_obj["STORAGE"]
    return ctx_obj["TWIN_FACTORY"].create_twin(
        load_matrices(storage, paths),
        services=[service],
        service_config=ctx_obj["DEFAULTS"],
        strict=strict,
        name=",".join(paths),
    )


@click.command()
@click.argument("matrix", type=click.Path(dir_okay=False))
@theta_option
@lh_option
@out_option
@click.pass_obj
@handle_errors
def analyze(obj, matrix, theta, lambda_h, out):
    """NLEVec, lambda_2 and ADSB of a single coupling matrix"""
    twin = _twin(obj, [matrix], "AnalysisService")
    report = twin.execute_service(
        "AnalysisService", theta=parse_floats(theta, "--theta"), lambda_h=lambda_h
    )
    emit_report(obj["STORAGE"], report, out)


@click.command()
@click.argument("matrices", nargs=-1, required=True, type=click.Path(dir_okay=False))
@theta_option
@lh_option
@out_option
@click.pass_obj
@handle_errors
def combine(obj, matrices, theta, lambda_h, out):
    """Combine the NLEVecs of several layers into one admissible theta"""
    if len(matrices) < 2:
        raise click.BadParameter("combine needs at least two matrices")
    twin = _twin(obj, matrices, "AnalysisService")
    report = twin.execute_service(
        "AnalysisService",
        theta=parse_floats(theta, "--theta"),
        lambda_h=lambda_h,
        command="combine",
    )
    for note in report.notes:
        click.echo(note, err=True)
    emit_report(obj["STORAGE"], report, out)


@click.command()
@click.argument("matrices", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--gains", multiple=True, help="Pinning gains per layer, e.g. 1,0,0 (or one number)")
@theta_option
@lh_option
@out_option
@click.pass_obj
@handle_errors
def control(obj, matrices, gains, theta, lambda_h, out):
    """ADCB and nu interval for pinning-controlled layers"""
    twin = _twin(obj, matrices, "ControlService")
    n = twin.layers[0].nodes
    report = twin.execute_service(
        "ControlService",
        gains=expand_gains(parse_gains(gains, len(matrices)), n),
        theta=parse_floats(theta, "--theta"),
        lambda_h=lambda_h,
    )
    emit_report(obj["STORAGE"], report, out)


@click.command()
@click.argument("matrices", nargs=-1, required=True, type=click.Path(dir_okay=False))
@theta_option
@out_option
@click.pass_obj
@handle_errors
def check(obj, matrices, theta, out):
    """Validate every layer and report what can be analyzed"""
    twin = _twin(obj, matrices, "CheckService", strict=False)
    report = twin.execute_service("CheckService", theta=parse_floats(theta, "--theta"))
    emit_report(obj["STORAGE"], report, out)

    failed = [entry for entry in twin.layers if not entry.valid]
    if failed:
        click.get_current_context().exit(failed[0].error.exit_code)
