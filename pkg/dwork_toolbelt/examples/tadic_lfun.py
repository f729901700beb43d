import json
import logging
import os
import sys
import time
from collections import namedtuple

import click
from click.testing import CliRunner

from dwork_toolbelt.checks import run_selfcheck, summarize
from dwork_toolbelt.errors import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    DworkError,
    PrecisionExhausted,
    SlopeAnalysisError,
)
from dwork_toolbelt.fredholm import (
    compare_lfunctions,
    lfunction_from_json,
    to_json,
    trace_formula_lfun,
    zeta_series,
)
from dwork_toolbelt.oracle import oracle_lfun, point_count
from dwork_toolbelt.padic import PrecisionProfile
from dwork_toolbelt.series import AFFINE_LINE, GEOMETRIES, TORUS, TSeriesPoly
from dwork_toolbelt.slopes import hodge_findings, newton_polygon, slope_decomposition
from dwork_toolbelt.splitting import TowerInput

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_MISMATCH = 4

EXIT_CODES = [
    (ConfigError, EXIT_USAGE),
    (DomainError, EXIT_USAGE),
    (PrecisionExhausted, EXIT_RESOURCE),
    (BudgetExceeded, EXIT_RESOURCE),
]

DEFAULTS = {
    "geometry": AFFINE_LINE,
    "f": {},
    "a": 6,
    "b": 8,
    "D": None,
    "smax": 4,
    "dmax": 4,
    "guard": None,
    "base_degree": 1,
    "block_degree": None,
    "out": None,
}

JobConfig = namedtuple(
    "JobConfig", "command p geometry f a b D smax dmax guard base_degree block_degree out"
)

#    ____             __ _
#   / ___|___  _ __  / _(_) __ _
#  | |   / _ \| '_ \| |_| |/ _` |
#  | |__| (_) | | | |  _| | (_| |
#   \____\___/|_| |_|_| |_|\__, |
#                          |___/


def parse_coefficient(text):
    """'3' is an integer, '0/1' a coordinate tuple over F_{p^m}."""
    if "/" in text:
        return tuple(int(x) for x in text.split("/"))
    return int(text)


def parse_f(text):
    """Parses "u:c,u:c,..." into {u: c}. An empty string is f = 0."""
    f = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            u, c = part.split(":")
            u = int(u)
            c = parse_coefficient(c.strip())
        except ValueError:
            raise ConfigError("cannot parse term {!r} of f, expected u:c".format(part))
        if u in f:
            raise ConfigError("exponent {} appears twice in f".format(u))
        f[u] = c
    return f


def _f_from_document(value):
    if isinstance(value, str):
        return parse_f(value)
    if isinstance(value, list):
        value = dict(value)
    if not isinstance(value, dict):
        raise ConfigError("f must be a string, an object or a list of pairs")
    try:
        return {
            int(u): tuple(c) if isinstance(c, list) else c for u, c in value.items()
        }
    except ValueError:
        raise ConfigError("exponents of f must be integers")


def load_config(command, path=None, **overrides):
    values = dict(DEFAULTS)
    if path is not None:
        try:
            with open(path) as fp:
                document = json.load(fp)
        except (OSError, ValueError) as e:
            raise ConfigError("could not read config {}: {}".format(path, e))
        unknown = set(document) - set(JobConfig._fields)
        if unknown:
            raise ConfigError("unknown config keys: {}".format(", ".join(sorted(unknown))))
        values.update(document)
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["command"] = command
    values["f"] = _f_from_document(values["f"])
    if values.get("p") is None:
        raise ConfigError("p is required, from --p or the config file")
    return JobConfig(**{field: values.get(field) for field in JobConfig._fields})


def resolve(config):
    """Validated TowerInput and PrecisionProfile for a job."""
    tower = TowerInput.build(config.p, config.geometry, config.f, config.base_degree)
    prof = PrecisionProfile.auto(
        config.p,
        config.a,
        config.b,
        config.smax,
        config.dmax,
        degree=tower.degree,
        D=config.D,
        guard=config.guard,
    )
    logger.info("f = %s over p = %d; profile %s", tower.describe(), config.p, prof)
    return tower, prof


def echo_config(config, prof):
    out = config._asdict()
    out["f"] = {str(u): list(c) if isinstance(c, tuple) else c for u, c in config.f.items()}
    out["D"] = prof.D
    out["guard"] = prof.guard
    del out["out"]
    return out


def progressbar(items, length, label):
    with click.progressbar(items, length=length, label=label, file=sys.stderr) as bar:
        for item in bar:
            yield item


#      ____                                          _
#     / ___|___  _ __ ___  _ __ ___   __ _ _ __   __| |___
#    | |   / _ \| '_ ` _ \| '_ ` _ \ / _` | '_ \ / _` / __|
#    | |__| (_) | | | | | | | | | | | (_| | | | | (_| \__ \
#     \____\___/|_| |_| |_|_| |_| |_|\__,_|_| |_|\__,_|___/


def run_lfun(config, tower, prof):
    run = trace_formula_lfun(tower, prof)
    results = {
        "lfun": to_json(run.lfun),
        "effective_digits": run.lfun.effective_digits,
        "fredholm": {"psi_0": to_json(run.c0), "psi_1": to_json(run.c1)},
        "matrix_dimensions": [run.m0.dimension, run.m1.dimension],
    }
    return results, EXIT_OK


def run_oracle(config, tower, prof):
    lfun = oracle_lfun(tower, prof, progressbar)
    results = {
        "lfun": to_json(lfun),
        "effective_digits": lfun.effective_digits,
        "point_counts": [point_count(tower, d) for d in range(1, prof.smax + 1)],
    }
    return results, EXIT_OK


def run_compare(config, tower, prof):
    left = trace_formula_lfun(tower, prof).lfun
    right = oracle_lfun(tower, prof, progressbar)
    result = compare_lfunctions(left, right)
    results = {
        "verdict": result.verdict,
        "effective_digits": result.effective_digits,
        "first_disagreement": list(result.first_disagreement)
        if result.first_disagreement
        else None,
        "detail": result.detail,
        "lfun": {left.route: to_json(left), right.route: to_json(right)},
    }
    if result.verdict != "agree":
        click.echo("Mismatch: {}".format(result.detail), err=True)
        return results, EXIT_MISMATCH
    return results, EXIT_OK


def _polygon_json(polygon):
    return {
        "vertices": [[k, str(value), provisional] for k, value, provisional in polygon.vertices()],
        "slopes": [[str(s), provisional] for s, provisional in polygon.slopes],
    }


def run_slopes(config, tower, prof):
    block_degree = config.block_degree or tower.degree
    if block_degree < 1:
        raise ConfigError("block degree must be positive; f = 0 has no slope blocks")
    run = trace_formula_lfun(tower, prof)
    polygon = newton_polygon(run.c0)
    results = {
        "psi_0": _polygon_json(polygon),
        "psi_1": _polygon_json(newton_polygon(run.c1)),
        "findings": [],
        "decomposition": None,
    }
    # the Hodge-type bound needs deg f > 0
    if tower.geometry == AFFINE_LINE and tower.degree:
        results["findings"] = [
            {"kind": f.kind, "k": f.k, "observed": str(f.observed), "bound": str(f.bound)}
            for f in hodge_findings(polygon, prof.p, tower.degree)
        ]
    try:
        report = slope_decomposition(polygon, block_degree)
    except SlopeAnalysisError as e:
        logger.warning("No slope decomposition: %s", e)
        results["decomposition_error"] = str(e)
        return results, EXIT_OK
    results["decomposition"] = {
        "block_degree": report.block_degree,
        "increment_r": str(report.increment_r),
        "residues": [str(x) for x in report.residues],
        "match_quality": [[str(s), label] for s, label in report.match_quality],
        "counts": report.counts(),
        "normalization": report.normalization,
        "block_increments": [str(x) for x in report.block_increments],
        "consistent": report.consistent,
        "analyzed": report.analyzed,
        "provisional": report.provisional,
    }
    return results, EXIT_OK


def run_checks(config, tower, prof):
    results = run_selfcheck(tower, prof, progressbar)
    ok, lines = summarize(results)
    for line in lines:
        click.echo(line, err=True)
    checks = [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results]
    return {"checks": checks, "ok": ok}, EXIT_OK if ok else EXIT_MISMATCH


command_map = {
    "lfun": run_lfun,
    "oracle": run_oracle,
    "compare": run_compare,
    "slopes": run_slopes,
    "selfcheck": run_checks,
}


def run(config):
    """Runs one job; returns (report, exit status)."""
    _command = command_map.get(config.command)
    if _command is None:
        raise ConfigError(
            "{} is not a valid command. See --help for instructions".format(config.command)
        )
    tower, prof = resolve(config)
    started = time.perf_counter()
    results, status = _command(config, tower, prof)
    report = {
        "command": config.command,
        "config": echo_config(config, prof),
        "results": results,
        "timing": {"seconds": round(time.perf_counter() - started, 3)},
    }
    return report, status


def exit_code(error):
    for cls, code in EXIT_CODES:
        if isinstance(error, cls):
            return code
    return 1


#      ____ _     ___
#     / ___| |   |_ _|
#    | |   | |    | |
#    | |___| |___ | |
#     \____|_____|___|


@click.command()
@click.argument("command")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON job file")
@click.option("--p", "p", type=int, help="The prime p")
@click.option("--geometry", type=click.Choice(GEOMETRIES), help="affine or torus")
@click.option("--f", "f", help='Laurent polynomial as "u:c,u:c,..."')
@click.option("--prec-p", "a", type=int, help="p-adic digits of the answer")
@click.option("--prec-T", "b", type=int, help="Work modulo T^b")
@click.option("--s-degree", "smax", type=int, help="Work modulo s^(smax+1)")
@click.option("--d-max", "dmax", type=int, help="Largest enumerated degree")
@click.option("--x-degree", "D", type=int, help="x-degree truncation (auto by default)")
@click.option("--guard", type=int, help="Extra working digits (auto by default)")
@click.option("--base-degree", type=int, help="Coefficients of f lie in F_{p^m}")
@click.option("--block-degree", type=int, help="Slope block size (default deg f)")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report here")
@click.option("--verbose", is_flag=True, help="Log debug output to stderr")
@click.version_option(version="0.1.0")
def main(command, config_path, verbose, **overrides):
    """T-adic L-functions of exponential sums, by Dwork's trace formula and by
    enumeration of points.

    Commands:

      \b
      lfun          L(T, s) = C(psi_0)/C(psi_1) from the Dwork operators.

      \b
      oracle        L(T, s) from brute-force exponential sums over F_{p^d}.

      \b
      compare       Both routes, compared coefficient by coefficient. Exits
                    with status 4 and the first differing coefficient on a
                    mismatch.

      \b
      slopes        T-adic Newton polygons of both Fredholm series and the
                    block decomposition of the slopes of C(psi_0).

      \b
      selfcheck     Internal consistency checks: precision doubling, route
                    agreement, oracle agreement, integrality and more.

      \b
      Exit status: 0 success, 2 usage, 3 precision or budget exhausted,
      4 mismatch or failed self-check.
    """
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING)
    logging.getLogger("dwork_toolbelt").setLevel(
        logging.DEBUG if verbose else logging.WARNING
    )

    try:
        config = load_config(command, config_path, **overrides)
        report, status = run(config)
    except DworkError as e:
        click.echo("Error: {}".format(e), err=True)
        sys.exit(exit_code(e))

    text = json.dumps(report, sort_keys=True, indent=2)
    if config.out:
        try:
            with open(config.out, "w", encoding="utf-8") as fp:
                fp.write(text + "\n")
        except OSError as e:
            error = ConfigError("could not write report {}: {}".format(config.out, e))
            click.echo("Error: {}".format(error), err=True)
            sys.exit(exit_code(error))
    else:
        click.echo(text)
    sys.exit(status)


if __name__ == "__main__":
    main()


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def _invoke(*args):
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(main, list(args) + ["--out", "report.json"])
        report = None
        if os.path.exists("report.json"):
            with open("report.json") as fp:
                report = json.load(fp)
    return result, report


def test_parse_f():
    import pytest

    assert parse_f("3:1, 1:2") == {3: 1, 1: 2}
    assert parse_f("-1:1,1:1") == {-1: 1, 1: 1}
    assert parse_f("1:0/1") == {1: (0, 1)}
    assert parse_f("") == {}
    with pytest.raises(ConfigError):
        parse_f("x^3")
    with pytest.raises(ConfigError):
        parse_f("1:1,1:2")


def test_config_file_and_overrides():
    import pytest

    runner = CliRunner()
    with runner.isolated_filesystem():
        with open("job.json", "w") as fp:
            json.dump({"p": 3, "f": {"2": 1, "1": 1}, "b": 5}, fp)
        config = load_config("lfun", "job.json", b=6, p=None)
        assert config.p == 3 and config.b == 6 and config.f == {2: 1, 1: 1}
        with open("bad.json", "w") as fp:
            json.dump({"p": 3, "prime": 3}, fp)
        with pytest.raises(ConfigError):
            load_config("lfun", "bad.json")


def test_compare_agrees():
    for p, geometry, f in [
        (2, AFFINE_LINE, "1:1"),
        (2, AFFINE_LINE, "3:1"),
        (3, AFFINE_LINE, "2:1,1:1"),
        (2, TORUS, "1:1,-1:1"),
        (5, AFFINE_LINE, "4:1"),
    ]:
        _check_compare(p, geometry, f)


def _check_compare(p, geometry, f):
    args = ["compare", "--p", str(p), "--geometry", geometry, "--f", f]
    args += ["--prec-p", "6", "--prec-T", "8", "--s-degree", "4", "--d-max", "4"]
    result, report = _invoke(*args)
    assert result.exit_code == 0, result.output
    assert report["results"]["verdict"] == "agree"
    assert report["results"]["effective_digits"] >= 4

    # at T = 0 the L-function is the zeta function of the line or the torus
    prof = PrecisionProfile.auto(p, 6, 8, 4, 4)
    L = lfunction_from_json(report["results"]["lfun"]["trace-formula"], prof)
    assert L.at_T_zero() == zeta_series(prof, geometry, 4).at_T_zero()


def test_lfun_of_zero_tower():
    result, report = _invoke("lfun", "--p", "2", "--f", "", "--s-degree", "3")
    assert result.exit_code == 0, result.output
    lfun = report["results"]["lfun"]
    assert lfun["route"] == "trace-formula"
    prof = PrecisionProfile.auto(2, 6, 8, 3, 4)
    assert lfunction_from_json(lfun, prof) == TSeriesPoly(prof, [1, -2], 3)


def test_report_is_deterministic_and_parses_back():
    args = ["lfun", "--p", "3", "--f", "2:1,1:1", "--prec-T", "5", "--s-degree", "3"]
    _, first = _invoke(*args)
    _, second = _invoke(*args)
    del first["timing"], second["timing"]
    assert first == second

    config = load_config("lfun", p=3, f="2:1,1:1", b=5, smax=3)
    tower, prof = resolve(config)
    L = lfunction_from_json(first["results"]["lfun"], prof)
    assert L == trace_formula_lfun(tower, prof).lfun


def test_usage_errors():
    result, report = _invoke("lfun", "--p", "2", "--f", "-1:1")
    assert result.exit_code == EXIT_USAGE and report is None
    result, _ = _invoke("lfun", "--p", "4", "--f", "1:1")
    assert result.exit_code == EXIT_USAGE
    result, _ = _invoke("lfun", "--p", "2", "--f", "x")
    assert result.exit_code == EXIT_USAGE
    result, _ = _invoke("plot", "--p", "2")
    assert result.exit_code == EXIT_USAGE
    result, _ = _invoke("lfun", "--f", "1:1")
    assert result.exit_code == EXIT_USAGE
    result, report = _invoke(
        "compare", "--p", "3", "--f", "2:1,1:1", "--prec-T", "4", "--s-degree", "3",
        "--d-max", "3", "--x-degree", "1",
    )
    assert result.exit_code == EXIT_USAGE and report is None


def test_unwritable_report_is_a_usage_error():
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(
            main, ["lfun", "--p", "2", "--f", "1:1", "--out", "missing/report.json"]
        )
    assert result.exit_code == EXIT_USAGE
    assert "could not write report" in result.output


def test_slopes_of_zero_tower():
    result, report = _invoke("slopes", "--p", "2", "--f", "", "--block-degree", "1")
    assert result.exit_code == 0, result.output
    assert report["results"]["findings"] == []
    assert report["results"]["psi_0"]
    result, _ = _invoke("slopes", "--p", "2", "--f", "")
    assert result.exit_code == EXIT_USAGE


def test_oracle_budget_is_a_resource_error():
    result, _ = _invoke("oracle", "--p", "2", "--f", "1:1", "--s-degree", "24", "--d-max", "24")
    assert result.exit_code == EXIT_RESOURCE


def test_slopes_of_x_cubed():
    result, report = _invoke(
        "slopes", "--p", "7", "--f", "3:1", "--prec-p", "12", "--prec-T", "73",
        "--s-degree", "9", "--d-max", "9", "--x-degree", "37",
    )
    assert result.exit_code == 0, result.output
    decomposition = report["results"]["decomposition"]
    assert decomposition["increment_r"] == "6"
    assert decomposition["residues"] == ["0", "1/3", "2/3"]
    assert decomposition["consistent"]
    assert decomposition["block_increments"] == ["6", "6"]
    assert decomposition["counts"] == {"exact": 9, "within-window": 0, "violation": 0}
    slopes = report["results"]["psi_0"]["slopes"]
    assert slopes == [[str(2 * k), False] for k in range(9)]


def test_selfcheck_command():
    result, report = _invoke(
        "selfcheck", "--p", "2", "--f", "1:1", "--prec-T", "5", "--s-degree", "3", "--d-max", "3"
    )
    assert result.exit_code == 0, result.output
    assert report["results"]["ok"]
    assert "Check complete: OK" in result.output
