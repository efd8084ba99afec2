"""
Command line interface.

Usage:
    kll [options] lattice roots|quotient ...
    kll [options] fibration search|verify ...
    kll [options] monodromy orbits|sl2-order ...
    kll [options] torsion-graph ...
    kll [options] scenario classify ...
    kll [options] envelope dim ...

Every invocation writes one JSON document, with sorted keys, to stdout or to
``--output``.
"""

import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import click

from kummerlag.core.enumeration import enumerate_norm_vectors
from kummerlag.core.errors import (
    EXIT_INVARIANT,
    EXIT_OK,
    EXIT_USAGE,
    InvariantError,
    KummerLagError,
)
from kummerlag.core.kummer import kummer_model
from kummerlag.core.lattice import Lattice, Sublattice, make_standard, smith_quotient
from kummerlag.core.workers import resolve_threads
from kummerlag.fibration import DEFAULT_BOUND, run_search, verify_certificate
from kummerlag.monodromy import AffineAction, orbits, sl2_order_table
from kummerlag.scenario import (
    ConstructionScenario,
    RationalEnvelopeInput,
    classify,
    k_genericity,
    rational_envelope_dim,
    weakly_lagrangian_obstruction,
)
from kummerlag.torsion_graph import (
    FibrationPicardModel,
    diameter,
    is_connected,
    kummer_torsion_model,
    torsion_graph,
)

logger = logging.getLogger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]
JSON_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)


@dataclass(frozen=True)
class Command:
    """A parsed invocation: subcommand name, its inputs and the common options."""

    name: str
    inputs: Dict = field(default_factory=dict)
    output: Optional[Path] = None
    options: Dict = field(default_factory=dict)


def _load_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise InvariantError(f"{path} is not valid JSON: {err}") from err


def _command(name: str, **inputs) -> Command:
    obj = click.get_current_context().obj
    return Command(name, inputs, obj["output"], obj["options"])


@click.group()
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Write the report here instead of stdout.")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Number of workers; KLL_THREADS overrides it.")
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default="WARNING", show_default=True)
@click.option("--summary", is_flag=True, help="Print a one line summary on stderr.")
@click.version_option(package_name="kummerlag")
@click.pass_context
def cli(ctx, output, threads, log_level, summary):
    """Lattice searches and classifications for lagrangian fibrations."""
    ctx.obj = {
        "output": output,
        "options": {"threads": threads, "log_level": log_level.upper(), "summary": summary},
    }


def _lattice_inputs(name: Optional[str], path: Optional[Path]) -> Dict:
    if name and path:
        raise click.UsageError("Use either --lattice or --input, not both")
    return {"lattice": name, "lattice_file": str(path) if path else None}


lattice_name = click.option("--lattice", "-l", "lattice", default=None, help="Standard lattice name, e.g. E8neg or MinusTwoId(16).")
lattice_file = click.option("--input", "-i", "path", type=JSON_FILE, default=None, help="Lattice JSON file.")


@cli.group()
def lattice():
    """Roots and quotients of even lattices."""


@lattice.command("roots")
@lattice_name
@lattice_file
def lattice_roots(lattice, path):
    """Enumerate the vectors of norm -2."""
    return _command("lattice roots", **_lattice_inputs(lattice or (None if path else "KummerPi"), path))


@lattice.command("quotient")
@lattice_name
@lattice_file
@click.option("--sublattice", "-s", type=JSON_FILE, default=None, help="JSON list of generator coordinates.")
def lattice_quotient(lattice, path, sublattice):
    """Invariant factors of a lattice over a full rank sublattice."""
    inputs = _lattice_inputs(lattice or (None if path else "KummerPi"), path)
    inputs["sublattice"] = str(sublattice) if sublattice else None
    return _command("lattice quotient", **inputs)


@cli.group()
def fibration():
    """Jacobian elliptic fibrations from root avoiding vectors."""


@fibration.command("search")
@lattice_name
@lattice_file
@click.option("--bound", "-b", type=click.IntRange(min=0), default=DEFAULT_BOUND, show_default=True)
def fibration_search(lattice, path, bound):
    """Find, build and certify a fibration."""
    inputs = _lattice_inputs(lattice or (None if path else "KummerPi"), path)
    inputs["bound"] = bound
    return _command("fibration search", **inputs)


@fibration.command("verify")
@click.argument("certificate", type=JSON_FILE)
@lattice_name
@lattice_file
def fibration_verify(certificate, lattice, path):
    """Recheck a certificate from its JSON alone."""
    inputs = _lattice_inputs(lattice, path)
    inputs["certificate"] = str(certificate)
    return _command("fibration verify", **inputs)


@cli.group()
def monodromy():
    """Affine actions on (Z/m)^2 and subgroups of SL(2, Z/p)."""


@monodromy.command("orbits")
@click.argument("action", type=JSON_FILE)
def monodromy_orbits(action):
    """Orbit partition of an affine action."""
    return _command("monodromy orbits", action=str(action))


@monodromy.command("sl2-order")
@click.option("--prime", "-p", "primes", type=int, multiple=True, required=True)
@click.option("--matrices", "-m", type=JSON_FILE, default=None, help="JSON list of 2x2 generators, T and U by default.")
def monodromy_sl2_order(primes, matrices):
    """Order of the generated subgroup mod each prime."""
    return _command(
        "monodromy sl2-order",
        primes=list(primes),
        matrices=str(matrices) if matrices else None,
    )


@cli.command("torsion-graph")
@click.option("--input", "-i", "path", type=JSON_FILE, default=None, help="Fibration Picard model JSON.")
@click.option("--bound", "-b", type=click.IntRange(min=0), default=DEFAULT_BOUND, show_default=True)
def torsion_graph_command(path, bound):
    """Torsion graph of a multisection family, the Kummer one by default."""
    return _command("torsion-graph", model=str(path) if path else None, bound=bound)


@cli.group()
def scenario():
    """Classification of construction scenarios."""


@scenario.command("classify")
@click.option("--input", "-i", "path", type=JSON_FILE, default=None, help="Scenario JSON file.")
@click.option("--fixture", "-f", default=None, help="Name of a shipped scenario.")
def scenario_classify(path, fixture):
    """Apply the classification rules."""
    if bool(path) == bool(fixture):
        raise click.UsageError("Give exactly one of --input or --fixture")
    return _command("scenario classify", scenario=str(path) if path else None, fixture=fixture)


@cli.group()
def envelope():
    """Rational envelopes of holomorphic forms."""


@envelope.command("dim")
@click.argument("envelope_file", type=JSON_FILE)
def envelope_dim(envelope_file):
    """Envelope dimension, genericity and the weakly lagrangian obstruction."""
    return _command("envelope dim", envelope=str(envelope_file))


def parse_args(argv: List[str]):
    """
    Parse a command line into a :class:`Command`.

    Returns the exit code instead when click handled the invocation itself,
    as with ``--help``.

    Raises:
        click.UsageError: unknown subcommand, missing file or bad option.

    """
    if not argv:
        raise click.UsageError("Missing command")
    return cli.main(args=list(argv), prog_name="kll", standalone_mode=False)


def _resolve_lattice(inputs: Dict) -> Lattice:
    if inputs.get("lattice_file"):
        return Lattice.from_json(_load_json(inputs["lattice_file"]))
    return make_standard(inputs.get("lattice") or "KummerPi")


def _lattice_roots(inputs: Dict, threads: int) -> Dict:
    lattice = _resolve_lattice(inputs)
    roots = enumerate_norm_vectors(lattice, -2, threads=threads)
    return {
        "lattice": lattice.name,
        "rank": lattice.rank,
        "determinant": lattice.determinant,
        "count": len(roots),
        "roots": [r.to_json() for r in roots],
    }


def _lattice_quotient(inputs: Dict, threads: int) -> Dict:
    lattice = _resolve_lattice(inputs)
    if inputs.get("sublattice"):
        generators = tuple(lattice.vector(g) for g in _load_json(inputs["sublattice"]))
        sub = Sublattice(generators, lattice)
    elif lattice == kummer_model().lattice:
        sub = kummer_model().exceptional_sublattice()
    else:
        raise InvariantError("A --sublattice file is required outside the Kummer lattice")
    factors = smith_quotient(sub, lattice)
    return {
        "lattice": lattice.name,
        "factors": list(factors),
        "order": math.prod(factors),
    }


def _fibration_search(inputs: Dict, threads: int) -> Dict:
    lattice = _resolve_lattice(inputs)
    cert = run_search(inputs["bound"], lattice=lattice, threads=threads)
    return {"bound": inputs["bound"], "certificate": cert.to_json()}


def _fibration_verify(inputs: Dict, threads: int) -> Dict:
    payload = _load_json(inputs["certificate"])
    payload = payload.get("certificate", payload)
    if not inputs.get("lattice") and not inputs.get("lattice_file"):
        inputs = dict(inputs, lattice=payload.get("lattice") or "KummerPi")
    lattice = _resolve_lattice(inputs)
    roots = enumerate_norm_vectors(lattice, -2, threads=threads)
    try:
        failures = verify_certificate(
            payload,
            [list(row) for row in lattice.gram],
            [list(r.coords) for r in roots],
            code=kummer_model().code_data() if lattice == kummer_model().lattice else None,
        )
    except (KeyError, TypeError, IndexError) as err:
        raise InvariantError(f"Malformed certificate: {err!r}") from err
    return {"lattice": lattice.name, "valid": not failures, "failures": failures}


def _monodromy_orbits(inputs: Dict, threads: int) -> Dict:
    action = AffineAction.from_json(_load_json(inputs["action"]))
    partition = orbits(action)
    report = partition.to_json()
    report["transitive"] = len(partition.blocks) == 1
    report["linear"] = action.is_linear
    return report


def _monodromy_sl2_order(inputs: Dict, threads: int) -> Dict:
    matrices = _load_json(inputs["matrices"]) if inputs.get("matrices") else None
    table = sl2_order_table(inputs["primes"], matrices, threads=threads)
    return {"orders": json.loads(table.to_json(orient="records"))}


def _torsion_graph(inputs: Dict, threads: int) -> Dict:
    if inputs.get("model"):
        model = FibrationPicardModel.from_json(_load_json(inputs["model"]))
    else:
        model = kummer_torsion_model(run_search(inputs["bound"], threads=threads))
    graph = torsion_graph(model, threads=threads)
    report = graph.to_json()
    report.update(
        {
            "degrees": model.degrees,
            "connected": is_connected(graph),
            "min_degree": graph.min_degree,
            "diameter": diameter(graph),
        },
    )
    return report


def _scenario_classify(inputs: Dict, threads: int) -> Dict:
    if inputs.get("fixture"):
        from kummerlag.scenarios import scenarios

        try:
            s = scenarios[inputs["fixture"].lower()].scenario
        except KeyError as err:
            raise InvariantError(
                f"Unknown scenario {inputs['fixture']!r}, expected one of {', '.join(sorted(scenarios))}",
            ) from err
    else:
        s = ConstructionScenario.from_json(_load_json(inputs["scenario"]))
    return {"scenario": s.to_json(), "verdict": classify(s).to_json()}


def _envelope_dim(inputs: Dict, threads: int) -> Dict:
    env = RationalEnvelopeInput.from_json(_load_json(inputs["envelope"]))
    k = k_genericity(env)
    return {
        "dim_VQ": env.dim_VQ,
        "envelope_dim": rational_envelope_dim(env),
        "k": k,
        "obstruction": weakly_lagrangian_obstruction(k),
    }


HANDLERS: Dict[str, Callable[[Dict, int], Dict]] = {
    "lattice roots": _lattice_roots,
    "lattice quotient": _lattice_quotient,
    "fibration search": _fibration_search,
    "fibration verify": _fibration_verify,
    "monodromy orbits": _monodromy_orbits,
    "monodromy sl2-order": _monodromy_sl2_order,
    "torsion-graph": _torsion_graph,
    "scenario classify": _scenario_classify,
    "envelope dim": _envelope_dim,
}


def run(cmd: Command) -> Tuple[int, Dict]:
    """Execute a command and return its exit status with the JSON report."""
    threads = resolve_threads(cmd.options.get("threads"))
    try:
        report = HANDLERS[cmd.name](cmd.inputs, threads)
    except KummerLagError as err:
        logger.error("%s failed: %s", cmd.name, err)
        return err.exit_code, {"command": cmd.name, "error": type(err).__name__, "message": str(err)}
    status = EXIT_OK
    if report.get("valid") is False:
        status = EXIT_INVARIANT
    report["command"] = cmd.name
    return status, report


def _summary(report: Dict) -> str:
    keys = ("count", "factors", "valid", "connected", "transitive", "envelope_dim", "error")
    parts = [f"{k}={report[k]}" for k in keys if k in report]
    if "verdict" in report:
        parts.append(f"fibered={report['verdict']['fibered']}")
    if "certificate" in report:
        parts.append(f"hS_square={report['certificate']['hS_square']}")
    return f"{report['command']}: " + (", ".join(parts) or "done")


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point, returns the exit status."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_args(argv)
    except click.UsageError as err:
        err.show()
        return EXIT_USAGE
    except click.exceptions.Exit as err:
        return err.exit_code
    except click.Abort:
        return EXIT_USAGE
    if isinstance(cmd, int):
        return cmd

    logging.basicConfig(
        level=cmd.options["log_level"],
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        status, report = run(cmd)
    except ValueError as err:
        click.echo(f"Error: {err}", err=True)
        return EXIT_USAGE

    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cmd.output:
        cmd.output.write_text(text)
    else:
        click.echo(text, nl=False)
    if cmd.options.get("summary"):
        click.echo(_summary(report), err=True)
    return status


if __name__ == "__main__":
    sys.exit(main())
