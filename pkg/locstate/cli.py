"""
Command line interface to locstate
"""

import io
import json
import logging
import sys
from functools import partial

import click

import locstate._version
from locstate.constants import MODE_NAMES, OUTPUT_FORMATS, PRESET_NAMES
from locstate.exceptions import CommandLineError

if "pytest" not in sys.modules:  # pragma: no cover
    if sys.stdout.encoding != "utf8" and hasattr(sys.stdout, "buffer"):
        sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf8")
    if sys.stderr.encoding != "utf8" and hasattr(sys.stderr, "buffer"):
        sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding="utf8")


CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])

MODE_HELP = {
    "free": "Free evolution of the collapsed state, one |Ψ|² profile per time.",
    "oscillator": "Evolution in a harmonic oscillator, one |Ψ|² profile per time.",
    "diffraction": "Normalized screen patterns at the given times or screen distance.",
    "compare": "Compare screen patterns with the far-field sinc² reference.",
    "trajectories": "Bohmian trajectories launched across the slit.",
    "mean-energy": "Mean energy and norm of truncated states for each k_m.",
    "momentum": "Momentum distribution of the collapsed state.",
}


class ExperimentFailed(click.ClickException):
    """A library error reported on the command line with its exit status."""

    def __init__(self, error: CommandLineError):
        super().__init__(str(error))
        self.exit_code = error.exit_code


def experiment_options(func):
    """Options shared by every experiment command; flags override the
    configuration file, which overrides the preset."""
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(dir_okay=False),
            help="Read key=value (or .yaml) configuration from PATH.",
        ),
        click.option("--preset", type=click.Choice(PRESET_NAMES), help="Start from a named preset."),
        click.option("--a", "a", type=float, help="Slit width."),
        click.option("--y0", type=float, help="Slit centre."),
        click.option("--hbar-over-m", type=float, help="Ratio hbar/m."),
        click.option("--km", help="Plane-wave cutoff k_m; a comma list in mean-energy mode."),
        click.option("--nmax", type=int, help="Highest oscillator eigenstate."),
        click.option("--omega", type=float, help="Oscillator angular frequency."),
        click.option("--times", help='Comma-separated times; "pi" and "2pi" are accepted.'),
        click.option("--screen-D", "screen_d", type=float, help="Slit-to-screen distance."),
        click.option("--kx", type=float, help="Longitudinal wave number."),
        click.option("--grid", help="Sampling grid as MIN:MAX:N."),
        click.option("--count", type=int, help="Number of trajectories."),
        click.option("--steps", type=int, help="Intervals of T bounding each step and spacing records."),
        click.option("--format", "output_format", type=click.Choice(OUTPUT_FORMATS)),
        click.option("--out", help="Output file stem."),
        click.option("--quiet", "-q", is_flag=True, help="Only log warnings and errors."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def command_line_overrides(mode, **flags) -> dict:
    """Nested configuration overrides from the command-line flags that were given."""
    # Defer expensive imports
    from locstate.config import set_dotted
    from locstate.utils import parse_grid

    if flags.get("km") is not None and flags.get("nmax") is not None:
        raise click.UsageError("--km and --nmax are mutually exclusive.")
    if (flags.get("screen_d") is None) != (flags.get("kx") is None):
        raise click.UsageError("--screen-D and --kx must be given together.")
    keys = {
        "a": "slit.a",
        "y0": "slit.y0",
        "hbar_over_m": "constants.hbar_over_m",
        "km": "cutoffs.k_m",
        "nmax": "cutoffs.n_max",
        "omega": "oscillator.omega",
        "times": "times",
        "screen_d": "screen.D",
        "kx": "screen.k_x",
        "count": "trajectories.count",
        "steps": "trajectories.steps",
        "output_format": "output.format",
        "out": "output.path",
    }
    overrides: dict = {}
    if mode is not None:
        overrides["mode"] = mode
    for flag, key in keys.items():
        if flags.get(flag) is not None:
            set_dotted(overrides, key, flags[flag])
    if flags.get("grid") is not None:
        lo, hi, points = parse_grid(flags["grid"])
        overrides["grid"] = {"min": lo, "max": hi, "points": points}
    return overrides


def run_experiment(mode, config_path=None, preset=None, quiet=False, **flags):
    # Defer expensive imports
    from locstate.config import build_config
    from locstate.experiment import run
    from locstate.log import LOGGER

    level = LOGGER.level
    if quiet:
        LOGGER.setLevel(logging.WARNING)
    try:
        overrides = command_line_overrides(mode, **flags)
        config = build_config(preset, config_path, overrides)
        run(config, progress=not quiet and sys.stderr.isatty())
    except CommandLineError as e:
        raise ExperimentFailed(e) from e
    finally:
        LOGGER.setLevel(level)


@click.version_option(version=locstate._version.VERSION, prog_name="locstate")
@click.group(context_settings=CONTEXT_SETTINGS)
def cli():
    """Location states: slit-collapsed wave functions, their evolution and diffraction."""


@cli.command(context_settings=CONTEXT_SETTINGS, short_help="Run an experiment.")
@click.argument("mode", required=False, type=click.Choice(MODE_NAMES))
@experiment_options
def run(mode, **options):
    """Run the experiment given by MODE, --config and --preset.

    MODE may be left out when the configuration file or preset sets it.

      \b
      Sample usage:
        Reproduce the far-field comparison:
            locstate run --preset fig4
        Same comparison as overlaid SVG plots:
            locstate run --preset fig4 --format svg --out overlay
    """
    run_experiment(mode, **options)


def _add_mode_command(mode: str):
    callback = experiment_options(partial(run_experiment, mode))
    cli.command(mode, context_settings=CONTEXT_SETTINGS, help=MODE_HELP[mode])(callback)


for _mode in MODE_NAMES:
    _add_mode_command(_mode)


@click.option(
    "-o",
    "--out",
    type=click.Path(dir_okay=False, writable=True),
    help="Write the schema to FILE instead of standard output.",
)
@cli.command(context_settings=CONTEXT_SETTINGS)
def schema(out):
    """Print the JSON schema of experiment configurations."""
    # Defer expensive imports
    from locstate.config import ExperimentConfig

    json_schema = ExperimentConfig.model_json_schema()
    json_schema["$schema"] = "http://json-schema.org/draft-07/schema#"
    text = json.dumps(json_schema, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf8", newline="\n") as f:
            f.write(text)


@click.argument("names", nargs=-1, type=click.Choice(PRESET_NAMES))
@cli.command(context_settings=CONTEXT_SETTINGS)
def presets(names):
    """List the shipped presets and their parameters as YAML.

    Give one or more NAMES to show only those presets.
    """
    # Defer expensive imports
    import yaml

    from locstate.config import load_preset

    selected = names or PRESET_NAMES
    click.echo(
        yaml.safe_dump({name: load_preset(name) for name in selected}, sort_keys=False),
        nl=False,
    )
