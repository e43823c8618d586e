"""
Run a validated experiment and write its artifacts.

Time-driven modes write one file per evolution time, named
``<output.path>_t<time>.<format>``; mean-energy and momentum write a
single ``<output.path>.<format>``.
"""

import math
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from tqdm import tqdm

from locstate.config import ExperimentConfig, Mode, OutputFormat
from locstate.constants import DEFAULT_GRID_POINTS, TRAJECTORY_RECORDS
from locstate.diffraction import (
    Regime,
    ScreenGeometry,
    compare_patterns,
    fraunhofer_mapped_reference,
    fresnel_number,
    product_density,
    screen_evaluator,
    time_of_flight,
    trajectory_fan,
)
from locstate.emit import (
    emit_csv,
    emit_fan_svg,
    emit_json,
    emit_rows_csv,
    emit_svg,
)
from locstate.freestate import (
    FreeLocationState,
    PhysicalConstants,
    SlitSpec,
    default_grid,
    density_profile,
    mean_energy,
    momentum_density,
    truncated_norm,
    truncation_deficit,
)
from locstate.log import LOGGER
from locstate.potentialstate import (
    OscillatorBasis,
    oscillator_default_grid,
    oscillator_density_profile,
    project_coefficients,
)
from locstate.shared_types import SampledDensity
from locstate.utils import uniform_grid

MOMENTUM_HALF_WIDTH = 8
"""Default momentum grid half-width, in units of 2 pi / a"""


def slit_from_config(config: ExperimentConfig) -> SlitSpec:
    return SlitSpec(
        width_a=config.slit.a,
        center_y0=config.slit.y0,
        constants=PhysicalConstants(hbar_over_m=config.constants.hbar_over_m),
    )


def screen_from_config(config: ExperimentConfig) -> Optional[ScreenGeometry]:
    if config.screen is None:
        return None
    return ScreenGeometry(
        distance_D=config.screen.D,
        k_x=config.screen.k_x,
        constants=PhysicalConstants(hbar_over_m=config.constants.hbar_over_m),
    )


def evolution_times(config: ExperimentConfig) -> List[float]:
    """The configured times, or the time of flight to the screen."""
    if config.times is not None:
        return [float(t) for t in config.times]
    screen = screen_from_config(config)
    assert screen is not None
    return [float(time_of_flight(screen))]


def output_path(config: ExperimentConfig, t: Optional[float] = None) -> Path:
    extension = config.output.format.value
    if t is None:
        return Path(f"{config.output.path}.{extension}")
    return Path(f"{config.output.path}_t{float(t)!r}.{extension}")


def _grid(config: ExperimentConfig, fallback: Callable[[], np.ndarray]) -> np.ndarray:
    if config.grid is None:
        return fallback()
    return uniform_grid(config.grid.min, config.grid.max, config.grid.points)


def _emit_density(
    config: ExperimentConfig,
    density: SampledDensity,
    path: Path,
    reference: Optional[SampledDensity] = None,
    x_label: str = "y",
    y_label: str = "|Ψ|²",
) -> Path:
    output_format = config.output.format
    if output_format == OutputFormat.csv:
        return emit_csv(density, path, x_label=x_label)
    if output_format == OutputFormat.json:
        return emit_json(density, path, x_label=x_label)
    return emit_svg(
        density,
        path,
        reference=reference,
        title=f"t = {density.time_t!r}",
        x_label=x_label,
        y_label=y_label,
    )


def _run_free(config, slit, threads, progress) -> List[Path]:
    evaluator = screen_evaluator(slit, config.cutoff_km)
    written = []
    for t in tqdm(evolution_times(config), desc="free", disable=not progress):
        grid = _grid(config, lambda: default_grid(slit, t))
        density = density_profile(evaluator, grid, t, normalize=False, threads=threads)
        written.append(_emit_density(config, density, output_path(config, t)))
    return written


def _run_oscillator(config, slit, threads, progress) -> List[Path]:
    basis = OscillatorBasis(
        omega=config.oscillator.omega, n_max=config.cutoffs.n_max, constants=slit.constants
    )
    state = project_coefficients(basis, slit)
    LOGGER.info(
        f"{basis.n_max + 1} eigenstates capture {state.capture:.6f} of the collapsed state."
    )
    grid = _grid(config, lambda: oscillator_default_grid(state))
    written = []
    for t in tqdm(evolution_times(config), desc="oscillator", disable=not progress):
        density = oscillator_density_profile(state, grid, t, normalize=False, threads=threads)
        written.append(_emit_density(config, density, output_path(config, t)))
    return written


def _screen_density(config, slit, t, grid, threads) -> SampledDensity:
    screen = screen_from_config(config)
    if screen is not None:
        return product_density(slit, screen, grid, config.cutoff_km, threads=threads)
    evaluator = screen_evaluator(slit, config.cutoff_km)
    return density_profile(evaluator, grid, t, normalize=True, threads=threads)


def _log_regime(t: float, number: float):
    LOGGER.info(f"T={t!r}: Fresnel number {number:.4g}, {Regime.classify(number).value} regime.")


def _run_diffraction(config, slit, threads, progress) -> List[Path]:
    written = []
    for t in tqdm(evolution_times(config), desc="diffraction", disable=not progress):
        _log_regime(t, fresnel_number(slit, t))
        grid = _grid(config, lambda: default_grid(slit, t))
        density = _screen_density(config, slit, t, grid, threads)
        reference = None
        if config.output.format == OutputFormat.svg:
            reference = fraunhofer_mapped_reference(slit, t, grid)
        written.append(_emit_density(config, density, output_path(config, t), reference))
    return written


def _run_compare(config, slit, threads, progress) -> List[Path]:
    written = []
    for t in tqdm(evolution_times(config), desc="compare", disable=not progress):
        number = fresnel_number(slit, t)
        _log_regime(t, number)
        grid = _grid(config, lambda: default_grid(slit, t))
        observed = _screen_density(config, slit, t, grid, threads)
        reference = fraunhofer_mapped_reference(slit, t, grid)
        report = compare_patterns(observed, reference, number)
        LOGGER.info(
            f"T={t!r}: L-infinity distance {report.linf_distance / reference.peak:.2%} of peak."
        )
        path = output_path(config, t)
        output_format = config.output.format
        if output_format == OutputFormat.json:
            record = report.model_dump(mode="json")
            if config.screen is not None:
                record["time"] = t
            written.append(emit_json(record, path))
        elif output_format == OutputFormat.csv:
            rows = zip(grid.tolist(), observed.density.tolist(), reference.density.tolist())
            written.append(emit_rows_csv(("y", "density", "reference"), rows, path))
        else:
            written.append(emit_svg(observed, path, reference=reference, title=f"N_F = {number:.3g}"))
    return written


def _run_trajectories(config, slit, threads, progress) -> List[Path]:
    if config.cutoff_km is not None:
        LOGGER.warning("Trajectories follow the k_m -> infinity state; cutoffs.k_m is ignored.")
    steps = config.trajectories.steps
    written = []
    for t in evolution_times(config):
        fan = trajectory_fan(
            slit,
            t,
            count=config.trajectories.count,
            steps=steps,
            record_every=max(1, steps // TRAJECTORY_RECORDS),
            progress=progress,
        )
        path = output_path(config, t)
        if config.output.format == OutputFormat.svg:
            written.append(emit_fan_svg(fan.times, fan.paths, path, title=f"T = {t!r}"))
        else:
            rows = (
                (quantile, time, position)
                for quantile, row in zip(fan.quantiles.tolist(), fan.paths.tolist())
                for time, position in zip(fan.times.tolist(), row)
            )
            written.append(emit_rows_csv(("launch", "t", "y"), rows, path))
    return written


def _run_mean_energy(config, slit, threads, progress) -> List[Path]:
    records = []
    for km in config.cutoffs.k_m:
        state = FreeLocationState(slit=slit, cutoff_km=km)
        records.append(
            {
                "k_m": km,
                "mean_energy": mean_energy(state),
                "truncated_norm": truncated_norm(state),
                "truncation_deficit": truncation_deficit(state),
            }
        )
        LOGGER.info(f"k_m={km!r}: mean energy {records[-1]['mean_energy']:.6g} hbar.")
    path = output_path(config)
    if config.output.format == OutputFormat.json:
        return [emit_json(records, path)]
    header = ("k_m", "mean_energy", "truncated_norm", "truncation_deficit")
    return [emit_rows_csv(header, [[r[key] for key in header] for r in records], path)]


def _run_momentum(config, slit, threads, progress) -> List[Path]:
    half_width = MOMENTUM_HALF_WIDTH * 2 * math.pi / slit.width_a
    grid = _grid(config, lambda: uniform_grid(-half_width, half_width, DEFAULT_GRID_POINTS))
    density = SampledDensity(
        grid_y=grid, density=momentum_density(slit, grid), time_t=0.0, normalized=False
    )
    return [_emit_density(config, density, output_path(config), x_label="p", y_label="|φ|²")]


HANDLERS: Dict[Mode, Callable[..., List[Path]]] = {
    Mode.free: _run_free,
    Mode.oscillator: _run_oscillator,
    Mode.diffraction: _run_diffraction,
    Mode.compare: _run_compare,
    Mode.trajectories: _run_trajectories,
    Mode.mean_energy: _run_mean_energy,
    Mode.momentum: _run_momentum,
}


def run(
    config: ExperimentConfig, threads: Optional[int] = None, progress: bool = False
) -> List[Path]:
    """Evaluate the experiment described by config and write its files.

    Returns the paths written, in order. Library errors propagate; the
    command line turns them into exit statuses.
    """
    slit = slit_from_config(config)
    written = HANDLERS[config.mode](config, slit, threads, progress)
    LOGGER.info(f"Mode {config.mode.value}: wrote {len(written)} file(s).")
    return written
