"""
Experiment configuration: models, file parsing and presets.

A configuration is assembled from up to three layers, lowest precedence
first: a named preset, a configuration file, and command-line flags.
Files are flat ``key=value`` text with dotted keys (``slit.a=0.1``) and
``#`` comments, or YAML with the same keys nested when the file name ends
in ``.yaml`` or ``.yml``.
"""

import copy
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveFloat,
    ValidationError,
    field_validator,
    model_validator,
)

from locstate.constants import PRESET_NAMES, PRESETS_DIR
from locstate.exceptions import ConfigError
from locstate.utils import parse_grid, parse_number, parse_number_list

COMMAND_LINE = "command line"


class Mode(str, Enum):
    free = "free"
    oscillator = "oscillator"
    diffraction = "diffraction"
    compare = "compare"
    trajectories = "trajectories"
    mean_energy = "mean-energy"
    momentum = "momentum"


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"
    svg = "svg"


TIME_DRIVEN_MODES = (
    Mode.free,
    Mode.oscillator,
    Mode.diffraction,
    Mode.compare,
    Mode.trajectories,
)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class SlitSection(_Section):
    a: PositiveFloat
    """Slit width"""

    y0: float = 0.0
    """Slit centre"""


class ConstantsSection(_Section):
    hbar_over_m: PositiveFloat = 1.0


class CutoffsSection(_Section):
    k_m: Optional[List[PositiveFloat]] = None
    """Plane-wave cutoff(s); several only in mean-energy mode"""

    n_max: Optional[int] = Field(None, ge=0)
    """Highest oscillator eigenstate"""

    @field_validator("k_m", mode="before")
    @classmethod
    def split_cutoffs(cls, value):
        if isinstance(value, str):
            return parse_number_list(value)
        if isinstance(value, (int, float)):
            return [value]
        return value

    @model_validator(mode="after")
    def check_exclusive(self):
        if self.k_m is not None and self.n_max is not None:
            raise ValueError("give either k_m or n_max, not both")
        return self


class OscillatorSection(_Section):
    omega: PositiveFloat = 1.0


class ScreenSection(_Section):
    D: PositiveFloat
    """Slit-to-screen distance"""

    k_x: PositiveFloat
    """Longitudinal wave number"""


class GridSection(_Section):
    min: float
    max: float
    points: int = Field(ge=2)

    @model_validator(mode="after")
    def check_bounds(self):
        if not self.min < self.max:
            raise ValueError(f"grid.min={self.min!r} must be below grid.max={self.max!r}")
        return self


class TrajectoriesSection(_Section):
    count: int = Field(50, ge=1)
    steps: int = Field(2000, ge=1)


class OutputSection(_Section):
    format: OutputFormat = OutputFormat.csv
    path: str = "locstate"
    """Output file stem; one file per time is written as <path>_t<time>.<format>"""


class ExperimentConfig(_Section):
    """A complete, validated experiment."""

    mode: Mode
    slit: SlitSection
    constants: ConstantsSection = ConstantsSection()
    cutoffs: CutoffsSection = CutoffsSection()
    oscillator: OscillatorSection = OscillatorSection()
    times: Optional[List[float]] = None
    """Evolution times; mutually exclusive with screen"""

    screen: Optional[ScreenSection] = None
    """Screen geometry; the single evolution time is its time of flight"""

    grid: Optional[GridSection] = None
    """Sampling grid; chosen per time when absent"""

    trajectories: TrajectoriesSection = TrajectoriesSection()
    output: OutputSection = OutputSection()

    @field_validator("times", mode="before")
    @classmethod
    def parse_times(cls, value):
        if isinstance(value, str):
            return parse_number_list(value)
        if isinstance(value, (int, float)):
            return [value]
        if isinstance(value, list):
            return [parse_number(v) if isinstance(v, str) else v for v in value]
        return value

    @model_validator(mode="after")
    def check_mode_requirements(self):
        mode = self.mode
        if mode in TIME_DRIVEN_MODES:
            if self.times is None and self.screen is None:
                raise ValueError(f"mode {mode.value} needs either times or screen")
            if self.times is not None and self.screen is not None:
                raise ValueError("give either times or screen, not both")
            if self.times is not None and not self.times:
                raise ValueError("times must not be empty")
        if mode == Mode.oscillator and self.cutoffs.n_max is None:
            raise ValueError("mode oscillator needs cutoffs.n_max")
        if mode != Mode.oscillator and self.cutoffs.n_max is not None:
            raise ValueError(f"cutoffs.n_max only applies to mode oscillator, not {mode.value}")
        if mode == Mode.mean_energy and not self.cutoffs.k_m:
            raise ValueError("mode mean-energy needs cutoffs.k_m")
        if mode != Mode.mean_energy and self.cutoffs.k_m and len(self.cutoffs.k_m) > 1:
            raise ValueError("several values of cutoffs.k_m are only allowed in mode mean-energy")
        if mode in (Mode.diffraction, Mode.compare, Mode.trajectories) and self.times:
            if any(t <= 0 for t in self.times):
                raise ValueError(f"mode {mode.value} needs positive times")
        if mode == Mode.trajectories and self.output.format == OutputFormat.json:
            raise ValueError("mode trajectories writes csv or svg")
        if mode == Mode.mean_energy and self.output.format == OutputFormat.svg:
            raise ValueError("mode mean-energy writes csv or json")
        return self

    @property
    def cutoff_km(self) -> Optional[float]:
        if self.cutoffs.k_m:
            return self.cutoffs.k_m[0]
        return None


def set_dotted(target: Dict[str, Any], key: str, value: Any):
    parts = key.split(".")
    node = target
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f'"{key}" conflicts with the value given for "{part}"')
        node = child
    if isinstance(node.get(parts[-1]), dict):
        raise ConfigError(f'"{key}" conflicts with the keys below it')
    node[parts[-1]] = value


def parse_key_values(text: str, source: str = "<config>") -> Tuple[Dict[str, Any], Dict[str, int]]:
    """Parse flat ``key=value`` text into a nested dict.

    Returns the dict and the line number of every dotted key, for error
    messages.
    """
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f'expected key=value, got "{raw.strip()}"', source, number)
        if key in lines:
            raise ConfigError(
                f'"{key}" is already set on line {lines[key]}', source, number
            )
        if key == "grid" and ":" in value:
            lo, hi, points = parse_grid(value)
            value = {"min": lo, "max": hi, "points": points}
        try:
            set_dotted(values, key, value)
        except ConfigError as e:
            raise ConfigError(e.msg, source, number)
        lines[key] = number
    return values, lines


def _flatten_keys(data: Dict[str, Any], prefix: str = "") -> List[str]:
    keys = []
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            keys.extend(_flatten_keys(value, dotted + "."))
        else:
            keys.append(dotted)
    return keys


def load_config_file(path) -> Tuple[Dict[str, Any], Dict[str, int]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf8")
    except OSError as e:
        raise ConfigError(f"cannot read configuration file: {e.strerror}", str(path))
    if path.suffix in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise ConfigError(f"invalid YAML: {getattr(e, 'problem', e)}", str(path), line)
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError("a YAML configuration must be a mapping", str(path))
        return data, {}
    return parse_key_values(text, str(path))


def load_preset(name: str) -> Dict[str, Any]:
    if name not in PRESET_NAMES:
        raise ConfigError(
            f'unknown preset "{name}"; choose one of ' + ", ".join(PRESET_NAMES)
        )
    with open(os.path.join(PRESETS_DIR, f"{name}.yaml"), encoding="utf8") as f:
        return yaml.safe_load(f)


def _merge(lower: Dict[str, Any], upper: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(lower)
    # a layer choosing how time is driven overrides the other choice below it
    if "screen" in upper:
        merged.pop("times", None)
    if "times" in upper:
        merged.pop("screen", None)
    if "cutoffs" in upper and isinstance(merged.get("cutoffs"), dict):
        if "k_m" in upper["cutoffs"]:
            merged["cutoffs"].pop("n_max", None)
        if "n_max" in upper["cutoffs"]:
            merged["cutoffs"].pop("k_m", None)
    for key, value in upper.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def build_config(
    preset: Optional[str] = None,
    config_path=None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """Merge preset, file and command-line layers and validate the result."""
    layers: List[Tuple[Dict[str, Any], str, Dict[str, int]]] = []
    if preset:
        layers.append((load_preset(preset), f"preset {preset}", {}))
    if config_path is not None:
        data, lines = load_config_file(config_path)
        layers.append((data, str(config_path), lines))
    if overrides:
        layers.append((overrides, COMMAND_LINE, {}))

    merged: Dict[str, Any] = {}
    provenance: Dict[str, Tuple[str, Optional[int]]] = {}
    for data, source, lines in layers:
        merged = _merge(merged, data)
        for key in _flatten_keys(data):
            provenance[key] = (source, lines.get(key))

    if "mode" not in merged or merged["mode"] in (None, ""):
        source = str(config_path) if config_path is not None else None
        raise ConfigError("mode is required", source)
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        raise _config_error(e, provenance)


def _config_error(error: ValidationError, provenance) -> ConfigError:
    messages = []
    first_source: Tuple[Optional[str], Optional[int]] = (None, None)
    for detail in error.errors():
        field = ".".join(str(part) for part in detail["loc"])
        message = detail["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, ") :]
        messages.append(f"{field}: {message}" if field else message)
        if first_source == (None, None):
            for key, where in provenance.items():
                if field and (key == field or key.startswith(field + ".")):
                    first_source = where
                    break
    source, line = first_source
    return ConfigError("; ".join(messages), source, line)
