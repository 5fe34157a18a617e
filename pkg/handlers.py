"""Command handlers for the epoint command-line tool.

This module loads and validates run configurations and contains one handler
per subcommand (find-ep, vector, sweep, encircle). Handlers catch the
package's errors, log them and turn them into exit codes."""

import itertools
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import (
    DEFAULT_STEPS,
    DEGREE_SUFFIX,
    EXIT_BAD_INPUT,
    EXIT_DEGENERATE,
    EXIT_DISAGREEMENT,
    EXIT_OK,
    EXIT_PATH,
    MAX_SWEEP_AXES,
    MIN_STEPS,
    RANDOM_MARGIN,
    SWEEP_AXES,
    SWEEP_WORKERS,
    TRACE_COLUMNS,
)
from eplocate import cross_validate, ep_general, ep_numerical
from epvector import attach_vectors, phases
from errors import (
    ConfigError,
    InvalidArgumentError,
    ModelValidationError,
    PathDegeneracyError,
    TrackingFailureError,
)
from matkit import ModelParams, parse_model_mapping, random_params
from monodromy import double_loop_check, encircle
from report_generator import (
    find_ep_document,
    loop_document,
    sweep_header,
    sweep_row,
    vector_document,
    write_csv,
    write_json,
)
from utils import complex_from_json, sign_label, validate_numeric_input

logger = logging.getLogger(__name__)

OPTION_KEYS = ("model", "sweep", "loop", "random", "seed")
MAX_GRID_POINTS = 100000
MAX_STEPS = 1000000
MAX_RANDOM_MODELS = 100000


@dataclass
class LoopOptions:
    """Loop geometry: either an explicit center or an EP label, and a radius."""

    center: complex = 0j
    ep: Optional[str] = None
    radius: Optional[float] = None
    radius_factor: Optional[float] = None
    steps: int = DEFAULT_STEPS
    turns: int = 1
    clockwise: bool = False
    double_loop: bool = False


@dataclass
class RunConfig:
    path: Path
    model_data: Dict[str, float]
    seed: int = 0
    out: Optional[Path] = None
    sweep: List[Tuple[str, List[float]]] = field(default_factory=list)
    loop: Optional[LoopOptions] = None
    random_count: int = 0
    random_margin: float = RANDOM_MARGIN

    @property
    def model(self) -> ModelParams:
        """The validated model; raises ModelValidationError for a bad one."""
        return ModelParams(**self.model_data)


def validate_grid(axis: str, grid: Any) -> Tuple[bool, List[float], str]:
    """Expands one sweep axis to its list of values; returns (ok, values, message)."""
    name = axis[:-len(DEGREE_SUFFIX)] if axis.endswith(DEGREE_SUFFIX) else axis
    if name not in SWEEP_AXES:
        return False, [], f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}"

    if isinstance(grid, Mapping):
        ok, start, msg = validate_numeric_input(grid.get("start"), -math.inf, math.inf, f"{axis}.start")
        if not ok:
            return False, [], msg
        ok, stop, msg = validate_numeric_input(grid.get("stop"), -math.inf, math.inf, f"{axis}.stop")
        if not ok:
            return False, [], msg
        ok, num, msg = validate_numeric_input(grid.get("num"), 0, MAX_GRID_POINTS, f"{axis}.num")
        if not ok or num != int(num):
            return False, [], msg or f"{axis}.num must be an integer."
        values = [float(v) for v in np.linspace(start, stop, int(num))]
    elif isinstance(grid, list):
        values = []
        for value in grid:
            ok, number, msg = validate_numeric_input(value, -math.inf, math.inf, axis)
            if not ok:
                return False, [], msg
            values.append(number)
    else:
        return False, [], f"sweep axis {axis!r} needs a list or a {{start, stop, num}} object."

    if not values:
        return False, [], f"sweep axis {axis!r} is empty."
    if name != axis:
        values = [math.radians(v) for v in values]
    return True, values, ""


def _parse_sweep(data: Any) -> List[Tuple[str, List[float]]]:
    if not isinstance(data, Mapping) or not data:
        raise ConfigError("sweep must be a non-empty object of axes")
    if len(data) > MAX_SWEEP_AXES:
        raise ConfigError(f"at most {MAX_SWEEP_AXES} sweep axes are supported, got {len(data)}")
    axes = []
    for axis, grid in data.items():
        ok, values, msg = validate_grid(axis, grid)
        if not ok:
            raise ConfigError(msg)
        name = axis[:-len(DEGREE_SUFFIX)] if axis.endswith(DEGREE_SUFFIX) else axis
        axes.append((name, values))
    names = [name for name, _ in axes]
    if len(set(names)) != len(names) or ("tau" in names and {"tau0", "tau1"} & set(names)):
        raise ConfigError(f"sweep axes overlap: {', '.join(names)}")
    return axes


def _parse_loop(data: Any) -> LoopOptions:
    if not isinstance(data, Mapping):
        raise ConfigError("loop must be an object")
    options = LoopOptions()
    try:
        if "ep" in data:
            options.ep = sign_label(data["ep"])
            if "center" in data:
                raise ConfigError("give either loop.center or loop.ep, not both")
        elif "center" in data:
            options.center = complex_from_json(data["center"])
    except InvalidArgumentError as e:
        raise ConfigError(str(e)) from e

    if "radius" in data and "radius_factor" in data:
        raise ConfigError("give either loop.radius or loop.radius_factor, not both")
    for key in ("radius", "radius_factor"):
        if key in data:
            ok, value, msg = validate_numeric_input(data[key], 0.0, math.inf, f"loop.{key}")
            if not ok or value == 0.0:
                raise ConfigError(msg or f"loop.{key} must be positive.")
            setattr(options, key, value)
    if options.radius is None and options.radius_factor is None:
        raise ConfigError("loop needs a radius or a radius_factor")

    ok, steps, msg = validate_numeric_input(data.get("steps", DEFAULT_STEPS), MIN_STEPS, MAX_STEPS, "loop.steps")
    if not ok or steps != int(steps):
        raise ConfigError(msg or "loop.steps must be an integer.")
    ok, turns, msg = validate_numeric_input(data.get("turns", 1), 1, 64, "loop.turns")
    if not ok or turns != int(turns):
        raise ConfigError(msg or "loop.turns must be an integer.")
    options.steps, options.turns = int(steps), int(turns)
    for key in ("clockwise", "double_loop"):
        flag = data.get(key, False)
        if not isinstance(flag, bool):
            raise ConfigError(f"loop.{key} must be true or false, got {flag!r}")
        setattr(options, key, flag)
    return options


def load_run_config(path: Path, seed: Optional[int] = None, out: Optional[Path] = None) -> RunConfig:
    """Reads a JSON run configuration; raises ConfigError on any problem."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror or e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, e.lineno, e.colno) from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", 1, 1)

    if "model" in data:
        unknown = sorted(set(data) - set(OPTION_KEYS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        model_raw = data["model"]
    else:
        model_raw = {key: value for key, value in data.items() if key not in OPTION_KEYS}
    try:
        model_data = parse_model_mapping(model_raw)
    except InvalidArgumentError as e:
        raise ConfigError(str(e)) from e
    for key, value in model_data.items():
        if not math.isfinite(value):
            raise ConfigError(f"model value {key} must be finite")

    config = RunConfig(path=path, model_data=model_data, out=Path(out) if out else None)
    if seed is not None:
        config.seed = int(seed)
    elif "seed" in data:
        if isinstance(data["seed"], bool):
            raise ConfigError(f"seed must be an integer, got {data['seed']!r}")
        ok, value, msg = validate_numeric_input(data["seed"], 0, 2 ** 63 - 1, "seed")
        if not ok or value != int(value):
            raise ConfigError(msg or "seed must be an integer.")
        config.seed = int(value)

    if "sweep" in data:
        config.sweep = _parse_sweep(data["sweep"])
    if "loop" in data:
        config.loop = _parse_loop(data["loop"])
    if "random" in data:
        random_spec = data["random"]
        if not isinstance(random_spec, Mapping):
            raise ConfigError("random must be an object with a count")
        ok, count, msg = validate_numeric_input(random_spec.get("count", 0), 0, MAX_RANDOM_MODELS, "random.count")
        if not ok or count != int(count):
            raise ConfigError(msg or "random.count must be an integer.")
        config.random_count = int(count)
        if "margin" in random_spec:
            ok, margin, msg = validate_numeric_input(random_spec["margin"], 0.0, 1.0, "random.margin")
            if not ok:
                raise ConfigError(msg)
            config.random_margin = margin
    logger.debug("Loaded config %s: %s", path, config)
    return config


def _build_model(config: RunConfig, tag: str) -> Optional[ModelParams]:
    try:
        return config.model
    except ModelValidationError as e:
        logger.error("[%s] Invalid model: %s", tag, e)
        return None


def _random_agreement(config: RunConfig) -> Dict[str, Any]:
    """Cross-validates `random_count` seeded random models."""
    rng = np.random.default_rng(config.seed)
    models = [random_params(rng, margin=config.random_margin) for _ in range(config.random_count)]
    with ThreadPoolExecutor(max_workers=SWEEP_WORKERS) as pool:
        reports = list(pool.map(cross_validate, models))
    failures = [index for index, report in enumerate(reports) if not report.ok]
    return {
        "count": len(reports),
        "seed": config.seed,
        "margin": config.random_margin,
        "max_delta": max((r.max_delta for r in reports), default=0.0),
        "max_nilpotency": max((r.max_nilpotency for r in reports), default=0.0),
        "max_discriminant": max((r.max_discriminant for r in reports), default=0.0),
        "collisions": sum(1 for r in reports if r.collision),
        "failures": failures,
        "ok": not failures,
    }


def cmd_find_ep(config: RunConfig) -> int:
    """Locates both EPs by every applicable route and reports their agreement."""
    logger.info("[FIND-EP] Config %s", config.path)
    p = _build_model(config, "FIND-EP")
    if p is None:
        return EXIT_DEGENERATE
    try:
        report = cross_validate(p)
        random_summary = _random_agreement(config) if config.random_count else None
    except ModelValidationError as e:
        logger.error("[FIND-EP] Degenerate model: %s", e)
        return EXIT_DEGENERATE
    except InvalidArgumentError as e:
        logger.error("[FIND-EP] Bad input: %s", e)
        return EXIT_BAD_INPUT

    document = find_ep_document(p, report)
    ok = report.ok
    if random_summary is not None:
        document["random"] = random_summary
        ok = ok and random_summary["ok"]
    write_json(document, config.out)
    if not ok:
        logger.error("[FIND-EP] Routes disagree beyond tolerance")
        return EXIT_DISAGREEMENT
    logger.info("[FIND-EP] Routes agree (max delta %.3e)", report.max_delta)
    return EXIT_OK


def cmd_vector(config: RunConfig) -> int:
    """Reports EP vectors, phases, polarization and self-orthogonality per branch."""
    logger.info("[VECTOR] Config %s", config.path)
    p = _build_model(config, "VECTOR")
    if p is None:
        return EXIT_DEGENERATE
    try:
        ph = phases(p)
        solutions = attach_vectors(p, ep_general(p))
        document = vector_document(p, ph, solutions)
    except ModelValidationError as e:
        logger.error("[VECTOR] Degenerate model: %s", e)
        return EXIT_DEGENERATE
    except InvalidArgumentError as e:
        logger.error("[VECTOR] Bad input: %s", e)
        return EXIT_BAD_INPUT
    write_json(document, config.out)
    return EXIT_OK


def _sweep_cell(model_data: Dict[str, float], axes: Sequence[str], values: Sequence[float]) -> Tuple[str, Any]:
    changes: Dict[str, float] = {}
    for axis, value in zip(axes, values):
        if axis == "tau":
            changes["tau0"] = changes["tau1"] = value
        else:
            changes[axis] = value
    try:
        p = ModelParams(**{**model_data, **changes})
        return "ok", attach_vectors(p, ep_general(p))
    except ModelValidationError as e:
        logger.debug("Sweep point %s: %s", dict(zip(axes, values)), e)
        return "degenerate", None
    except InvalidArgumentError as e:
        logger.debug("Sweep point %s: %s", dict(zip(axes, values)), e)
        return "invalid", None


def cmd_sweep(config: RunConfig) -> int:
    """EP locations, xi and polarization over a grid of one or two angles."""
    if not config.sweep:
        logger.error("[SWEEP] Config %s has no sweep grid", config.path)
        return EXIT_BAD_INPUT
    axes = [name for name, _ in config.sweep]
    grid = list(itertools.product(*(values for _, values in config.sweep)))
    logger.info("[SWEEP] %d grid points over %s", len(grid), ", ".join(axes))

    with ThreadPoolExecutor(max_workers=SWEEP_WORKERS) as pool:
        results = list(pool.map(lambda point: _sweep_cell(config.model_data, axes, point), grid))

    rows = [sweep_row(index, point, status, solutions)
            for index, (point, (status, solutions)) in enumerate(zip(grid, results))]
    failed = sum(1 for status, _ in results if status != "ok")
    if failed:
        logger.warning("[SWEEP] %d of %d grid points are degenerate or invalid", failed, len(grid))
    write_csv(sweep_header(axes), rows, config.out)
    return EXIT_OK


def _summary_path(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix != ".json" else out.with_name(out.stem + ".summary.json")


def cmd_encircle(config: RunConfig) -> int:
    """Tracks the eigenvalue branches around the configured loop."""
    logger.info("[ENCIRCLE] Config %s", config.path)
    p = _build_model(config, "ENCIRCLE")
    if p is None:
        return EXIT_DEGENERATE
    loop = config.loop
    if loop is None:
        logger.error("[ENCIRCLE] Config %s has no loop section", config.path)
        return EXIT_BAD_INPUT
    try:
        center = loop.center
        if loop.ep is not None:
            plus, minus = ep_numerical(p)
            center = (plus if loop.ep == "+" else minus).lambda_c
        if loop.radius is not None:
            radius = loop.radius
        elif loop.ep is not None:
            radius = loop.radius_factor * abs(plus.lambda_c - minus.lambda_c)
        else:
            radius = loop.radius_factor * p.ep_modulus

        trace = encircle(p, center, radius, loop.steps, clockwise=loop.clockwise, turns=loop.turns)
        double_loop = None
        if loop.double_loop:
            double_loop = double_loop_check(p, radius=radius, steps=loop.steps, center=center,
                                            clockwise=loop.clockwise)
    except ModelValidationError as e:
        logger.error("[ENCIRCLE] Degenerate model: %s", e)
        return EXIT_DEGENERATE
    except (PathDegeneracyError, TrackingFailureError) as e:
        logger.error("[ENCIRCLE] %s", e)
        return EXIT_PATH
    except InvalidArgumentError as e:
        logger.error("[ENCIRCLE] Bad loop geometry: %s", e)
        return EXIT_BAD_INPUT

    document = loop_document(p, trace, double_loop)
    if config.out is not None:
        write_csv(TRACE_COLUMNS, trace.rows(), config.out)
        write_json(document, _summary_path(config.out))
    write_json(document)
    if double_loop is not None and not double_loop.restored:
        return EXIT_PATH
    logger.info("[ENCIRCLE] Permutation %s", trace.permutation.value)
    return EXIT_OK


HANDLERS = {
    "find-ep": cmd_find_ep,
    "vector": cmd_vector,
    "sweep": cmd_sweep,
    "encircle": cmd_encircle,
}

