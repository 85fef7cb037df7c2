"""Scenario files: loading, validation and batch execution.

A scenario is one JSON document (``schema_version`` 1) naming a device, its
frequency grids, the input packets and a task. Documented defaults:

* ``tau`` and ``rho`` both default to 1/sqrt(2); if only one is given the
  other is ``sqrt(1 - x**2)``.
* packet ``chirp`` and ``delay`` default to 0, ``order`` to 0.
* ``task`` defaults to ``{"type": "run"}``.

Relative paths inside a scenario are resolved against the scenario's folder.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import __version__
from .analysis import (
    DipCurve,
    OutputProbabilities,
    beam_splitter_decompose,
    check_interference_condition,
    decomposition_report,
    dip_scan,
    hom_kernel,
    matched_inputs,
    matched_partner,
    schmidt_decompose,
    simulate,
)
from .errors import (
    InvalidArgument,
    IoError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .oracle import MAX_MODES, brute_force_output
from .spectral import (
    Band,
    FrequencyGrid,
    ModeBasis,
    WavePacket,
    gaussian_packet,
    hermite_gauss_family,
    make_uniform_grid,
)
from .transforms import (
    UNITARITY_TOL,
    BlockKernel,
    BraggParams,
    MirrorParams,
    SchmidtEntry,
    SchmidtSpec,
    cw_bragg,
    dumps,
    kernel_to_dict,
    load_kernel,
    moving_mirror,
    parse_complex,
    passive_splitter,
    synthesize_kernel,
    verify_unitarity,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEVICES = ("passive", "mirror", "cw_bragg", "synthesized", "from_file")
TASKS = ("run", "scan", "decompose", "verify", "synthesize")
DEFAULT_COEFF = 1.0 / math.sqrt(2.0)
SCHMIDT_FORMAT = "homsim.schmidt"
ORACLE_TOL = 1e-10

_NUMBER = {"type": "number"}
_GRID = {
    "type": "object",
    "required": ["center", "span", "n"],
    "additionalProperties": False,
    "properties": {"center": _NUMBER, "span": _NUMBER,
                   "n": {"type": "integer", "minimum": 1}},
}
_PACKET = {
    "oneOf": [
        {"type": "string", "pattern": "^(matched:[1-9][0-9]*|partner)$"},
        {
            "type": "object",
            "required": ["family", "center", "width"],
            "additionalProperties": False,
            "properties": {
                "family": {"enum": ["gaussian", "hermite_gauss"]},
                "center": _NUMBER,
                "width": _NUMBER,
                "chirp": _NUMBER,
                "delay": _NUMBER,
                "order": {"type": "integer", "minimum": 0},
            },
        },
    ]
}
SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "homsim scenario",
    "type": "object",
    "required": ["schema_version", "device"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "device": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {
                "type": {"enum": list(DEVICES)},
                "tau": _NUMBER,
                "rho": _NUMBER,
                "beta": _NUMBER,
                "omega_shift": _NUMBER,
                "schmidt_path": {"type": "string"},
                "kernel_path": {"type": "string"},
            },
        },
        "grids": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"red": _GRID, "blue": _GRID},
        },
        "packets": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"red": _PACKET, "blue": _PACKET},
        },
        "task": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "type": {"enum": list(TASKS)},
                "delays": {
                    "oneOf": [
                        {"type": "array", "items": _NUMBER, "minItems": 1},
                        {
                            "type": "object",
                            "required": ["start", "stop", "num"],
                            "additionalProperties": False,
                            "properties": {"start": _NUMBER, "stop": _NUMBER,
                                           "num": {"type": "integer", "minimum": 1}},
                        },
                    ]
                },
                "schmidt_path": {"type": "string"},
            },
        },
    },
}


@dataclass(frozen=True)
class GridConfig:
    center: float
    span: float
    n: int

    def build(self, band) -> FrequencyGrid:
        return make_uniform_grid(self.center, self.span, self.n, band)


@dataclass(frozen=True)
class DeviceConfig:
    type: str
    tau: float = DEFAULT_COEFF
    rho: float = DEFAULT_COEFF
    beta: Optional[float] = None
    omega_shift: Optional[float] = None
    schmidt_path: Optional[str] = None
    kernel_path: Optional[str] = None


@dataclass(frozen=True)
class PacketConfig:
    """Either an explicit packet family or a reference (``matched:n``, ``partner``)."""

    family: str
    center: Optional[float] = None
    width: Optional[float] = None
    chirp: float = 0.0
    delay: float = 0.0
    order: int = 0
    matched_index: Optional[int] = None


@dataclass(frozen=True)
class TaskConfig:
    type: str = "run"
    delays: Optional[tuple] = None
    schmidt_path: Optional[str] = None


@dataclass(frozen=True)
class Scenario:
    device: DeviceConfig
    red_grid: Optional[GridConfig]
    blue_grid: Optional[GridConfig]
    red_packet: Optional[PacketConfig]
    blue_packet: Optional[PacketConfig]
    task: TaskConfig
    base_dir: str = "."
    schema_version: int = SCHEMA_VERSION

    def resolved(self) -> dict:
        """Canonical, fully defaulted form (paths as written)."""
        doc = dataclasses.asdict(self)
        doc.pop("base_dir")
        return doc

    def config_hash(self) -> str:
        text = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def resolve_path(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def with_grid_n(self, n: int) -> "Scenario":
        red = dataclasses.replace(self.red_grid, n=n) if self.red_grid else None
        blue = dataclasses.replace(self.blue_grid, n=n) if self.blue_grid else None
        s = dataclasses.replace(self, red_grid=red, blue_grid=blue)
        validate_scenario(s)
        return s


def _field_path(error: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def _coefficients(device: dict):
    tau, rho = device.get("tau"), device.get("rho")
    if tau is None and rho is None:
        return DEFAULT_COEFF, DEFAULT_COEFF
    if tau is None:
        return math.sqrt(max(0.0, 1.0 - rho * rho)), rho
    if rho is None:
        return tau, math.sqrt(max(0.0, 1.0 - tau * tau))
    return tau, rho


def _packet_config(raw) -> Optional[PacketConfig]:
    if raw is None:
        return None
    if isinstance(raw, str):
        if raw == "partner":
            return PacketConfig(family="partner")
        return PacketConfig(family="matched", matched_index=int(raw.split(":")[1]))
    return PacketConfig(family=raw["family"], center=float(raw["center"]),
                        width=float(raw["width"]), chirp=float(raw.get("chirp", 0.0)),
                        delay=float(raw.get("delay", 0.0)), order=int(raw.get("order", 0)))


def _delays(raw) -> Optional[tuple]:
    if raw is None:
        return None
    if isinstance(raw, dict):
        return tuple(float(x) for x in np.linspace(raw["start"], raw["stop"], raw["num"]))
    return tuple(float(x) for x in raw)


def scenario_from_dict(doc: dict, base_dir=".", task: Optional[str] = None) -> Scenario:
    """Validate a parsed scenario document; ``task`` overrides ``task.type``."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise ParseError(f"field {_field_path(first)}: {first.message}")
    dev = doc["device"]
    tau, rho = _coefficients(dev)
    device = DeviceConfig(type=dev["type"], tau=float(tau), rho=float(rho),
                          beta=dev.get("beta"), omega_shift=dev.get("omega_shift"),
                          schmidt_path=dev.get("schmidt_path"),
                          kernel_path=dev.get("kernel_path"))
    grids = doc.get("grids", {})
    red = GridConfig(**grids["red"]) if "red" in grids else None
    blue = GridConfig(**grids["blue"]) if "blue" in grids else None
    packets = doc.get("packets", {})
    task_raw = doc.get("task", {})
    task_type = task if task is not None else task_raw.get("type", "run")
    if task_type not in TASKS:
        raise InvalidArgument(f"unknown task {task_type!r}")
    task_cfg = TaskConfig(type=task_type, delays=_delays(task_raw.get("delays")),
                          schmidt_path=task_raw.get("schmidt_path"))
    scenario = Scenario(device, red, blue, _packet_config(packets.get("red")),
                        _packet_config(packets.get("blue")), task_cfg, str(base_dir))
    validate_scenario(scenario)
    return scenario


def _fail(message: str):
    raise ValidationError(message)


def validate_scenario(s: Scenario) -> None:
    """Check device, grid, packet and task preconditions without heavy work."""
    dev = s.device
    try:
        if dev.type != "from_file" and s.red_grid is None:
            _fail(f"device {dev.type!r} needs grids.red")
        if s.red_grid is not None:
            s.red_grid.build(Band.RED)
        if dev.type == "passive":
            passive_splitter(dev.tau, dev.rho, make_uniform_grid(1.0, 1.0, 1))
        elif dev.type == "mirror":
            if dev.beta is None:
                _fail("mirror device needs beta (|beta| < 1)")
            MirrorParams(dev.tau, dev.rho, dev.beta)
        elif dev.type == "cw_bragg":
            if dev.omega_shift is None:
                _fail("cw_bragg device needs omega_shift")
            cw_bragg(BraggParams(dev.tau, dev.rho, dev.omega_shift), s.red_grid.build(Band.RED))
        elif dev.type == "synthesized":
            if s.blue_grid is None:
                _fail("synthesized device needs grids.blue")
            s.blue_grid.build(Band.BLUE)
            if not (dev.schmidt_path or s.task.schmidt_path):
                _fail("synthesized device needs schmidt_path")
        elif dev.type == "from_file" and not dev.kernel_path:
            _fail("from_file device needs kernel_path")
    except ValidationError as exc:
        if type(exc) is ValidationError:
            raise
        raise ValidationError(f"device {dev.type!r}: {exc}") from exc

    task = s.task.type
    if task in ("run", "scan"):
        if s.red_packet is None or s.blue_packet is None:
            _fail(f"task {task!r} needs packets.red and packets.blue")
    if s.red_packet is not None:
        if s.red_packet.family == "partner":
            _fail("'partner' is only allowed for the blue packet")
        red_matched = s.red_packet.family == "matched"
        blue_matched = s.blue_packet is not None and s.blue_packet.family == "matched"
        if red_matched != blue_matched:
            _fail("'matched:n' must be used for both packets or neither")
        if red_matched and s.red_packet.matched_index != s.blue_packet.matched_index:
            _fail("matched packets must name the same Schmidt index")
    for label, p in (("red", s.red_packet), ("blue", s.blue_packet)):
        if p is not None and p.width is not None and not p.width > 0:
            _fail(f"packets.{label}.width must be > 0")
    if task == "scan" and not s.task.delays:
        _fail("task 'scan' needs task.delays")
    if task == "synthesize":
        if not (s.task.schmidt_path or dev.schmidt_path):
            _fail("task 'synthesize' needs task.schmidt_path")
        if s.red_grid is None or s.blue_grid is None:
            _fail("task 'synthesize' needs grids.red and grids.blue")


def load_scenario(path, task: Optional[str] = None) -> Scenario:
    """Read and validate a scenario file.

    Args:
        path: scenario JSON file.
        task: optional task type replacing the file's ``task.type``.

    Raises:
        IoError: the file cannot be read.
        ParseError: malformed JSON (with line and column) or a schema
            violation (with the offending field).
        ValidationError: a device, grid, packet or task precondition fails.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read scenario {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc, base_dir=path.parent, task=task)


# --- Schmidt spec files ------------------------------------------------------

def _read_json(path: Path, what: str):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {what} {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def schmidt_spec_from_dict(doc: dict, basis: ModeBasis) -> SchmidtSpec:
    """Build a :class:`SchmidtSpec` from its JSON form.

    Each entry has ``tau``, optional ``theta`` and four modes ``V``, ``v``
    (red) and ``W``, ``w`` (blue). A mode is either a Hermite-Gauss order
    (integer; needs ``modes.red`` / ``modes.blue`` with ``center`` and
    ``width``) or an explicit list of ``[re, im]`` amplitudes.
    """
    if not isinstance(doc, dict) or doc.get("format") != SCHMIDT_FORMAT:
        raise ParseError(f"not a {SCHMIDT_FORMAT} document")
    families = {}
    modes = doc.get("modes", {})
    entries_raw = doc.get("entries")
    if not isinstance(entries_raw, list):
        raise ParseError("field entries: expected a list")

    def mode(band: str, value, where: str) -> WavePacket:
        grid = basis.red if band == "red" else basis.blue
        if isinstance(value, int) and not isinstance(value, bool):
            if band not in modes:
                raise ParseError(f"{where}: Hermite-Gauss order needs modes.{band}")
            if value >= grid.size:
                raise ValidationError(f"{where}: order {value} exceeds the {band} grid size")
            key = (band, value)
            if band not in families:
                spec = modes[band]
                families[band] = hermite_gauss_family(grid, float(spec["center"]),
                                                      float(spec["width"]), grid.size)
            return families[key[0]][value]
        try:
            amps = parse_complex(value)
        except (TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"{where}: bad amplitude list ({exc})") from exc
        if amps.shape != (grid.size,):
            raise ValidationError(f"{where}: expected {grid.size} amplitudes")
        return WavePacket.normalized(grid, amps)

    entries = []
    for i, raw in enumerate(entries_raw):
        where = f"entries.{i}"
        try:
            tau = float(raw["tau"])
            entries.append(SchmidtEntry(
                tau=tau,
                V=mode("red", raw["V"], where + ".V"),
                v=mode("red", raw["v"], where + ".v"),
                W=mode("blue", raw["W"], where + ".W"),
                w=mode("blue", raw["w"], where + ".w"),
                theta=float(raw.get("theta", 0.0)),
            ))
        except KeyError as exc:
            raise ParseError(f"{where}: missing field {exc}") from exc
    return SchmidtSpec(entries)


def load_schmidt_spec(path, basis: ModeBasis) -> SchmidtSpec:
    return schmidt_spec_from_dict(_read_json(Path(path), "Schmidt spec"), basis)


# --- execution ---------------------------------------------------------------

@dataclass
class RunReport:
    task: str
    probabilities: Optional[OutputProbabilities] = None
    sigma: list = field(default_factory=list)
    condition_residual: Optional[float] = None
    timing: float = 0.0
    config_hash: str = ""
    version: str = __version__
    outputs: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Serializable form; timing is left out so reruns are byte-identical."""
        return {
            "task": self.task,
            "probabilities": None if self.probabilities is None else self.probabilities.as_dict(),
            "sigma": [float(s) for s in self.sigma],
            "condition_residual": self.condition_residual,
            "details": self.details,
            "outputs": list(self.outputs),
            "provenance": {"config_hash": self.config_hash, "version": self.version,
                           "inputs": dict(self.inputs)},
        }


def _file_digest(path: Path) -> str:
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def build_kernel(s: Scenario, inputs: Optional[dict] = None) -> BlockKernel:
    dev = s.device
    if dev.type == "passive":
        return passive_splitter(dev.tau, dev.rho, s.red_grid.build(Band.RED))
    if dev.type == "mirror":
        return moving_mirror(MirrorParams(dev.tau, dev.rho, dev.beta), s.red_grid.build(Band.RED))
    if dev.type == "cw_bragg":
        return cw_bragg(BraggParams(dev.tau, dev.rho, dev.omega_shift),
                        s.red_grid.build(Band.RED))
    if dev.type == "synthesized":
        basis = ModeBasis(s.red_grid.build(Band.RED), s.blue_grid.build(Band.BLUE))
        path = s.resolve_path(dev.schmidt_path or s.task.schmidt_path)
        if inputs is not None:
            inputs[str(dev.schmidt_path or s.task.schmidt_path)] = _file_digest(path)
        return synthesize_kernel(load_schmidt_spec(path, basis), basis)
    path = s.resolve_path(dev.kernel_path)
    if inputs is not None:
        inputs[str(dev.kernel_path)] = _file_digest(path)
    return load_kernel(path)


def _build_packet(cfg: PacketConfig, grid: FrequencyGrid) -> WavePacket:
    if cfg.family == "gaussian":
        return gaussian_packet(grid, cfg.center, cfg.width, cfg.chirp, cfg.delay)
    if cfg.order >= grid.size:
        raise ValidationError(f"Hermite-Gauss order {cfg.order} exceeds the grid size {grid.size}")
    packet = hermite_gauss_family(grid, cfg.center, cfg.width, cfg.order + 1)[cfg.order]
    if cfg.chirp or cfg.delay:
        detuning = grid.points - cfg.center
        packet = WavePacket(grid, packet.amps * np.exp(1j * cfg.chirp * detuning ** 2)
                            * np.exp(1j * grid.points * cfg.delay))
    return packet


def build_packets(s: Scenario, kernel: BlockKernel):
    red_cfg, blue_cfg = s.red_packet, s.blue_packet
    if red_cfg.family == "matched":
        m = matched_inputs(kernel, red_cfg.matched_index - 1)
        return m.red, m.blue
    red = _build_packet(red_cfg, kernel.basis.red)
    if blue_cfg.family == "partner":
        return red, matched_partner(kernel, red)
    return red, _build_packet(blue_cfg, kernel.basis.blue)


def emit_curve(curve: DipCurve, path) -> None:
    """Write a dip curve as CSV (``t_d,P_RB``, full precision, LF endings)."""
    if len(curve) == 0:
        raise InvalidArgument("refusing to write an empty curve")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t_d", "P_RB"])
            for t, p in curve.rows():
                writer.writerow([repr(float(t)), repr(float(p))])
    except OSError as exc:
        raise IoError(f"cannot write curve to {path}: {exc}") from exc


def _write_json(doc, path: Path) -> None:
    try:
        path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n",
                        encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _write_text(text: str, path: Path) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def execute(s: Scenario, out_dir=None) -> RunReport:
    """Run the scenario's task, write its outputs into ``out_dir`` and return the report.

    Outputs: ``report.json`` always; ``curve.csv`` for scan, ``decomposition.json``
    for decompose, ``kernel.json`` for synthesize.
    """
    started = time.perf_counter()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create output folder {out}: {exc}") from exc

    report = RunReport(task=s.task.type, config_hash=s.config_hash())
    task = s.task.type
    kernel = build_kernel(s, report.inputs) if task != "synthesize" else None
    if kernel is not None:
        log.info("task %s on %s kernel with %d+%d modes", task, s.device.type,
                 kernel.basis.n_red, kernel.basis.n_blue)

    if task in ("run", "scan"):
        red, blue = build_packets(s, kernel)
        report.probabilities = simulate(kernel, red, blue)
        report.condition_residual = check_interference_condition(red, blue, kernel)
        report.sigma = list(schmidt_decompose(hom_kernel(kernel)).sigma)
        if task == "scan":
            curve = dip_scan(kernel, red, blue, s.task.delays)
            report.details["n_delays"] = len(curve)
            imin = int(np.argmin(curve.p_rb))
            report.details["min_delay"] = float(curve.delays[imin])
            report.details["min_P_RB"] = float(curve.p_rb[imin])
            if out is not None:
                emit_curve(curve, out / "curve.csv")
                report.outputs.append("curve.csv")

    elif task == "decompose":
        k = hom_kernel(kernel)
        sd = schmidt_decompose(k)
        bsd = beam_splitter_decompose(kernel) if kernel.basis.n_red == kernel.basis.n_blue else None
        report.sigma = list(sd.sigma)
        if bsd is not None:
            report.details["tau"] = [float(a) for a in bsd.alpha]
            report.details["rho"] = [float(b) for b in bsd.beta]
            report.details["reconstruction_residual"] = bsd.residual
        if out is not None:
            _write_json(decomposition_report(k, sd, bsd), out / "decomposition.json")
            report.outputs.append("decomposition.json")

    elif task == "synthesize":
        basis = ModeBasis(s.red_grid.build(Band.RED), s.blue_grid.build(Band.BLUE))
        path = s.task.schmidt_path or s.device.schmidt_path
        report.inputs[str(path)] = _file_digest(s.resolve_path(path))
        spec = load_schmidt_spec(s.resolve_path(path), basis)
        kernel = synthesize_kernel(spec, basis)
        report.sigma = list(hom_kernel(kernel).singular_values())
        taus = spec.taus
        report.details["tau"] = [float(t) for t in taus]
        report.details["expected_sigma"] = [float(x) for x in
                                            sorted(2 * taus * np.sqrt(1 - taus ** 2),
                                                   reverse=True)]
        report.details["unitarity"] = verify_unitarity(kernel).as_dict()
        if out is not None:
            _write_text(dumps(kernel_to_dict(kernel)), out / "kernel.json")
            report.outputs.append("kernel.json")

    elif task == "verify":
        unitarity = verify_unitarity(kernel)
        report.details["unitarity"] = unitarity.as_dict()
        oracle_gap = None
        if s.red_packet is not None and s.blue_packet is not None:
            red, blue = build_packets(s, kernel)
            report.probabilities = simulate(kernel, red, blue)
            report.condition_residual = check_interference_condition(red, blue, kernel)
            if kernel.basis.size <= MAX_MODES:
                brute = brute_force_output(kernel, red, blue)
                oracle_gap = max(abs(brute.p_rr - report.probabilities.p_rr),
                                 abs(brute.p_rb - report.probabilities.p_rb),
                                 abs(brute.p_bb - report.probabilities.p_bb))
                report.details["oracle_gap"] = oracle_gap
        report.sigma = list(hom_kernel(kernel).singular_values()) \
            if unitarity.max_residual <= 1e-8 else []
        if out is not None:
            _write_json(report.to_dict(), out / "report.json")
            report.outputs.append("report.json")
        if not unitarity.ok(UNITARITY_TOL):
            raise NumericalError(
                f"unitarity residual {unitarity.max_residual:.3g} exceeds {UNITARITY_TOL:g}")
        if oracle_gap is not None and oracle_gap > ORACLE_TOL:
            raise NumericalError(f"oracle disagreement {oracle_gap:.3g} exceeds {ORACLE_TOL:g}")

    if report.probabilities is not None and abs(report.probabilities.total - 1.0) > 1e-10:
        raise NumericalError(f"output probabilities sum to {report.probabilities.total!r}")
    if out is not None and "report.json" not in report.outputs:
        report.outputs.append("report.json")
        _write_json(report.to_dict(), out / "report.json")
    report.timing = time.perf_counter() - started
    return report


__all__ = [
    "SCENARIO_SCHEMA", "Scenario", "RunReport", "load_scenario", "scenario_from_dict",
    "execute", "emit_curve", "build_kernel", "load_schmidt_spec", "schmidt_spec_from_dict",
]
