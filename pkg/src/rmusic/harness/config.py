"""Experiment configuration: TOML schema, defaults per experiment kind, parsing.

A config file is TOML with the sections ``[experiment]``, ``[scene]``,
``[sketch]``, ``[grid]``, ``[sweep]`` and ``[bound]``. Only
``experiment.kind`` is required; every other field has a default that
depends on the kind (see :data:`FIELDS`). Unknown sections or keys are
rejected so that typos do not silently fall back to defaults.
"""

from __future__ import annotations

import re
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from ..array_sim import DOA_RANGE_DEFAULT, DOA_RANGE_EDGE, MIN_SEPARATION_DEFAULT, Scene
from ..errors import ConfigError, RMusicError
from ..sketching import ETA_DEFAULT, SketchConfig
from ..spectrum import AngularGrid
from ..subspace import METHODS

KINDS = ("spectrum-demo", "timing-vs-M", "timing-vs-K", "rmse-vs-snr", "bound-check")
PRESETS = {"default": DOA_RANGE_DEFAULT, "edge": DOA_RANGE_EDGE}

# (section, key, type, description); defaults live in the dataclasses below.
FIELDS = [
    ("experiment", "kind", "str", f"required; one of {', '.join(KINDS)}"),
    ("experiment", "seed", "int", "master seed; every trial, scene and sketch seed is derived from it"),
    ("experiment", "trials", "int", "Monte Carlo trials per sweep point (rmse-vs-snr, bound-check, spectrum-demo)"),
    ("experiment", "methods", "list[str]", f"estimators to run, from {', '.join(METHODS)}"),
    ("experiment", "threads", "int", "BLAS threads (timing) or parallel trial workers (Monte Carlo)"),
    ("scene", "num_elements", "int", "array size M"),
    ("scene", "num_snapshots", "int", "snapshots N; defaults to M"),
    ("scene", "num_targets", "int", "number of sources K"),
    ("scene", "snr_db", "float", "sum of source powers over per-element noise variance, in dB"),
    ("scene", "spacing_ratio", "float", "element spacing over wavelength, in (0, 0.5]"),
    ("scene", "preset", "str", "DoA draw region: 'default' [-60, 60] or 'edge' [70, 88]"),
    ("scene", "doa_range", "list[float]", "explicit [low, high] DoA draw region in degrees; overrides preset"),
    ("scene", "min_separation_deg", "float", "minimum pairwise DoA separation of drawn scenes"),
    ("scene", "doas_deg", "list[float]", "fixed DoAs in degrees instead of random draws"),
    ("sketch", "eta", "float", "oversampling fraction, s1 = ceil((1 + eta) K)"),
    ("sketch", "s", "int", "range-sketch width; default K"),
    ("sketch", "s0", "int", "count-sketch width; default 2K"),
    ("sketch", "s1", "int", "composite-sketch width; default ceil((1 + eta) K)"),
    ("sketch", "reuse", "bool", "cache sketch operators across calls (excludes their generation from timings)"),
    ("sketch", "overprovision", "bool", "keep all s columns of the randomized basis instead of K"),
    ("grid", "start_deg", "float", "first grid angle"),
    ("grid", "stop_deg", "float", "last grid angle"),
    ("grid", "step_deg", "float", "grid step"),
    ("sweep", "snr_db", "list[float]", "SNR points of rmse-vs-snr"),
    ("sweep", "num_elements", "list[int]", "M values of timing-vs-M"),
    ("sweep", "num_targets", "list[int]", "K values of timing-vs-K"),
    ("sweep", "repetitions", "int", "timed repetitions per point (median reported), >= 5"),
    ("sweep", "warmup", "int", "untimed warm-up calls per point"),
    ("sweep", "time_budget_s", "float", "skip a method once one call exceeds this many seconds"),
    ("bound", "ranks", "list[int]", "ranks K of the synthetic R = R_K + E"),
    ("bound", "residual_ratio", "float", "||E||_F / ||R_K||_F; 0 gives exactly rank-K inputs"),
    ("bound", "sizes", "list[str]", "sketch-size regimes: 'theorem' and/or 'heuristic'"),
    ("bound", "eps", "float", "relative error used to size the 'theorem' regime"),
]


@dataclass(frozen=True)
class SceneTemplate:
    num_elements: int = 300
    num_snapshots: int | None = None
    num_targets: int = 9
    snr_db: float = -5.0
    spacing_ratio: float = 0.5
    preset: str = "default"
    doa_range: tuple[float, float] | None = None
    min_separation_deg: float = MIN_SEPARATION_DEFAULT
    doas_deg: tuple[float, ...] | None = None

    @property
    def draw_range(self) -> tuple[float, float]:
        return self.doa_range if self.doa_range is not None else PRESETS[self.preset]


@dataclass(frozen=True)
class SketchSpec:
    eta: float = ETA_DEFAULT
    s: int | None = None
    s0: int | None = None
    s1: int | None = None
    reuse: bool = False
    overprovision: bool = False

    def build(self, K: int, seed: int) -> SketchConfig:
        base = SketchConfig.from_rank(K, self.eta, seed)
        return SketchConfig(
            s=self.s or base.s,
            s0=self.s0 or base.s0,
            s1=self.s1 or base.s1,
            eta=self.eta,
            seed=seed,
            reuse=self.reuse,
            overprovision=self.overprovision,
        )


@dataclass(frozen=True)
class GridSpec:
    start_deg: float = -90.0
    stop_deg: float = 90.0
    step_deg: float = 0.1

    def build(self) -> AngularGrid:
        return AngularGrid(self.start_deg, self.stop_deg, self.step_deg)


@dataclass(frozen=True)
class SweepSpec:
    snr_db: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    num_elements: tuple[int, ...] = (100, 200, 400, 700, 1000)
    num_targets: tuple[int, ...] = (5, 10, 15, 20, 25, 30)
    repetitions: int = 5
    warmup: int = 1
    time_budget_s: float = 60.0


@dataclass(frozen=True)
class BoundSpec:
    ranks: tuple[int, ...] = (3, 9)
    residual_ratio: float = 0.1
    sizes: tuple[str, ...] = ("theorem", "heuristic")
    eps: float = 0.25


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 0
    trials: int = 1
    methods: tuple[str, ...] = ("music", "rmusic", "propagator")
    threads: int = 1
    scene: SceneTemplate = field(default_factory=SceneTemplate)
    sketch: SketchSpec = field(default_factory=SketchSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    bound: BoundSpec = field(default_factory=BoundSpec)

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"experiment.kind: unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.trials < 1:
            raise ConfigError("experiment.trials: must be >= 1")
        if self.threads < 1:
            raise ConfigError("experiment.threads: must be >= 1")
        if not self.methods:
            raise ConfigError("experiment.methods: must not be empty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"experiment.methods: unknown method {m!r}; expected one of {', '.join(METHODS)}")
        if self.seed < 0:
            raise ConfigError("experiment.seed: must be non-negative")
        sc = self.scene
        if sc.preset not in PRESETS:
            raise ConfigError(f"scene.preset: unknown preset {sc.preset!r}; expected one of {', '.join(PRESETS)}")
        if sc.doa_range is not None and len(sc.doa_range) != 2:
            raise ConfigError("scene.doa_range: needs exactly two values [low, high]")
        if sc.doas_deg is not None and len(sc.doas_deg) != sc.num_targets:
            raise ConfigError("scene.doas_deg: length must equal scene.num_targets")
        if self.sweep.repetitions < 5:
            raise ConfigError("sweep.repetitions: must be >= 5")
        if self.sweep.warmup < 0:
            raise ConfigError("sweep.warmup: must be >= 0")
        for s in self.bound.sizes:
            if s not in ("theorem", "heuristic"):
                raise ConfigError(f"bound.sizes: unknown regime {s!r}")
        try:
            self.grid.build()
            SketchConfig.from_rank(sc.num_targets, self.sketch.eta)
            Scene.from_dict(
                {
                    "num_elements": sc.num_elements,
                    "num_snapshots": sc.num_snapshots or sc.num_elements,
                    "snr_db": sc.snr_db,
                    "spacing_ratio": sc.spacing_ratio,
                    "doas_deg": list(sc.doas_deg) if sc.doas_deg else list(range(1, sc.num_targets + 1)),
                }
            )
        except RMusicError as exc:
            raise ConfigError(str(exc)) from exc
        return self


def default_config(kind: str) -> ExperimentConfig:
    """Defaults reproducing the corresponding experiment at desk scale."""
    if kind == "spectrum-demo":
        cfg = ExperimentConfig(kind, methods=("music", "rmusic", "propagator"))
    elif kind == "timing-vs-M":
        cfg = ExperimentConfig(
            kind, methods=("music", "ksvd", "propagator", "rmusic"), scene=SceneTemplate(num_targets=9, snr_db=5.0)
        )
    elif kind == "timing-vs-K":
        cfg = ExperimentConfig(
            kind,
            methods=("music", "ksvd", "propagator", "rmusic"),
            scene=SceneTemplate(num_elements=700, snr_db=5.0),
        )
    elif kind == "rmse-vs-snr":
        cfg = ExperimentConfig(
            kind,
            trials=100,
            methods=("music", "rmusic", "propagator", "inverse"),
            scene=SceneTemplate(num_elements=200, num_targets=9, snr_db=0.0),
        )
    elif kind == "bound-check":
        cfg = ExperimentConfig(kind, trials=100, methods=("rmusic",), scene=SceneTemplate(num_elements=200))
    else:
        raise ConfigError(f"experiment.kind: unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    return cfg


_TYPES = {
    "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "float": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "str": lambda v: isinstance(v, str),
    "bool": lambda v: isinstance(v, bool),
}
_SPEC = {(sec, key): typ for sec, key, typ, _ in FIELDS}


def _line_of(text: str, section: str, key: str | None) -> int | None:
    current = None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[\s*([^\]]+?)\s*\]$", s)
        if m:
            current = m.group(1)
            if key is None and current == section:
                return n
            continue
        if key is not None and current == section and re.match(rf"^{re.escape(key)}\s*=", s):
            return n
    return None


def _check_type(value, typ: str) -> bool:
    if typ.startswith("list["):
        inner = typ[5:-1]
        return isinstance(value, list) and all(_TYPES[inner](v) for v in value)
    return _TYPES[typ](value)


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse TOML text into a validated :class:`ExperimentConfig`.

    Errors are raised as :class:`ConfigError` with a ``source:line:`` prefix
    whenever the offending line can be located.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        lineno = getattr(exc, "lineno", None)
        prefix = f"{source}:{lineno}: " if lineno else f"{source}: "
        raise ConfigError(f"{prefix}malformed TOML: {exc}") from exc

    def fail(section, key, msg):
        line = _line_of(text, section, key)
        where = f"{source}:{line}: " if line else f"{source}: "
        name = f"{section}.{key}" if key else section
        raise ConfigError(f"{where}{name}: {msg}")

    sections = {sec for sec, _ in _SPEC}
    for sec, body in data.items():
        if sec not in sections or not isinstance(body, dict):
            fail(sec, None, "unknown section")
        for key, value in body.items():
            typ = _SPEC.get((sec, key))
            if typ is None:
                fail(sec, key, "unknown field")
            if not _check_type(value, typ):
                fail(sec, key, f"expected {typ}, got {value!r}")

    exp = data.get("experiment", {})
    if "kind" not in exp:
        line = _line_of(text, "experiment", None)
        where = f"{source}:{line}: " if line else f"{source}: "
        raise ConfigError(f"{where}experiment.kind: missing required field")
    if exp["kind"] not in KINDS:
        fail("experiment", "kind", f"unknown kind {exp['kind']!r}; expected one of {', '.join(KINDS)}")

    cfg = default_config(exp["kind"])

    def conv(sec, key, v):
        if isinstance(v, list):
            return tuple(v)
        return float(v) if _SPEC[sec, key] == "float" else v

    top = {k: conv("experiment", k, v) for k, v in exp.items()}
    parts = {}
    for sec in ("scene", "sketch", "grid", "sweep", "bound"):
        body = {k: conv(sec, k, v) for k, v in data.get(sec, {}).items()}
        parts[sec] = replace(getattr(cfg, sec), **body)
    cfg = replace(cfg, **top, **parts)
    try:
        return cfg.validate()
    except ConfigError as exc:
        msg = str(exc)
        m = re.match(r"^(\w+)\.(\w+): (.*)$", msg)
        if m:
            fail(m.group(1), m.group(2), m.group(3))
        raise ConfigError(f"{source}: {msg}") from exc


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from exc
    return parse_config(text, str(path))


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items() if v is not None}
    return value


def config_to_toml(cfg: ExperimentConfig) -> str:
    """Full config echo with every default spelled out (``None`` fields omitted)."""
    d = asdict(cfg)
    out = {"experiment": {k: _plain(d[k]) for k in ("kind", "seed", "trials", "methods", "threads")}}
    for sec in ("scene", "sketch", "grid", "sweep", "bound"):
        out[sec] = _plain(d[sec])
    return tomli_w.dumps(out)


def save_scene(scene: Scene, path) -> None:
    """Write a scene as a TOML ``[scene]`` table."""
    Path(path).write_text(tomli_w.dumps({"scene": scene.to_dict()}))


def load_scene(path) -> Scene:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
        return Scene.from_dict(data["scene"])
    except (tomllib.TOMLDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: invalid scene file: {exc}") from exc


def help_text() -> str:
    lines = ["config fields (TOML; only experiment.kind is required):"]
    for sec, key, typ, desc in FIELDS:
        lines.append(f"  {sec}.{key} ({typ}): {desc}")
    return "\n".join(lines)
