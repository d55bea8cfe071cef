"""Run configuration: YAML ingestion with field-path/line diagnostics and canonical serialization.

Keys carry their units (``site_energies_cm1``, ``pump_width_fs``). Frequencies in the
``source`` and ``job`` sections may also name an eigenstate, ``"e5"`` or ``"f39"``
(1-based, ascending energy), resolved after diagonalization.
"""

from __future__ import annotations

import copy
import hashlib
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from dqc_sim.bath import TWO_EXCITON_RULES, BathSpec, BrownianMode
from dqc_sim.model import AggregateSpec, ExcitonBasis, ValidationError
from dqc_sim.photonics import ClassicalPulseSet, JsaGrid, Pulse, SpdcSource
from dqc_sim.signal import PATHWAY_FILTERS, Axis


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted field path, ``line`` 1-based or None."""

    def __init__(self, path: str, message: str, line: int | None = None):
        where = f"{path} (line {line})" if line else path
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.message = message


STATE_REF = re.compile(r"^\s*([ef])0*(\d+)\s*$")


def resolve_frequency(value, basis: ExcitonBasis) -> float:
    """Number, or an eigenstate reference like "e05" / "f39" (1-based)."""
    if isinstance(value, str):
        m = STATE_REF.match(value)
        if not m:
            raise ValidationError("frequency", f"cannot parse state reference {value!r}")
        energies = basis.one_exciton_energies if m.group(1) == "e" else basis.two_exciton_energies
        idx = int(m.group(2)) - 1
        if not 0 <= idx < energies.shape[0]:
            raise ValidationError("frequency", f"{value!r} out of range (1..{energies.shape[0]})")
        return float(energies[idx])
    return float(value)


@dataclass(frozen=True)
class DephasingSettings:
    model: str = "phonon"  # "phonon" or "uniform"
    uniform: float | None = None
    lamb_shift: bool = False
    two_exciton_rule: str = "occupation"


@dataclass(frozen=True)
class SourceSpec:
    """Photon-source descriptor whose frequencies may reference eigenstates."""

    kind: str
    params: dict

    def build(self, basis: ExcitonBasis):
        p = self.params
        if self.kind == "spdc":
            return SpdcSource(
                pump_center=resolve_frequency(p["pump_center_cm1"], basis),
                pump_width=p["pump_width_fs"],
                t1=p["t1_fs"],
                t2=p["t2_fs"],
                center1=resolve_frequency(p["center1_cm1"], basis),
                center2=resolve_frequency(p["center2_cm1"], basis),
                alpha=p["efficiency"],
                e0=p["pump_amplitude"],
            )
        pulses = tuple(
            Pulse(resolve_frequency(q["center_cm1"], basis), q["width_fs"], q["chirp_fs2"], q["amplitude"])
            for q in p["pulses"])
        return ClassicalPulseSet(pulses, p["transform_limited"])


@dataclass(frozen=True)
class JobSettings:
    omega2: Axis
    omega3: Axis
    omega1: Any = None
    normalize: bool = True
    pathway_filter: str = "both"
    abs_gap_frequencies: bool = True
    scale: float = 1.0


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    components: tuple[str, ...] = ("real", "imag", "magnitude")
    render: bool = False
    palette: str = "viridis"


@dataclass
class RunConfig:
    aggregate: AggregateSpec
    bath: BathSpec
    dephasing: DephasingSettings
    source: SourceSpec
    job: JobSettings
    jsa: JsaGrid
    output: OutputSettings
    canonical: dict = field(repr=False)
    path: Path | None = None

    @property
    def content_hash(self) -> str:
        """SHA-256 over the canonical physics/job sections (output section excluded)."""
        body = {k: v for k, v in self.canonical.items() if k != "output"}
        blob = json.dumps(body, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


# --- YAML with line tracking ---

def _line_map(text: str) -> dict[str, int]:
    lines: dict[str, int] = {}

    def walk(node, path):
        lines.setdefault(path, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                sub = f"{path}.{k.value}" if path else str(k.value)
                lines[sub] = k.start_mark.line + 1
                walk(v, sub)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, f"{path}[{i}]")

    root = yaml.compose(text, Loader=yaml.SafeLoader)
    if root is not None:
        walk(root, "")
    return lines


class _Reader:
    """Typed access into the raw mapping, raising ConfigError with line numbers."""

    def __init__(self, lines: dict[str, int]):
        self.lines = lines

    def line(self, path: str) -> int | None:
        p = path
        while p:
            if p in self.lines:
                return self.lines[p]
            parent = re.sub(r"(\.[^.\[]+|\[\d+\])$", "", p)
            if parent == p:
                break
            p = parent
        return None

    def error(self, path: str, message: str) -> ConfigError:
        return ConfigError(path, message, self.line(path))

    def section(self, d, key, path, required=True) -> dict:
        sub = f"{path}.{key}" if path else key
        if key not in d or d[key] is None:
            if required:
                raise self.error(sub, "missing section")
            return {}
        if not isinstance(d[key], dict):
            raise self.error(sub, "expected a mapping")
        return d[key]

    def get(self, d, key, path, kind, default=...):
        sub = f"{path}.{key}"
        if key not in d or d[key] is None:
            if default is ...:
                raise self.error(sub, "missing required field")
            return default
        v = d[key]
        try:
            if kind == "float":
                if isinstance(v, bool):
                    raise TypeError
                return float(v)
            if kind == "freq":
                if isinstance(v, str):
                    if not STATE_REF.match(v):
                        raise TypeError
                    return v.strip()
                if isinstance(v, bool):
                    raise TypeError
                return float(v)
            if kind == "int":
                if isinstance(v, bool) or int(v) != v:
                    raise TypeError
                return int(v)
            if kind == "bool":
                if not isinstance(v, bool):
                    raise TypeError
                return v
            if kind == "str":
                if not isinstance(v, str):
                    raise TypeError
                return v
            if kind == "vector":
                arr = np.array(v, dtype=float)
                if arr.ndim != 1:
                    raise TypeError
                return arr
            if kind == "matrix":
                arr = np.array(v, dtype=float)
                if arr.ndim != 2:
                    raise TypeError
                return arr
        except (TypeError, ValueError):
            raise self.error(sub, f"expected {kind}, got {v!r}") from None
        raise AssertionError(kind)


_AGG_KEYS = {
    "site_energies": "site_energies_cm1",
    "couplings": "couplings_cm1",
    "overtone_nonlinearity": "overtone_nonlinearity_cm1",
    "combination_nonlinearity": "combination_nonlinearity_cm1",
    "site_dipoles": "site_dipoles",
    "overtone_dipole_scale": "overtone_dipole_scale",
}
_BATH_KEYS = {
    "lambda0": "overdamped.reorganization_cm1",
    "gamma0": "overdamped.relaxation_cm1",
    "temperature": "temperature_K",
    "reorganization": "reorganization_cm1",
    "frequency": "frequency_cm1",
    "damping": "damping_cm1",
}
_SPDC_KEYS = {
    "pump_center": "pump_center_cm1", "pump_width": "pump_width_fs", "t1": "t1_fs", "t2": "t2_fs",
    "center1": "center1_cm1", "center2": "center2_cm1", "alpha": "efficiency", "e0": "pump_amplitude",
}
_PULSE_KEYS = {"center": "center_cm1", "tau0": "width_fs", "chirp": "chirp_fs2", "e0": "amplitude"}


def _translate(field_name: str, mapping: dict[str, str]) -> str:
    # "couplings[0][1]" -> "couplings_cm1[0][1]"; "modes[3].damping" -> "brownian_modes[3].damping_cm1"
    m = re.match(r"^([A-Za-z_0-9]+)(.*)$", field_name)
    head, rest = m.group(1), m.group(2)
    if head == "modes":
        sub = re.match(r"^(\[\d+\])\.?(\w*)$", rest)
        if sub:
            return f"brownian_modes{sub.group(1)}.{mapping.get(sub.group(2), sub.group(2))}"
        return "brownian_modes" + rest
    return mapping.get(head, head) + rest


def _parse_aggregate(raw: dict, r: _Reader, base: Path | None, variant: str | None):
    path = "aggregate"
    agg = dict(raw)
    if "file" in agg:
        target = Path(agg.pop("file"))
        if not target.is_absolute() and base is not None:
            target = base / target
        if not target.exists():
            raise r.error("aggregate.file", f"file not found: {target}")
        try:
            loaded = yaml.safe_load(target.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError("aggregate.file", f"parse error in {target}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise r.error("aggregate.file", "aggregate file must contain a mapping")
        if "aggregate" in loaded and isinstance(loaded["aggregate"], dict):
            loaded = loaded["aggregate"]
        loaded.update(agg)
        agg = loaded
    energies = r.get(agg, "site_energies_cm1", path, "vector")
    n = energies.shape[0]
    zeros = np.zeros((n, n)).tolist()
    couplings = r.get(agg, "couplings_cm1", path, "matrix", zeros)
    overtone = r.get(agg, "overtone_nonlinearity_cm1", path, "vector", np.zeros(n))
    combination = r.get(agg, "combination_nonlinearity_cm1", path, "matrix", zeros)
    dipoles = r.get(agg, "site_dipoles", path, "vector", np.ones(n))
    kappa = r.get(agg, "overtone_dipole_scale", path, "float", 1.0)
    variants = agg.get("overtone_variants_cm1") or {}
    if not isinstance(variants, dict):
        raise r.error("aggregate.overtone_variants_cm1", "expected a mapping of named vectors")
    selected = variant if variant is not None else agg.get("overtone_variant")
    if selected is not None:
        if selected not in variants:
            raise r.error("aggregate.overtone_variant",
                          f"unknown variant {selected!r}; available: {sorted(variants)}")
        overtone = r.get(variants, selected, "aggregate.overtone_variants_cm1", "vector")
    try:
        spec = AggregateSpec(np.array(energies), np.array(couplings), np.array(overtone),
                             np.array(combination), np.array(dipoles), kappa)
    except ValidationError as exc:
        key = _translate(exc.field, _AGG_KEYS)
        if selected is not None and key.startswith("overtone_nonlinearity_cm1"):
            key = f"overtone_variants_cm1.{selected}"
        raise r.error(f"aggregate.{key}", exc.message) from None
    canonical = {
        "site_energies_cm1": spec.site_energies.tolist(),
        "couplings_cm1": spec.couplings.tolist(),
        "overtone_nonlinearity_cm1": spec.overtone_nonlinearity.tolist(),
        "combination_nonlinearity_cm1": spec.combination_nonlinearity.tolist(),
        "site_dipoles": spec.site_dipoles.tolist(),
        "overtone_dipole_scale": spec.overtone_dipole_scale,
    }
    return spec, canonical


def _parse_bath(raw: dict, r: _Reader):
    path = "bath"
    od = r.section(raw, "overdamped", path)
    lam0 = r.get(od, "reorganization_cm1", "bath.overdamped", "float")
    gam0 = r.get(od, "relaxation_cm1", "bath.overdamped", "float")
    temperature = r.get(raw, "temperature_K", path, "float", 273.0)
    modes_raw = raw.get("brownian_modes") or []
    if not isinstance(modes_raw, list):
        raise r.error("bath.brownian_modes", "expected a list")
    modes = []
    for i, m in enumerate(modes_raw):
        mp = f"bath.brownian_modes[{i}]"
        if not isinstance(m, dict):
            raise r.error(mp, "expected a mapping")
        modes.append(BrownianMode(r.get(m, "reorganization_cm1", mp, "float"),
                                  r.get(m, "frequency_cm1", mp, "float"),
                                  r.get(m, "damping_cm1", mp, "float")))
    try:
        bath = BathSpec(lam0, gam0, tuple(modes), temperature)
    except ValidationError as exc:
        raise r.error(f"bath.{_translate(exc.field, _BATH_KEYS)}", exc.message) from None
    model = r.get(raw, "dephasing_model", path, "str", "phonon")
    if model not in ("phonon", "uniform"):
        raise r.error("bath.dephasing_model", f"must be 'phonon' or 'uniform', got {model!r}")
    uniform = r.get(raw, "uniform_dephasing_cm1", path, "float", None)
    if model == "uniform" and (uniform is None or not uniform > 0):
        raise r.error("bath.uniform_dephasing_cm1", "uniform dephasing needs a positive rate")
    lamb = r.get(raw, "lamb_shift", path, "bool", False)
    rule = r.get(raw, "two_exciton_rule", path, "str", "occupation")
    if rule not in TWO_EXCITON_RULES:
        raise r.error("bath.two_exciton_rule", f"must be one of {TWO_EXCITON_RULES}, got {rule!r}")
    deph = DephasingSettings(model, uniform, lamb, rule)
    canonical = {
        "temperature_K": temperature,
        "overdamped": {"reorganization_cm1": lam0, "relaxation_cm1": gam0},
        "brownian_modes": [{"reorganization_cm1": m.reorganization, "frequency_cm1": m.frequency,
                            "damping_cm1": m.damping} for m in modes],
        "dephasing_model": model,
        "uniform_dephasing_cm1": uniform,
        "lamb_shift": lamb,
        "two_exciton_rule": rule,
    }
    return bath, deph, canonical


def _check_with_placeholder(r: _Reader, path: str, fn, mapping, **kwargs):
    # validate numeric fields eagerly; state references are checked at build time
    numeric = {k: (15000.0 if isinstance(v, str) else v) for k, v in kwargs.items()}
    try:
        fn(**numeric)
    except ValidationError as exc:
        raise r.error(f"{path}.{mapping.get(exc.field, exc.field)}", exc.message) from None


def _parse_source(raw: dict, r: _Reader):
    path = "source"
    kind = r.get(raw, "kind", path, "str")
    if kind == "spdc":
        p = {
            "pump_center_cm1": r.get(raw, "pump_center_cm1", path, "freq"),
            "pump_width_fs": r.get(raw, "pump_width_fs", path, "float"),
            "t1_fs": r.get(raw, "t1_fs", path, "float", 0.0),
            "t2_fs": r.get(raw, "t2_fs", path, "float"),
            "center1_cm1": r.get(raw, "center1_cm1", path, "freq"),
            "center2_cm1": r.get(raw, "center2_cm1", path, "freq"),
            "efficiency": r.get(raw, "efficiency", path, "float", 1.0),
            "pump_amplitude": r.get(raw, "pump_amplitude", path, "float", 1.0),
        }
        _check_with_placeholder(r, path, SpdcSource, _SPDC_KEYS, pump_center=p["pump_center_cm1"],
                                pump_width=p["pump_width_fs"], t1=p["t1_fs"], t2=p["t2_fs"],
                                center1=p["center1_cm1"], center2=p["center2_cm1"],
                                alpha=p["efficiency"], e0=p["pump_amplitude"])
        return SourceSpec("spdc", p), {"kind": "spdc", **p}
    if kind == "classical":
        pulses_raw = raw.get("pulses")
        if not isinstance(pulses_raw, list) or len(pulses_raw) not in (1, 4):
            raise r.error("source.pulses", "expected a list of 1 or 4 pulses")
        pulses = []
        for i, q in enumerate(pulses_raw):
            qp = f"source.pulses[{i}]"
            if not isinstance(q, dict):
                raise r.error(qp, "expected a mapping")
            d = {
                "center_cm1": r.get(q, "center_cm1", qp, "freq"),
                "width_fs": r.get(q, "width_fs", qp, "float"),
                "chirp_fs2": r.get(q, "chirp_fs2", qp, "float", 0.0),
                "amplitude": r.get(q, "amplitude", qp, "float", 1.0),
            }
            _check_with_placeholder(r, qp, Pulse, _PULSE_KEYS, center=d["center_cm1"], tau0=d["width_fs"],
                                    chirp=d["chirp_fs2"], e0=d["amplitude"])
            pulses.append(d)
        if len(pulses) == 1:
            pulses = [dict(pulses[0]) for _ in range(4)]
        tl = r.get(raw, "transform_limited", path, "bool", False)
        if tl and any(q["chirp_fs2"] != 0 for q in pulses):
            raise r.error("source.transform_limited", "transform-limited pulses cannot carry chirp_fs2")
        p = {"pulses": pulses, "transform_limited": tl}
        return SourceSpec("classical", p), {"kind": "classical", **p}
    raise r.error("source.kind", f"must be 'spdc' or 'classical', got {kind!r}")


def _parse_axis(raw: dict, key: str, r: _Reader) -> tuple[Axis, dict]:
    path = f"job.{key}"
    a = r.section(raw, key, "job")
    lo = r.get(a, "min", path, "float")
    hi = r.get(a, "max", path, "float")
    count = r.get(a, "count", path, "int")
    try:
        axis = Axis(lo, hi, count)
    except ValidationError as exc:
        raise r.error(f"{path}.{exc.field}", exc.message) from None
    return axis, {"min": lo, "max": hi, "count": count}


def _parse_job(raw: dict, r: _Reader):
    o2, c2 = _parse_axis(raw, "omega2_cm1", r)
    o3, c3 = _parse_axis(raw, "omega3_cm1", r)
    omega1 = r.get(raw, "omega1_cm1", "job", "freq", None)
    filt = r.get(raw, "pathway_filter", "job", "str", "both")
    if filt not in PATHWAY_FILTERS:
        raise r.error("job.pathway_filter", f"must be one of {PATHWAY_FILTERS}")
    job = JobSettings(
        omega2=o2, omega3=o3, omega1=omega1,
        normalize=r.get(raw, "normalize", "job", "bool", True),
        pathway_filter=filt,
        abs_gap_frequencies=r.get(raw, "abs_gap_frequencies", "job", "bool", True),
        scale=r.get(raw, "scale", "job", "float", 1.0),
    )
    canonical = {"omega1_cm1": omega1, "omega2_cm1": c2, "omega3_cm1": c3, "normalize": job.normalize,
                 "pathway_filter": filt, "abs_gap_frequencies": job.abs_gap_frequencies, "scale": job.scale}
    return job, canonical


def _parse_jsa(raw: dict, r: _Reader):
    points = r.get(raw, "points", "jsa", "int", 128)
    half = r.get(raw, "half_width_cm1", "jsa", "float", None)
    # "all" keeps the full singular-value spectrum
    n_values = None if raw.get("n_values") == "all" else r.get(raw, "n_values", "jsa", "int", 20)
    try:
        grid = JsaGrid(points, half, n_values)
    except ValidationError as exc:
        key = {"jsa.points": "points", "jsa.half_width": "half_width_cm1"}.get(exc.field, exc.field)
        raise r.error(f"jsa.{key}", exc.message) from None
    return grid, {"points": points, "half_width_cm1": half, "n_values": "all" if n_values is None else n_values}


def _parse_output(raw: dict, r: _Reader):
    comps = raw.get("components", ["real", "imag", "magnitude"])
    if not isinstance(comps, list) or not set(comps) <= {"real", "imag", "magnitude"} or not comps:
        raise r.error("output.components", "expected a non-empty subset of [real, imag, magnitude]")
    out = OutputSettings(
        directory=r.get(raw, "directory", "output", "str", "out"),
        components=tuple(comps),
        render=r.get(raw, "render", "output", "bool", False),
        palette=r.get(raw, "palette", "output", "str", "viridis"),
    )
    return out, {"directory": out.directory, "components": list(out.components), "render": out.render,
                 "palette": out.palette}


def parse_config(data: dict, lines: dict[str, int] | None = None, base: Path | None = None,
                 overtone_variant: str | None = None) -> RunConfig:
    r = _Reader(lines or {})
    if not isinstance(data, dict):
        raise ConfigError("", "configuration must be a mapping")
    agg, c_agg = _parse_aggregate(r.section(data, "aggregate", ""), r, base, overtone_variant)
    bath, deph, c_bath = _parse_bath(r.section(data, "bath", ""), r)
    source, c_src = _parse_source(r.section(data, "source", ""), r)
    job, c_job = _parse_job(r.section(data, "job", ""), r)
    jsa, c_jsa = _parse_jsa(r.section(data, "jsa", "", required=False), r)
    out, c_out = _parse_output(r.section(data, "output", "", required=False), r)
    canonical = {"aggregate": c_agg, "bath": c_bath, "source": c_src, "job": c_job, "jsa": c_jsa,
                 "output": c_out}
    return RunConfig(agg, bath, deph, source, job, jsa, out, canonical)


def load_config(path, overtone_variant: str | None = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    text = path.read_text()
    try:
        data = yaml.safe_load(text)
        lines = _line_map(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError("", f"parse error: {exc}", mark.line + 1 if mark else None) from exc
    cfg = parse_config(data, lines, path.parent, overtone_variant)
    cfg.path = path
    return cfg


def dump_config(cfg: RunConfig) -> str:
    """Canonical YAML: aggregate inlined, defaults explicit."""
    return yaml.safe_dump(copy.deepcopy(cfg.canonical), sort_keys=True, default_flow_style=None, width=120)


def bundled_config(name: str) -> Path:
    """Path to a shipped configuration, e.g. ``"dimer"`` or ``"lhcii_template.cfg"``."""
    if not name.endswith(".cfg"):
        name += ".cfg"
    return Path(str(resources.files("dqc_sim") / "data" / name))
