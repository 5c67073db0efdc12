"""Key-value config files and CSV / JSON result records.

Config files hold one ``key = value`` pair per line; ``#`` starts a comment.
Keys carry their unit in the name (``P_C_W`` or ``P_C_dBm``, ``m_kbps`` ...).
Data files written by :func:`table_text` embed the full resolved config as
``# config: key = value`` lines, and :func:`read_config` accepts such a data
file directly, so any output can be regenerated from itself.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Optional

from .model import (GINIBRE, PPP, SEPARATED, Architecture, PhysicalParams, SpatialModel,
                    ValidationError, dbm_to_watts)

CSV_VERSION = "1"
OUTPUT_DIR_ENV = "AMBIENTRF_OUTPUT_DIR"

# key -> (target field, converter)
_UNIT_KEYS = {
    "P_S_W": ("P_S", float), "P_S_dBm": ("P_S", lambda v: dbm_to_watts(float(v))),
    "G_S": ("G_S", float), "G_H": ("G_H", float),
    "lambda_m": ("wavelength", float), "beta": ("beta", float),
    "P_C_W": ("P_C", float), "P_C_dBm": ("P_C", lambda v: dbm_to_watts(float(v))),
    "sigma2_W": ("sigma2", float), "sigma2_dBm": ("sigma2", lambda v: dbm_to_watts(float(v))),
    "W_Hz": ("W", float), "epsilon_m": ("epsilon", float), "d_m": ("sink_distance", float),
    "h0": ("h0", float),
    "model": ("model", str), "rho": ("rho", float), "R_m": ("R", float), "j": ("j", int),
    "arch": ("arch", str), "tau": ("tau", float), "xi": ("xi", int),
    "m_bps": ("m", float), "m_kbps": ("m", lambda v: 1000.0 * float(v)),
    "seed": ("seed", int), "n": ("n", int), "sampler": ("sampler", str),
}
CONFIG_KEYS = tuple(_UNIT_KEYS)


@dataclass
class RunConfig:
    """Fully resolved inputs of one command."""

    params: PhysicalParams = field(default_factory=PhysicalParams)
    model: SpatialModel = field(default_factory=SpatialModel)
    arch: Architecture = field(default_factory=Architecture)
    m: Optional[float] = None
    seed: int = 0
    n: Optional[int] = None
    sampler: str = "radial"

    def to_pairs(self) -> list[tuple[str, str]]:
        p = self.params
        pairs = [("P_S_W", p.P_S), ("G_S", p.G_S), ("G_H", p.G_H), ("lambda_m", p.wavelength),
                 ("beta", p.beta), ("P_C_W", p.P_C), ("sigma2_W", p.sigma2), ("W_Hz", p.W),
                 ("epsilon_m", p.epsilon), ("d_m", p.sink_distance)]
        if p.h0 is not None:
            pairs.append(("h0", p.h0))
        pairs += [("model", self.model.kind), ("rho", self.model.rho), ("R_m", self.model.R),
                  ("j", self.model.j), ("arch", self.arch.kind), ("xi", self.arch.xi)]
        if self.arch.tau is not None:
            pairs.append(("tau", self.arch.tau))
        if self.m is not None:
            pairs.append(("m_bps", self.m))
        pairs.append(("seed", self.seed))
        if self.n is not None:
            pairs.append(("n", self.n))
        pairs.append(("sampler", self.sampler))
        return [(k, v if isinstance(v, str) else repr(v)) for k, v in pairs]

    def to_dict(self) -> dict:
        return dict(self.to_pairs())


def parse_pairs(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``# config:`` lines of a data file are read too.

    A JSON data file is accepted as well, through its ``config`` object.
    """
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON config: {exc}") from exc
        if not isinstance(doc.get("config"), dict):
            raise ValidationError("JSON config file needs a 'config' object")
        return {k: str(v) for k, v in doc["config"].items()}
    out = {}
    lines = text.splitlines()
    if any(ln.startswith("# config:") for ln in lines):
        # data file: only the embedded config counts
        lines = [ln[len("# config:"):] for ln in lines if ln.startswith("# config:")]
    for raw in lines:
        line = raw.strip()
        if line.startswith("#") or not line:
            continue
        if "=" not in line:
            raise ValidationError(f"malformed config line {raw!r}; expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip()] = value.split("#", 1)[0].strip()
    return out


def read_config(path: str) -> dict[str, str]:
    with open(path) as fh:
        return parse_pairs(fh.read())


def resolve(pairs: dict[str, Any], base: Optional[RunConfig] = None) -> RunConfig:
    """Apply unit-annotated ``pairs`` on top of ``base``; unknown keys are rejected."""
    unknown = sorted(set(pairs) - set(_UNIT_KEYS))
    if unknown:
        raise ValidationError(f"unknown config key(s) {', '.join(unknown)}; valid keys: {', '.join(CONFIG_KEYS)}")
    base = base or RunConfig()
    phys = {k: getattr(base.params, k) for k in PhysicalParams.__dataclass_fields__}
    spatial = {"model": base.model.kind, "rho": base.model.rho, "R": base.model.R, "j": base.model.j}
    archd = {"arch": base.arch.kind, "tau": base.arch.tau, "xi": base.arch.xi}
    extra = {"m": base.m, "seed": base.seed, "n": base.n, "sampler": base.sampler}
    for key, raw in pairs.items():
        target, conv = _UNIT_KEYS[key]
        try:
            value = conv(raw)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad value for {key}: {raw!r}") from exc
        for bucket in (phys, spatial, archd, extra):
            if target in bucket:
                bucket[target] = value
                break
    if archd["arch"] == SEPARATED:
        archd["tau"] = None
    arch = Architecture(archd["arch"], archd["tau"], archd["xi"])
    kind = spatial.pop("model")
    if kind not in (GINIBRE, PPP):
        raise ValidationError(f"model must be 'ginibre' or 'ppp', got {kind!r}")
    return RunConfig(PhysicalParams(**phys), SpatialModel(kind, **spatial), arch, **extra)


# --- tabular output -------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def header_text(config: RunConfig, command: str) -> str:
    lines = [f"# ambientrf-csv-version: {CSV_VERSION}", f"# command: {command}"]
    lines += [f"# config: {k} = {v}" for k, v in config.to_pairs()]
    return "\n".join(lines) + "\n"


def table_text(rows: list[dict], config: RunConfig, command: str, fmt: str = "csv") -> str:
    """Serialise result rows with the embedded command and config."""
    if fmt == "json":
        doc = {"version": CSV_VERSION, "command": command, "config": config.to_dict(), "rows": rows}
        return json.dumps(doc, indent=2, sort_keys=False, default=_json_default) + "\n"
    if fmt != "csv":
        raise ValidationError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write(header_text(config, command))
    columns: list[str] = []
    for row in rows:
        for k in row:
            if k not in columns:
                columns.append(k)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def read_table(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Inverse of the CSV branch of :func:`table_text`: ``(meta, rows)``."""
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# ") and ":" in line and not line.startswith("# config:"):
            k, _, v = line[2:].partition(":")
            meta[k.strip()] = v.strip()
        elif not line.startswith("#"):
            body.append(line)
    return meta, list(csv.DictReader(body))


def output_path(name: str, explicit: Optional[str] = None) -> str:
    if explicit:
        return explicit
    return os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), name)


def write_text(path: str, text: str) -> str:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def finite_or_none(x: float) -> Optional[float]:
    return x if x is not None and math.isfinite(x) else None
