"""Run configuration: TOML parsing, normalisation and object construction.

Complex matrices are written as nested lists whose entries are ``[re, im]``
pairs; plain numbers are accepted on input and normalised to pairs.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import tomli
import tomli_w

from .channels import Channel, depolarizing, identity_channel
from .discrimination import Protocol, optimal_two_state_protocol
from .errors import ConfigError, SeqDiscError
from .instruments import Instrument, luders_from_projectors
from .sampling import random_instrument
from .states import DensityOperator, Ensemble, qubit_from_bloch, spin_projector

PROTOCOL_KINDS = ("optimal", "explicit", "random")
RECEIVER_TYPES = ("luders", "kraus", "spin")
CHANNEL_TYPES = ("depolarizing", "kraus", "identity")


def _entry(x, where: str) -> list[float]:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return [float(x), 0.0]
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return [float(x[0]), float(x[1])]
    raise ConfigError(f"{where}: matrix entry {x!r} must be a number or a [re, im] pair")


def _matrix(raw, where: str) -> list:
    if not isinstance(raw, list) or not raw or not all(isinstance(row, list) for row in raw):
        raise ConfigError(f"{where}: expected a matrix (list of rows)")
    n = len(raw[0])
    if any(len(row) != n for row in raw):
        raise ConfigError(f"{where}: rows have different lengths")
    return [[_entry(x, f"{where}[{i}][{k}]") for k, x in enumerate(row)] for i, row in enumerate(raw)]


def to_array(m: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in m])


def from_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _float_list(raw, where: str, length: int | None = None) -> list[float]:
    if not isinstance(raw, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise ConfigError(f"{where}: expected a list of numbers")
    if length is not None and len(raw) != length:
        raise ConfigError(f"{where}: expected {length} numbers, got {len(raw)}")
    return [float(v) for v in raw]


def _table(raw, where: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a table")
    return raw


def _unknown(tbl: dict, allowed, where: str) -> None:
    extra = set(tbl) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {sorted(extra)}")


def _norm_ensemble(raw) -> dict:
    tbl = _table(raw, "ensemble")
    _unknown(tbl, ("priors", "bloch", "states"), "ensemble")
    if "priors" not in tbl:
        raise ConfigError("ensemble.priors: missing")
    out: dict[str, Any] = {"priors": _float_list(tbl["priors"], "ensemble.priors")}
    if ("bloch" in tbl) == ("states" in tbl):
        raise ConfigError("ensemble: give exactly one of 'bloch' or 'states'")
    if "bloch" in tbl:
        if not isinstance(tbl["bloch"], list):
            raise ConfigError("ensemble.bloch: expected a list of 3-vectors")
        out["bloch"] = [_float_list(v, f"ensemble.bloch[{i}]", 3) for i, v in enumerate(tbl["bloch"])]
        count = len(out["bloch"])
    else:
        if not isinstance(tbl["states"], list):
            raise ConfigError("ensemble.states: expected a list of matrices")
        out["states"] = [_matrix(m, f"ensemble.states[{i}]") for i, m in enumerate(tbl["states"])]
        count = len(out["states"])
    if count != len(out["priors"]):
        raise ConfigError(f"ensemble: {count} states but {len(out['priors'])} priors")
    return out


def _norm_receiver(raw, where: str) -> dict:
    tbl = _table(raw, where)
    kind = tbl.get("type")
    if kind not in RECEIVER_TYPES:
        raise ConfigError(f"{where}.type: expected one of {RECEIVER_TYPES}, got {kind!r}")
    if kind == "luders":
        _unknown(tbl, ("type", "projectors"), where)
        projs = tbl.get("projectors")
        if not isinstance(projs, list):
            raise ConfigError(f"{where}.projectors: expected a list of matrices")
        return {"type": kind, "projectors": [_matrix(p, f"{where}.projectors[{i}]") for i, p in enumerate(projs)]}
    if kind == "kraus":
        _unknown(tbl, ("type", "operators"), where)
        ops = tbl.get("operators")
        if not isinstance(ops, list):
            raise ConfigError(f"{where}.operators: expected one list of matrices per outcome")
        fams = []
        for w, fam in enumerate(ops):
            if not isinstance(fam, list):
                raise ConfigError(f"{where}.operators[{w}]: expected a list of matrices")
            fams.append([_matrix(k, f"{where}.operators[{w}][{l}]") for l, k in enumerate(fam)])
        return {"type": kind, "operators": fams}
    _unknown(tbl, ("type", "direction", "sign"), where)
    sign = tbl.get("sign", 1)
    if sign not in (1, -1):
        raise ConfigError(f"{where}.sign: must be 1 or -1")
    return {"type": kind, "direction": _float_list(tbl.get("direction"), f"{where}.direction", 3), "sign": int(sign)}


def _norm_protocol(raw) -> dict:
    tbl = _table(raw, "protocol")
    _unknown(tbl, ("kind", "variant", "phi", "receivers"), "protocol")
    kind = tbl.get("kind", "optimal")
    if kind not in PROTOCOL_KINDS:
        raise ConfigError(f"protocol.kind: expected one of {PROTOCOL_KINDS}, got {kind!r}")
    out: dict[str, Any] = {"kind": kind}
    if kind == "optimal":
        variant = tbl.get("variant", "projective")
        if variant not in ("projective", "rotated"):
            raise ConfigError(f"protocol.variant: expected 'projective' or 'rotated', got {variant!r}")
        out["variant"] = variant
        if variant == "rotated":
            if "phi" not in tbl:
                raise ConfigError("protocol.phi: rotated variant needs a unitary basis")
            out["phi"] = _matrix(tbl["phi"], "protocol.phi")
    elif kind == "explicit":
        recs = tbl.get("receivers")
        if not isinstance(recs, list) or not recs:
            raise ConfigError("protocol.receivers: explicit protocol needs a non-empty array of receivers")
        out["receivers"] = [_norm_receiver(r, f"protocol.receivers[{i}]") for i, r in enumerate(recs)]
    return out


def _norm_channel(raw, where: str) -> dict:
    tbl = _table(raw, where)
    kind = tbl.get("type")
    if kind not in CHANNEL_TYPES:
        raise ConfigError(f"{where}.type: expected one of {CHANNEL_TYPES}, got {kind!r}")
    if kind == "depolarizing":
        _unknown(tbl, ("type", "gamma"), where)
        g = tbl.get("gamma")
        if not isinstance(g, (int, float)) or isinstance(g, bool) or not 0 <= g <= 1:
            raise ConfigError(f"{where}.gamma: expected a number in [0, 1]")
        return {"type": kind, "gamma": float(g)}
    if kind == "identity":
        _unknown(tbl, ("type",), where)
        return {"type": kind}
    _unknown(tbl, ("type", "matrices"), where)
    mats = tbl.get("matrices")
    if not isinstance(mats, list) or not mats:
        raise ConfigError(f"{where}.matrices: expected a non-empty list of matrices")
    return {"type": kind, "matrices": [_matrix(m, f"{where}.matrices[{i}]") for i, m in enumerate(mats)]}


def _norm_sweep(raw) -> dict:
    tbl = _table(raw, "sweep")
    _unknown(tbl, ("gamma_min", "gamma_max", "steps", "grid"), "sweep")
    out = {
        "gamma_min": tbl.get("gamma_min", 0.0),
        "gamma_max": tbl.get("gamma_max", 1.0),
        "steps": tbl.get("steps", 201),
        "grid": tbl.get("grid", 2048),
    }
    for key in ("gamma_min", "gamma_max"):
        v = out[key]
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not 0 <= v <= 1:
            raise ConfigError(f"sweep.{key}: expected a number in [0, 1]")
        out[key] = float(v)
    if out["gamma_min"] > out["gamma_max"]:
        raise ConfigError("sweep: gamma_min exceeds gamma_max")
    for key, low in (("steps", 1), ("grid", 2)):
        if not isinstance(out[key], int) or isinstance(out[key], bool) or out[key] < low:
            raise ConfigError(f"sweep.{key}: expected an integer >= {low}")
    return out


def normalize(raw: dict) -> dict:
    """Validate a raw configuration mapping and fill defaults."""
    raw = _table(raw, "config")
    _unknown(raw, ("n_receivers", "ensemble", "protocol", "channels", "sweep"), "config")
    if "ensemble" not in raw:
        raise ConfigError("ensemble: missing")
    n = raw.get("n_receivers", 1)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("n_receivers: expected a positive integer")
    out: dict[str, Any] = {
        "n_receivers": n,
        "ensemble": _norm_ensemble(raw["ensemble"]),
        "protocol": _norm_protocol(raw.get("protocol", {})),
        "sweep": _norm_sweep(raw.get("sweep", {})),
    }
    if out["protocol"]["kind"] == "explicit" and len(out["protocol"]["receivers"]) != n:
        raise ConfigError(f"protocol.receivers: {len(out['protocol']['receivers'])} receivers but n_receivers = {n}")
    if "channels" in raw:
        chans = raw["channels"]
        if not isinstance(chans, list):
            raise ConfigError("channels: expected an array of tables")
        if len(chans) != n:
            raise ConfigError(f"channels: {len(chans)} channels but n_receivers = {n}")
        out["channels"] = [_norm_channel(c, f"channels[{i}]") for i, c in enumerate(chans)]
    return out


@dataclass
class RunConfig:
    data: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        return cls(normalize(copy.deepcopy(raw)))

    @classmethod
    def from_toml(cls, text: str) -> "RunConfig":
        try:
            raw = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"TOML syntax error: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_toml(Path(path).read_text())

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    def to_toml(self) -> str:
        return tomli_w.dumps(self.data)

    @property
    def n_receivers(self) -> int:
        return self.data["n_receivers"]

    @property
    def sweep(self) -> dict:
        return self.data["sweep"]

    def ensemble(self) -> Ensemble:
        ens = self.data["ensemble"]
        try:
            if "bloch" in ens:
                states = tuple(qubit_from_bloch(v) for v in ens["bloch"])
            else:
                states = tuple(DensityOperator(to_array(m)) for m in ens["states"])
            return Ensemble(states, tuple(ens["priors"]))
        except SeqDiscError as exc:
            raise ConfigError(f"ensemble: {exc}") from exc

    def channels(self) -> tuple[Channel, ...] | None:
        if "channels" not in self.data:
            return None
        d = self.ensemble().dim
        out = []
        for i, c in enumerate(self.data["channels"]):
            try:
                if c["type"] == "depolarizing":
                    out.append(depolarizing(c["gamma"], d))
                elif c["type"] == "identity":
                    out.append(identity_channel(d))
                else:
                    out.append(Channel(tuple(to_array(m) for m in c["matrices"])))
            except SeqDiscError as exc:
                raise ConfigError(f"channels[{i}]: {exc}") from exc
        return tuple(out)

    def protocol(self, rng: np.random.Generator | None = None) -> Protocol:
        e = self.ensemble()
        spec = self.data["protocol"]
        n = self.n_receivers
        chans = self.channels()
        try:
            if spec["kind"] == "optimal":
                phi = to_array(spec["phi"]) if spec["variant"] == "rotated" else None
                return optimal_two_state_protocol(e, n, spec["variant"], phi, chans)
            if spec["kind"] == "random":
                rng = rng if rng is not None else np.random.default_rng()
                return Protocol(tuple(random_instrument(e.dim, e.r, rng) for _ in range(n)), chans)
            receivers = tuple(_build_receiver(r, f"protocol.receivers[{i}]") for i, r in enumerate(spec["receivers"]))
            p = Protocol(receivers, chans)
            if p.r != e.r or p.dim != e.dim:
                raise ConfigError(
                    f"protocol.receivers: {p.r}-outcome receivers on dimension {p.dim} "
                    f"do not match {e.r} states of dimension {e.dim}"
                )
            return p
        except ConfigError:
            raise
        except SeqDiscError as exc:
            raise ConfigError(f"protocol: {exc}") from exc


def _build_receiver(spec: dict, where: str) -> Instrument:
    try:
        if spec["type"] == "luders":
            return luders_from_projectors([to_array(p) for p in spec["projectors"]])
        if spec["type"] == "kraus":
            return Instrument(tuple(tuple(to_array(k) for k in fam) for fam in spec["operators"]))
        n = spec["direction"]
        return luders_from_projectors([spin_projector(n, spec["sign"]), spin_projector(n, -spec["sign"])])
    except SeqDiscError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def receiver_spec(m: Instrument) -> dict:
    """Serialisable description of an instrument."""
    return {"type": "kraus", "operators": [[from_array(k) for k in m[w]] for w in m.outcomes]}
