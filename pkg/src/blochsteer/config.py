"""Run configuration: parsing, defaulting and validation of config documents.

A config document is a JSON or YAML mapping.  The dissipation model is given
in one of three forms at the top level:

* ``lindblad_ops``: list of 2x2 complex matrices, each entry as [re, im];
* ``A`` and ``b``: attenuation matrix (3x3, PSD) and drift vector;
* ``a`` and ``b``: planar shorthand, B = diag(a1, a2), b = (b1, b2).

All remaining fields have defaults; the default seed can be set through the
``BLOCHSTEER_SEED`` environment variable and overridden per run.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .bloch import DissipationModel, principal_axes
from .errors import ValidationError

SEED_ENV_VAR = "BLOCHSTEER_SEED"


class ConfigError(ValidationError):
    """A config document failed validation; the message names the field."""


@dataclass(frozen=True)
class RunConfig:
    model: DissipationModel
    dimension: int
    objective: str = "time"
    order: int | None = None
    epsilon: float = 1e-3
    delta: float = 1e-3
    grid_panels: int = 1000
    multistart: int | None = None  # defaults to 25 (planar) / 50 (spatial)
    seed: int = 0
    start_radius: float = 2.0
    zeroed_control: int = 1
    nu_tolerance: float = 1e-4
    output_dir: str = "."
    lindblad_ops: list | None = None  # retained for the validation suite

    def resolved_multistart(self) -> int:
        if self.multistart is not None:
            return self.multistart
        return 25 if self.dimension == 2 else 50

    def to_document(self) -> dict:
        """The fully resolved config, embedded in every emitted document."""
        doc = {
            "dimension": self.dimension,
            "objective": self.objective,
            "order": self.order,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "grid_panels": self.grid_panels,
            "multistart": self.resolved_multistart(),
            "seed": self.seed,
            "start_radius": self.start_radius,
            "zeroed_control": self.zeroed_control,
            "nu_tolerance": self.nu_tolerance,
            "output_dir": self.output_dir,
            "model": {
                "b": self.model.b.tolist(),
                "B": self.model.B.tolist(),
            },
        }
        if self.model.A is not None:
            doc["model"]["A"] = self.model.A.tolist()
        return doc


_KNOWN_FIELDS = {
    "lindblad_ops", "A", "a", "b", "dimension", "objective", "order",
    "epsilon", "delta", "grid_panels", "multistart", "seed", "start_radius",
    "zeroed_control", "nu_tolerance", "output_dir",
}
_REQUIRED_HINT = ("a model is required: give 'lindblad_ops', or 'A' with 'b', "
                  "or the planar shorthand 'a' with 'b'")


def _complex_matrix(entries, field_name):
    try:
        arr = np.asarray(entries, dtype=float)
        if arr.shape != (2, 2, 2):
            raise ValueError
    except (TypeError, ValueError):
        raise ConfigError(
            f"{field_name}: each operator must be a 2x2 matrix of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _parse_model(doc):
    forms = [k for k in ("lindblad_ops", "A", "a") if k in doc]
    if not forms:
        raise ConfigError(_REQUIRED_HINT)
    if len(forms) > 1:
        raise ConfigError(f"model given in multiple forms: {', '.join(forms)}")
    form = forms[0]
    ops = None
    if form == "lindblad_ops":
        raw = doc["lindblad_ops"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("lindblad_ops: expected a non-empty list of operators")
        ops = [_complex_matrix(m, "lindblad_ops") for m in raw]
        try:
            model = DissipationModel.from_lindblad(ops)
        except ValidationError as exc:
            raise ConfigError(f"lindblad_ops: {exc}") from exc
        return model, ops
    if form == "A":
        if "b" not in doc:
            raise ConfigError("A: the drift vector 'b' is also required")
        try:
            A = np.asarray(doc["A"], dtype=float)
            b = np.asarray(doc["b"], dtype=float)
            if A.shape != (3, 3) or b.shape != (3,):
                raise ValueError
        except (TypeError, ValueError):
            raise ConfigError("A/b: expected a 3x3 real matrix and a 3-vector")
        try:
            return DissipationModel.from_attenuation(A, b), None
        except ValidationError as exc:
            raise ConfigError(f"A: {exc}") from exc
    # planar shorthand
    if "b" not in doc:
        raise ConfigError("a: the planar drift 'b' = [b1, b2] is also required")
    try:
        return DissipationModel.planar(doc["a"], doc["b"]), None
    except ValidationError as exc:
        raise ConfigError(f"a/b: {exc}") from exc


def _check_type(doc, key, kinds, convert):
    value = doc[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ConfigError(f"{key}: expected {kinds[0].__name__}, got {value!r}")
    return convert(value)


def parse_config(doc: dict) -> RunConfig:
    """Validate and fully default a config mapping."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    if not doc:
        raise ConfigError(_REQUIRED_HINT)
    unknown = set(doc) - _KNOWN_FIELDS
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(unknown))}")

    model, ops = _parse_model(doc)
    dimension = model.dimension
    if "dimension" in doc:
        dimension = _check_type(doc, "dimension", (int,), int)
        if dimension not in (2, 3):
            raise ConfigError(f"dimension: must be 2 or 3, got {dimension}")
        if dimension != model.dimension:
            raise ConfigError(
                f"dimension: {dimension} contradicts the model form "
                f"({model.dimension}-dimensional)")

    kwargs = {"model": model, "dimension": dimension, "lindblad_ops": ops}
    numeric = {
        "objective": (str, str), "order": ((int,), int),
        "epsilon": ((int, float), float), "delta": ((int, float), float),
        "grid_panels": ((int,), int), "multistart": ((int,), int),
        "seed": ((int,), int), "start_radius": ((int, float), float),
        "zeroed_control": ((int,), int), "nu_tolerance": ((int, float), float),
        "output_dir": (str, str),
    }
    for key, (kinds, convert) in numeric.items():
        if key in doc:
            if key == "objective":
                value = doc[key]
                if value not in ("time", "energy"):
                    raise ConfigError(f"objective: must be 'time' or 'energy', got {value!r}")
                kwargs[key] = value
            elif key == "output_dir":
                kwargs[key] = str(doc[key])
            else:
                kinds_t = kinds if isinstance(kinds, tuple) else (kinds,)
                kwargs[key] = _check_type(doc, key, kinds_t, convert)

    if "seed" not in doc:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                kwargs["seed"] = int(env)
            except ValueError:
                raise ConfigError(f"{SEED_ENV_VAR}: not an integer: {env!r}")

    config = RunConfig(**kwargs)
    for name, low in (("epsilon", 0.0), ("delta", 0.0), ("start_radius", 0.0),
                      ("nu_tolerance", 0.0)):
        if getattr(config, name) <= low:
            raise ConfigError(f"{name}: must be positive")
    if config.grid_panels < 2:
        raise ConfigError("grid_panels: at least 2 panels are required")
    if config.multistart is not None and config.multistart < 1:
        raise ConfigError("multistart: must be at least 1")
    if config.order is not None and config.order < 1:
        raise ConfigError("order: must be at least 1")
    if config.zeroed_control not in (1, 2, 3):
        raise ConfigError("zeroed_control: must be 1, 2 or 3")
    return config


def load_config(path) -> RunConfig:
    """Read a JSON or YAML config file."""
    import yaml

    text = Path(path).read_text()
    try:
        if str(path).endswith(".json"):
            doc = json.loads(text)
        else:
            doc = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_config(doc)


def apply_overrides(config: RunConfig, **overrides) -> RunConfig:
    """Command-line flags take precedence over document fields."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **changes) if changes else config


def solver_model(config: RunConfig):
    """The model rotated to principal axes when the solver needs it.

    Returns (model, rotation); the rotation is None when B was already
    diagonal."""
    try:
        config.model.diagonal_rates()
        return config.model, None
    except ValidationError:
        rotated, R = principal_axes(config.model)
        return rotated, R
