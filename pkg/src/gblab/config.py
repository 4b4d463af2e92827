"""JSON run configuration shared by the CLI subcommands."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .coherent import DEFAULT_GUARD_FRACTION, CoherentSpec, PhysicalStateSpec
from .fock import DEFAULT_DIMENSION_BOUND, FockError, as_momentum, build_basis, photon_modes
from .field import ModeSet, SpacetimePoint, grid_points

DEFAULT_TOLERANCES = {
    "exact": 1e-12,
    "series": 1e-10,
    "coherent": 1e-8,
    "fd": 1e-6,
    "fd_reduction": 3.5,
    "diagnostic": 1e-2,
}


class ConfigError(ValueError):
    pass


def parse_complex(value: Any, where: str) -> complex:
    """Accept 0.5, [re, im], {"re": .., "im": ..} or "0.5+0.3j"."""
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, (int, float)):
            out = complex(value)
        elif isinstance(value, (list, tuple)) and len(value) == 2:
            out = complex(float(value[0]), float(value[1]))
        elif isinstance(value, dict):
            out = complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        elif isinstance(value, str):
            out = complex(value.replace(" ", "").replace("i", "j"))
        else:
            raise TypeError
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: cannot read {value!r} as a complex number") from None
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise ConfigError(f"{where}: alpha must be finite")
    return out


@dataclass
class GridSpec:
    lo: float = 0.0
    hi: float = 2 * math.pi
    points: int = 5

    def build(self) -> list[SpacetimePoint]:
        return grid_points(self.lo, self.hi, self.points)


@dataclass
class RunConfig:
    momenta: list[tuple[float, float, float]]
    n_max: int = 4
    weights: list[float] = field(default_factory=list)
    alpha: list[complex] = field(default_factory=list)
    transverse: list[tuple[int, int]] = field(default_factory=list)
    polarizations: list[int] = field(default_factory=lambda: [0, 1, 2, 3])
    margin: int = 2
    grid: GridSpec = field(default_factory=GridSpec)
    fd_step: float = 1e-2
    spatial_ratio: float = 2.0
    gradient_step: float = 1e-4
    tolerances: dict[str, float] = field(default_factory=dict)
    dimension_bound: int = DEFAULT_DIMENSION_BOUND
    guard_fraction: float = DEFAULT_GUARD_FRACTION
    seed: int = 0
    sweep: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.momenta:
            raise ConfigError("momenta: at least one momentum is required")
        try:
            self.momenta = [as_momentum(k) for k in self.momenta]
        except FockError as exc:
            raise ConfigError(f"momenta: {exc}") from None
        if any(not any(k) for k in self.momenta):
            raise ConfigError("momenta: zero momentum is not allowed")
        if len(set(self.momenta)) != len(self.momenta):
            raise ConfigError("momenta: duplicates")
        n = len(self.momenta)
        if not self.weights:
            self.weights = [1.0] * n
        if not self.alpha:
            self.alpha = [0j] * n
        if not self.transverse:
            self.transverse = [(0, 0)] * n
        for key in ("weights", "alpha", "transverse"):
            if len(getattr(self, key)) != n:
                raise ConfigError(f"{key}: length {len(getattr(self, key))} does not match {n} momenta")
        if any(w <= 0 for w in self.weights):
            raise ConfigError("weights: must be positive")
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise ConfigError(f"n_max: must be a positive integer, got {self.n_max!r}")
        if not 0 <= self.margin <= self.n_max:
            raise ConfigError(f"margin: must lie in 0..n_max, got {self.margin}")
        if sorted(set(self.polarizations)) != sorted(self.polarizations) or not set(self.polarizations) <= {0, 1, 2, 3}:
            raise ConfigError(f"polarizations: bad list {self.polarizations}")
        if not {0, 3} <= set(self.polarizations):
            raise ConfigError("polarizations: the scalar (0) and longitudinal (3) modes are required")
        for i, (n1, n2) in enumerate(self.transverse):
            if min(n1, n2) < 0 or max(n1, n2) > self.n_max:
                raise ConfigError(f"transverse[{i}]: occupations must lie in 0..n_max")
        if any(not (v > 0) for v in self.tolerances.values()):
            raise ConfigError("tolerances: values must be positive")
        if self.fd_step <= 0 or self.spatial_ratio <= 0 or self.gradient_step <= 0:
            raise ConfigError("finite-difference steps must be positive")

    def coherent_spec(self) -> CoherentSpec:
        return CoherentSpec(tuple(self.momenta), tuple(self.alpha), self.guard_fraction)

    def physical_spec(self) -> PhysicalStateSpec:
        return PhysicalStateSpec(self.coherent_spec(), tuple(self.transverse))

    def full_basis(self, n_max: int | None = None):
        return build_basis(photon_modes(self.momenta, self.polarizations), n_max or self.n_max, self.dimension_bound)

    def pair_basis(self, n_max: int | None = None):
        return build_basis(photon_modes(self.momenta, (0, 3)), n_max or self.n_max, self.dimension_bound)

    def modeset(self) -> ModeSet:
        return ModeSet(tuple(self.momenta), tuple(self.weights))

    def tolerance(self, name: str, kind: str) -> float:
        if name in self.tolerances:
            return self.tolerances[name]
        return self.tolerances.get(kind, DEFAULT_TOLERANCES[kind])

    def to_json(self) -> dict:
        out = asdict(self)
        out["momenta"] = [list(k) for k in self.momenta]
        out["alpha"] = [[a.real, a.imag] for a in self.alpha]
        out["transverse"] = [list(p) for p in self.transverse]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        if not isinstance(data, dict):
            raise ConfigError("top level must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown keys: {sorted(extra)}")
        if "momenta" not in data:
            raise ConfigError("momenta: required")
        kw = dict(data)
        momenta, weights = [], []
        for i, entry in enumerate(kw.pop("momenta")):
            if isinstance(entry, dict):
                if "k" not in entry:
                    raise ConfigError(f"momenta[{i}]: object needs a 'k' field")
                momenta.append(entry["k"])
                weights.append(float(entry.get("weight", 1.0)))
            else:
                momenta.append(entry)
                weights.append(1.0)
        kw["momenta"] = momenta
        kw.setdefault("weights", weights)
        kw["alpha"] = [parse_complex(a, f"alpha[{i}]") for i, a in enumerate(kw.get("alpha", []))]
        kw["transverse"] = [tuple(int(n) for n in p) for p in kw.get("transverse", [])]
        if "grid" in kw:
            g = kw["grid"]
            if not isinstance(g, dict) or set(g) - {"lo", "hi", "points"}:
                raise ConfigError("grid: expected an object with lo, hi, points")
            kw["grid"] = GridSpec(**g)
        tol = kw.get("tolerances", {})
        if not isinstance(tol, dict) or not all(isinstance(v, (int, float)) for v in tol.values()):
            raise ConfigError("tolerances: expected an object of numbers")
        try:
            return cls(**kw)
        except (TypeError, FockError) as exc:
            raise ConfigError(str(exc)) from None


def _json_context(text: str, exc: json.JSONDecodeError) -> str:
    lines = text.splitlines()
    line = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
    return f"line {exc.lineno}, column {exc.colno}: {exc.msg}\n    {line}\n    {' ' * (exc.colno - 1)}^"


def load_config(path: str | Path) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at {_json_context(text, exc)}") from None
    return RunConfig.from_dict(data)
