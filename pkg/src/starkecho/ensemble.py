"""Seeded sampling of ion ensembles for the three material modes.

An ensemble member carries a detuning from the laser reference, the
orientation of its symmetry axis (which holds both the permanent-dipole
difference and the transition dipole), a Stark coefficient, a local
field-scale factor and an optical coupling weight.

Modes
-----
``single_crystal``
    All axes aligned with the applied field direction; coupling 1.
``ceramic``
    Axes uniform on the sphere; coupling is the projection of the axis
    on the light polarization (transparent medium, fixed polarization).
``powder``
    Axes uniform on the sphere; coupling 1 because strong scattering
    randomizes the light polarization, averaging the dipole projections
    to an axis-independent constant.  Optional Lorentzian spread of the
    per-ion field scale models electric-field inhomogeneity over the
    scattering volume.

Units: time µs, frequency MHz (ordinary, factors of 2π live inside the
propagators), electric field V/cm, Stark coefficient MHz/(V/cm).

Sampling is single-pass and deterministic for a given seed: the draw
order is detunings, axis polar components, axis azimuths, Stark
coefficients, field scales.  Ensemble arrays are frozen after creation
and safe to share across parallel workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import ValidationError

MODES = ("single_crystal", "ceramic", "powder")

#: Default Stark coefficient, MHz/(V/cm).
DEFAULT_K = 0.0495

#: Default optical coherence lifetime, µs.
DEFAULT_T2 = 5.7

#: Field-scale factors below this are redrawn (keeps the Lorentzian
#: tails from producing non-physical reversed or zero local fields).
FIELD_SCALE_FLOOR = 0.05

_UNIT_TOL = 1e-9


def _as_unit_vector(value, name: str) -> np.ndarray:
    vec = np.asarray(value, dtype=float).reshape(-1)
    if vec.shape != (3,):
        raise ValidationError(f"{name} must be a 3-vector, got shape {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if not math.isfinite(norm) or abs(norm - 1.0) > _UNIT_TOL:
        raise ValidationError(f"{name} must be a unit vector (|v| = {norm!r})")
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True, eq=False)
class IonParams:
    """Parameters of a single ensemble member."""

    detuning: float
    axis: np.ndarray
    stark_k: float
    field_scale: float
    coupling: float

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float).reshape(3)
        if abs(float(np.linalg.norm(axis)) - 1.0) > 1e-12:
            raise ValidationError("ion axis must be unit length within 1e-12")
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)
        if not self.stark_k > 0:
            raise ValidationError("stark_k must be positive")
        if not self.field_scale > 0:
            raise ValidationError("field_scale must be positive")
        if not 0.0 <= self.coupling <= 1.0:
            raise ValidationError("coupling must lie in [0, 1]")


@dataclass(frozen=True)
class EnsembleConfig:
    """Sampling configuration; see module docstring for the modes."""

    n_ions: int
    seed: int
    mode: str
    detuning_window: float = 10.0
    k_mean: float = DEFAULT_K
    k_spread: float = 0.0
    field_hwhm: float = 0.0
    t2: float = DEFAULT_T2
    field_direction: np.ndarray = field(default=(0.0, 0.0, 1.0))
    light_polarization: np.ndarray = field(default=(1.0, 0.0, 0.0))

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.n_ions) < 1:
            raise ValidationError("n_ions must be >= 1")
        object.__setattr__(self, "n_ions", int(self.n_ions))
        object.__setattr__(self, "seed", int(self.seed))
        if not self.t2 > 0:
            raise ValidationError("t2 must be positive")
        if not self.detuning_window > 0:
            raise ValidationError("detuning_window must be positive")
        if not self.k_mean > 0:
            raise ValidationError("k_mean must be positive")
        if self.k_spread < 0:
            raise ValidationError("k_spread must be >= 0")
        if self.field_hwhm < 0:
            raise ValidationError("field_hwhm must be >= 0")
        object.__setattr__(
            self, "field_direction", _as_unit_vector(self.field_direction, "field_direction")
        )
        object.__setattr__(
            self,
            "light_polarization",
            _as_unit_vector(self.light_polarization, "light_polarization"),
        )

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "EnsembleConfig":
        """Build a config from a plain mapping (config file / CLI flags)."""
        known = {
            "n_ions", "seed", "mode", "detuning_window", "k_mean", "k_spread",
            "field_hwhm", "t2", "field_direction", "light_polarization",
        }
        unknown = set(mapping) - known
        if unknown:
            raise ValidationError(f"unknown ensemble keys: {sorted(unknown)}")
        kwargs = dict(mapping)
        for key in ("field_direction", "light_polarization"):
            if key in kwargs and isinstance(kwargs[key], str):
                kwargs[key] = tuple(float(p) for p in str(kwargs[key]).split(","))
        if "t2" in kwargs and str(kwargs["t2"]).strip().lower() in ("inf", "infinity"):
            kwargs["t2"] = math.inf
        return cls(**kwargs)  # type: ignore[arg-type]

    def to_mapping(self) -> dict:
        return {
            "n_ions": self.n_ions,
            "seed": self.seed,
            "mode": self.mode,
            "detuning_window": self.detuning_window,
            "k_mean": self.k_mean,
            "k_spread": self.k_spread,
            "field_hwhm": self.field_hwhm,
            "t2": self.t2,
            "field_direction": [float(x) for x in self.field_direction],
            "light_polarization": [float(x) for x in self.light_polarization],
        }


class Ensemble(Sequence[IonParams]):
    """Immutable array-backed collection of ions.

    Behaves as a sequence of :class:`IonParams` while storing the data
    as flat arrays for vectorized propagation.
    """

    def __init__(self, config: EnsembleConfig, detuning, axis, stark_k, field_scale, coupling):
        self.config = config
        self.detuning = np.ascontiguousarray(detuning, dtype=float)
        self.axis = np.ascontiguousarray(axis, dtype=float)
        self.stark_k = np.ascontiguousarray(stark_k, dtype=float)
        self.field_scale = np.ascontiguousarray(field_scale, dtype=float)
        self.coupling = np.ascontiguousarray(coupling, dtype=float)
        n = len(self.detuning)
        if self.axis.shape != (n, 3):
            raise ValidationError("axis array must have shape (n_ions, 3)")
        for arr in (self.detuning, self.axis, self.stark_k, self.field_scale, self.coupling):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return len(self.detuning)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        return IonParams(
            detuning=float(self.detuning[index]),
            axis=self.axis[index],
            stark_k=float(self.stark_k[index]),
            field_scale=float(self.field_scale[index]),
            coupling=float(self.coupling[index]),
        )

    def __iter__(self) -> Iterator[IonParams]:
        for i in range(len(self)):
            yield self[i]

    @property
    def t2(self) -> float:
        return self.config.t2

    def stark_projections(self, field_direction=None) -> np.ndarray:
        """cos(theta) of every ion axis against the field direction."""
        direction = (
            self.config.field_direction
            if field_direction is None
            else _as_unit_vector(field_direction, "field_direction")
        )
        return self.axis @ direction


def _sample_unit_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.uniform(-1.0, 1.0, n)
    az = rng.uniform(0.0, 2.0 * math.pi, n)
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack((s * np.cos(az), s * np.sin(az), z))


def _resample_while(rng, draw, bad, max_rounds=128):
    values = draw(None)
    for _ in range(max_rounds):
        mask = bad(values)
        if not mask.any():
            return values
        values[mask] = draw(int(mask.sum()))
    raise ValidationError("rejection sampling did not converge")


def sample_ensemble(config: EnsembleConfig) -> Ensemble:
    """Draw a deterministic ensemble for the given config.

    The same seed and config give a bit-identical ensemble regardless of
    call site or thread count.
    """
    n = config.n_ions
    rng = np.random.default_rng(config.seed)

    detuning = rng.uniform(-config.detuning_window, config.detuning_window, n)

    if config.mode == "single_crystal":
        axis = np.tile(config.field_direction, (n, 1))
    else:
        axis = _sample_unit_sphere(rng, n)

    if config.k_spread > 0:
        def draw_k(count):
            m = n if count is None else count
            return config.k_mean * (1.0 + config.k_spread * rng.standard_normal(m))

        stark_k = _resample_while(rng, draw_k, lambda v: v <= 0)
    else:
        stark_k = np.full(n, config.k_mean)

    if config.mode == "powder" and config.field_hwhm > 0:
        def draw_scale(count):
            m = n if count is None else count
            return 1.0 + config.field_hwhm * rng.standard_cauchy(m)

        field_scale = _resample_while(rng, draw_scale, lambda v: v <= FIELD_SCALE_FLOOR)
    else:
        field_scale = np.ones(n)

    if config.mode == "ceramic":
        coupling = np.abs(axis @ config.light_polarization)
    else:
        coupling = np.ones(n)

    return Ensemble(config, detuning, axis, stark_k, field_scale, coupling)


def stark_projection(ion: IonParams, field_direction) -> float:
    """cos(theta) between the ion axis and a unit field direction."""
    direction = _as_unit_vector(field_direction, "field_direction")
    return float(ion.axis @ direction)
