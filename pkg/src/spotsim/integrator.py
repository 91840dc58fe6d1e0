"""Deterministic forward-Euler integration of any model variant.

A SimState owns the concentration arrays for one simulation.  `step`
advances it by one explicit Euler step (clamping negative overshoot to
zero, with a diagnostic counter), and `run` drives it to a target time
while invoking observers.  Everything downstream of `init` is a pure
function of (grid, init spec, variant, params, dt): reruns are
bit-identical regardless of worker count.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, DivergenceError
from .grid import Field, GridSpec
from .kinetics import GrayScottParams, TailParams, WasteParams
from .rng import (
    STREAM_INIT_A,
    STREAM_INIT_B,
    STREAM_INIT_C,
    STREAM_SIM,
    RngState,
    generator_at,
)

VARIANTS = ("gs", "waste", "tail")
VARIANT_SPECIES = {"gs": ("a", "b"), "waste": ("a", "b", "p"), "tail": ("a", "b", "c")}
VARIANT_PARAMS = {"gs": GrayScottParams, "waste": WasteParams, "tail": TailParams}

# The paper gives dt = 0.5 for the waste model only; the others default to
# 1.0 and are CFL-checked against the actual grid at construction.
DEFAULT_DT = {"gs": 1.0, "waste": 0.5, "tail": 1.0}

_INIT_STREAMS = {"a": STREAM_INIT_A, "b": STREAM_INIT_B, "c": STREAM_INIT_C}


def cfl_number(spec: GridSpec, max_diffusion: float, dt: float) -> float:
    """Explicit-diffusion stability number; must be < 1."""
    return dt * max_diffusion * (2.0 / spec.hx**2 + 2.0 / spec.hy**2)


@dataclass
class InitSpec:
    """Seeded initial condition.

    square_seed: background (a=1, b=0, c=0, p=0) with a square region of
    side 2*half_width centered at `center` set to `levels` = (a0, b0, c0),
    each multiplied by (1 + noise_amplitude * u), u ~ U(-1, 1) per cell,
    drawn from rng_seed.  The c level only applies to the tail variant.
    uniform_noise applies levels + noise to the whole domain, and
    from_snapshot restores fields from a snapshot file.
    """

    kind: str = "square_seed"
    center: tuple | None = None
    half_width: float | None = None
    levels: tuple = (0.5, 0.25, 0.0)
    noise_amplitude: float = 0.01
    rng_seed: int = 0
    snapshot_path: str | None = None

    def __post_init__(self):
        if self.kind not in ("square_seed", "uniform_noise", "from_snapshot"):
            raise ConfigError(f"unknown init kind {self.kind!r}")
        if not 0.0 <= self.noise_amplitude <= 0.1:
            raise ConfigError(
                f"noise_amplitude must be in [0, 0.1], got {self.noise_amplitude}"
            )


class SimState:
    """Full simulation state: time, fields, parameters, RNG position."""

    def __init__(self, spec, variant, params, dt, arrays, rng, step_count=0):
        if variant not in VARIANTS:
            raise ConfigError(f"unknown variant {variant!r}")
        if not isinstance(params, VARIANT_PARAMS[variant]):
            raise ConfigError(
                f"variant {variant!r} needs {VARIANT_PARAMS[variant].__name__}, "
                f"got {type(params).__name__}"
            )
        if dt <= 0:
            raise ConfigError(f"dt must be > 0, got {dt}")
        cfl = cfl_number(spec, params.max_diffusion, dt)
        if not cfl < 1.0:
            raise ConfigError(
                f"CFL violation: dt * D * (2/hx^2 + 2/hy^2) = {cfl:.3f} >= 1; "
                f"reduce dt or coarsen the grid"
            )
        self.spec = spec
        self.variant = variant
        self.params = params
        self.dt = dt
        self.step_count = step_count
        self.rng = rng
        self.species = VARIANT_SPECIES[variant]
        if tuple(arrays) != self.species:
            raise ConfigError(
                f"variant {variant!r} needs species {self.species}, got {tuple(arrays)}"
            )
        self.arrays = {
            name: np.ascontiguousarray(arr, dtype=np.float64)
            for name, arr in arrays.items()
        }
        for name, arr in self.arrays.items():
            if arr.shape != spec.shape:
                raise ConfigError(f"species {name!r} has shape {arr.shape}")
        self._next = {name: np.empty(spec.shape) for name in self.species}
        self.clamped_last_step = 0
        self.clamped_total = 0

    @property
    def t(self) -> float:
        # Derived, never accumulated: avoids summation drift.
        return self.step_count * self.dt

    def field(self, name: str) -> Field:
        return Field(self.spec, self.arrays[name])

    def fields(self):
        return {name: self.field(name) for name in self.species}

    @property
    def clamp_fraction(self) -> float:
        """Mean clamped-cell fraction per step since construction."""
        if self.step_count == 0:
            return 0.0
        return self.clamped_total / (self.step_count * self.spec.n_cells)

    def copy(self) -> "SimState":
        s = SimState(
            self.spec,
            self.variant,
            self.params,
            self.dt,
            {k: v.copy() for k, v in self.arrays.items()},
            self.rng.copy(),
            self.step_count,
        )
        s.clamped_last_step = self.clamped_last_step
        s.clamped_total = self.clamped_total
        return s


def init(spec: GridSpec, init_spec: InitSpec, variant: str, params, dt=None) -> SimState:
    """Build a seeded SimState.  Identical inputs give bit-identical states."""
    if dt is None:
        dt = DEFAULT_DT[variant]
    species = VARIANT_SPECIES[variant]
    if init_spec.kind == "from_snapshot":
        from .snapshots import read_snapshot

        snap = read_snapshot(init_spec.snapshot_path)
        if tuple(snap.species) != species:
            raise ConfigError(
                f"snapshot species {tuple(snap.species)} do not match "
                f"variant {variant!r} ({species})"
            )
        if (snap.nx, snap.ny) != (spec.nx, spec.ny):
            raise ConfigError(
                f"snapshot grid {snap.nx}x{snap.ny} does not match "
                f"{spec.nx}x{spec.ny}"
            )
        n = snap.t / dt
        if abs(n - round(n)) > 1e-9:
            raise ConfigError(f"snapshot t={snap.t} is not a multiple of dt={dt}")
        rng = RngState(init_spec.rng_seed, STREAM_SIM, 0)
        return SimState(spec, variant, params, dt, dict(snap.species), rng,
                        step_count=int(round(n)))

    backgrounds = {"a": 1.0, "b": 0.0, "c": 0.0, "p": 0.0}
    seeded_levels = {"a": init_spec.levels[0], "b": init_spec.levels[1]}
    if variant == "tail":
        seeded_levels["c"] = init_spec.levels[2]

    if init_spec.kind == "square_seed":
        cx, cy = init_spec.center if init_spec.center is not None else (
            spec.lx / 2.0, spec.ly / 2.0)
        hw = init_spec.half_width if init_spec.half_width is not None else spec.lx / 20.0
        if hw <= 0:
            raise ConfigError(f"half_width must be > 0, got {hw}")
        if cx - hw < 0 or cx + hw > spec.lx or cy - hw < 0 or cy + hw > spec.ly:
            raise ConfigError(
                f"seed region [{cx}+-{hw}, {cy}+-{hw}] extends outside the "
                f"{spec.lx}x{spec.ly} domain"
            )
        xc = spec.x_centers()
        yc = spec.y_centers()
        in_x = np.abs(xc - cx) <= hw
        in_y = np.abs(yc - cy) <= hw
        mask = np.outer(in_y, in_x)
    else:  # uniform_noise
        mask = np.ones(spec.shape, dtype=bool)

    arrays = {}
    for name in species:
        arr = np.full(spec.shape, backgrounds[name])
        if name in seeded_levels:
            level = seeded_levels[name]
            gen = generator_at(init_spec.rng_seed, _INIT_STREAMS[name], 0)
            noise = gen.uniform(-1.0, 1.0, spec.shape)
            seeded = level * (1.0 + init_spec.noise_amplitude * noise)
            arr = np.where(mask, seeded, arr)
        arrays[name] = arr

    rng = RngState(init_spec.rng_seed, STREAM_SIM, 0)
    return SimState(spec, variant, params, dt, arrays, rng)


def step(s: SimState) -> SimState:
    """Advance one forward-Euler step in place.

    Raises DivergenceError (without advancing) if the update produced a
    non-finite value anywhere.
    """
    spec = s.spec
    hx2 = spec.hx * spec.hx
    hy2 = spec.hy * spec.hy
    p = s.params
    if s.variant == "gs":
        clamped, bad = _kernels.step_gs(
            s.arrays["a"], s.arrays["b"], s._next["a"], s._next["b"],
            hx2, hy2, p.d_a, p.d_b, p.r, p.k, s.dt,
        )
    elif s.variant == "waste":
        clamped, bad = _kernels.step_waste(
            s.arrays["a"], s.arrays["b"], s.arrays["p"],
            s._next["a"], s._next["b"], s._next["p"],
            hx2, hy2, p.base.d_a, p.base.d_b, p.base.r, p.base.k,
            p.w, p.k_p, s.dt,
        )
    else:
        clamped, bad = _kernels.step_tail(
            s.arrays["a"], s.arrays["b"], s.arrays["c"],
            s._next["a"], s._next["b"], s._next["c"],
            hx2, hy2, p.d_a, p.d_b, p.d_c, p.r, p.k1, p.k2, p.k3, s.dt,
        )
    if bad >= 0:
        n = spec.n_cells
        name = s.species[bad // n]
        flat = bad % n
        raise DivergenceError((s.step_count + 1) * s.dt, name,
                              (flat % spec.nx, flat // spec.nx))
    s.arrays, s._next = s._next, s.arrays
    s.step_count += 1
    s.clamped_last_step = clamped
    s.clamped_total += clamped
    return s


class Observer:
    """Hook invoked by `run`.

    phase "events" runs before every step (external perturbations);
    "analysis" and "output" run after steps whose time is a multiple of
    `period`, in that order.  `bind` is called once when a nonzero-length
    run starts; `flush` always runs before `run` returns or re-raises.
    """

    phase = "analysis"
    period: float | None = None

    def bind(self, state: SimState):
        pass

    def __call__(self, state: SimState):
        raise NotImplementedError

    def flush(self):
        pass


def _period_steps(observer: Observer, dt: float) -> int:
    if observer.period is None:
        return 1
    n = observer.period / dt
    if n < 1 or abs(n - round(n)) > 1e-9 * max(1.0, n):
        raise ConfigError(
            f"observer period {observer.period} is not a positive multiple "
            f"of dt={dt}"
        )
    return int(round(n))


def run(s: SimState, t_end: float, observers=()) -> SimState:
    """Step until t_end, invoking observers (events -> step -> analysis ->
    output).  A zero-length run makes no observer calls."""
    span = t_end - s.t
    if span < -1e-12:
        raise ConfigError(f"t_end {t_end} is before current t {s.t}")
    n = span / s.dt
    n_steps = int(round(n))
    if abs(n - n_steps) > 1e-9 * max(1.0, abs(n)):
        raise ConfigError(f"t_end - t = {span} is not a multiple of dt = {s.dt}")
    if n_steps == 0:
        return s

    events = [o for o in observers if o.phase == "events"]
    analysis = [o for o in observers if o.phase == "analysis"]
    output = [o for o in observers if o.phase == "output"]
    periods = {id(o): _period_steps(o, s.dt) for o in observers}

    for o in observers:
        o.bind(s)
    try:
        for _ in range(n_steps):
            for o in events:
                o(s)
            step(s)
            for group in (analysis, output):
                for o in group:
                    if s.step_count % periods[id(o)] == 0:
                        o(s)
    finally:
        for o in observers:
            o.flush()
    return s
