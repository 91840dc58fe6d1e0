"""External interventions: the virtual pipette and scheduled cataclysms.

A pipette adds or removes one species inside a disc, at a rate per unit
time; a cataclysm zeroes the food concentration in a square region drawn
uniformly inside a zone.  Scheduled versions of both are collected in an
EventSchedule, which serializes to JSON and replays bit-exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grid import GridSpec
from .integrator import Observer, SimState
from .rng import STREAM_CATACLYSM, generator_at

MAX_PIPETTE_RATE = 10.0  # guard against instant blowup

# Tuned defaults (the paper gives no pipette numbers); scenario configs
# may override.
DEFAULT_PIPETTE_RADIUS = 0.05
DEFAULT_PIPETTE_RATE = 0.5


@dataclass(frozen=True)
class PipetteAction:
    """A local disc-shaped source (rate > 0) or sink (rate < 0)."""

    position: tuple
    species: str = "a"
    rate: float = DEFAULT_PIPETTE_RATE
    radius: float = DEFAULT_PIPETTE_RADIUS

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError(f"pipette radius must be > 0, got {self.radius}")
        if not abs(self.rate) < MAX_PIPETTE_RATE:
            raise ConfigError(
                f"|pipette rate| must be < {MAX_PIPETTE_RATE}, got {self.rate}"
            )
        if self.species not in ("a", "b", "c"):
            raise ConfigError(f"unknown pipette species {self.species!r}")

    def at(self, position) -> "PipetteAction":
        return PipetteAction(tuple(position), self.species, self.rate, self.radius)


def _disc_window(spec: GridSpec, position, radius):
    """Index arrays and mask for cells whose center lies within radius of
    position, using periodic distance.  Returns (iy, ix, mask) restricted
    to the disc's bounding window."""
    px = position[0] % spec.lx
    py = position[1] % spec.ly
    # candidate index ranges around the center (may span the seam)
    i0 = int(math.floor((px - radius) / spec.hx - 0.5))
    i1 = int(math.ceil((px + radius) / spec.hx - 0.5))
    j0 = int(math.floor((py - radius) / spec.hy - 0.5))
    j1 = int(math.ceil((py + radius) / spec.hy - 0.5))
    ix = np.arange(i0, i1 + 1) % spec.nx
    iy = np.arange(j0, j1 + 1) % spec.ny
    ix = np.unique(ix)
    iy = np.unique(iy)
    dx = spec.wrap_dx((ix + 0.5) * spec.hx - px)
    dy = spec.wrap_dy((iy + 0.5) * spec.hy - py)
    mask = (dy[:, None] ** 2 + dx[None, :] ** 2) <= radius * radius
    return iy, ix, mask


def apply_pipette(s: SimState, act: PipetteAction, dt: float) -> SimState:
    """Apply one pipette application of duration dt.

    Every cell whose center lies within the disc gets species += rate * dt,
    clamped at zero.  Cells outside the disc are untouched.
    """
    if act.species not in s.species:
        raise ConfigError(
            f"species {act.species!r} does not exist in variant {s.variant!r}"
        )
    iy, ix, mask = _disc_window(s.spec, act.position, act.radius)
    arr = s.arrays[act.species]
    window = arr[np.ix_(iy, ix)]
    window = np.where(mask, np.maximum(window + act.rate * dt, 0.0), window)
    arr[np.ix_(iy, ix)] = window
    return s


def clear_food_square(s: SimState, center, side: float) -> SimState:
    """Set the food field a to zero in a side-by-side square (periodic)."""
    half = side / 2.0
    px = center[0] % s.spec.lx
    py = center[1] % s.spec.ly
    xc = s.spec.x_centers()
    yc = s.spec.y_centers()
    in_x = np.abs(s.spec.wrap_dx(xc - px)) <= half
    in_y = np.abs(s.spec.wrap_dy(yc - py)) <= half
    s.arrays["a"][np.ix_(in_y, in_x)] = 0.0
    return s


@dataclass(frozen=True)
class CataclysmSpec:
    """Recurring food-clearing events in random sub-squares of a zone."""

    zone: tuple  # (x0, y0, x1, y1)
    region_side: float = 0.5
    period: float = 1000.0
    stream: int = STREAM_CATACLYSM

    def __post_init__(self):
        x0, y0, x1, y1 = self.zone
        if x1 <= x0 or y1 <= y0:
            raise ConfigError(f"empty cataclysm zone {self.zone}")
        if self.region_side > min(x1 - x0, y1 - y0):
            raise ConfigError(
                f"region_side {self.region_side} exceeds zone extents {self.zone}"
            )
        if self.period <= 0:
            raise ConfigError(f"cataclysm period must be > 0, got {self.period}")

    def draw_center(self, seed: int, counter: int) -> tuple:
        """Uniform center of the counter-th event; region stays inside the
        zone."""
        x0, y0, x1, y1 = self.zone
        half = self.region_side / 2.0
        gen = generator_at(seed, self.stream, counter)
        cx = gen.uniform(x0 + half, x1 - half)
        cy = gen.uniform(y0 + half, y1 - half)
        return (cx, cy)


def apply_cataclysm(s: SimState, spec: CataclysmSpec, counter: int) -> SimState:
    """Apply the counter-th cataclysm of a schedule: draw a region center
    from the schedule's RNG stream and zero the food there.  b, c, p are
    untouched."""
    center = spec.draw_center(s.rng.seed, counter)
    return clear_food_square(s, center, spec.region_side)


@dataclass
class ScheduledPipette:
    """A pipette stroke over [t_start, t_start + duration).

    Applied once per step; the position moves linearly from
    action.position to end_position (if given) across the stroke.
    """

    t_start: float
    duration: float
    action: PipetteAction
    end_position: tuple | None = None

    def position_at(self, t: float, dt: float) -> tuple:
        """Position of the n-th of N applications; a moving stroke covers
        the segment from position to end_position inclusive."""
        if self.end_position is None or self.duration <= dt:
            return self.action.position
        n_apps = round(self.duration / dt)
        n = min(max(round((t - self.t_start) / dt), 0), n_apps - 1)
        f = n / (n_apps - 1)
        x0, y0 = self.action.position
        x1, y1 = self.end_position
        return (x0 + f * (x1 - x0), y0 + f * (y1 - y0))

    def to_json(self) -> dict:
        doc = {
            "type": "pipette",
            "t_start": self.t_start,
            "duration": self.duration,
            "species": self.action.species,
            "rate": self.action.rate,
            "radius": self.action.radius,
            "position": list(self.action.position),
        }
        if self.end_position is not None:
            doc["end_position"] = list(self.end_position)
        return doc


@dataclass
class ScheduledCataclysm:
    """Recurring cataclysms starting at t_start, one per period."""

    t_start: float
    spec: CataclysmSpec

    def to_json(self) -> dict:
        return {
            "type": "cataclysm",
            "t_start": self.t_start,
            "region_side": self.spec.region_side,
            "period": self.spec.period,
            "zone": list(self.spec.zone),
            "stream": self.spec.stream,
        }


@dataclass
class EventSchedule:
    """Ordered timed perturbations; replaying it is bit-exact."""

    entries: list = field(default_factory=list)

    def __post_init__(self):
        starts = [e.t_start for e in self.entries]
        if starts != sorted(starts):
            raise ConfigError("schedule times must be non-decreasing")

    def validate_times(self, dt: float):
        for e in self.entries:
            for name, v in (("t_start", e.t_start),) + (
                (("duration", e.duration),) if isinstance(e, ScheduledPipette) else
                (("period", e.spec.period),)
            ):
                n = v / dt
                if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
                    raise ConfigError(
                        f"schedule {name}={v} is not a multiple of dt={dt}"
                    )

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]

    @classmethod
    def from_json(cls, docs: list) -> "EventSchedule":
        entries = []
        for doc in docs:
            if doc["type"] == "pipette":
                entries.append(ScheduledPipette(
                    t_start=doc["t_start"],
                    duration=doc["duration"],
                    action=PipetteAction(
                        position=tuple(doc["position"]),
                        species=doc.get("species", "a"),
                        rate=doc.get("rate", DEFAULT_PIPETTE_RATE),
                        radius=doc.get("radius", DEFAULT_PIPETTE_RADIUS),
                    ),
                    end_position=tuple(doc["end_position"])
                    if doc.get("end_position") is not None else None,
                ))
            elif doc["type"] == "cataclysm":
                entries.append(ScheduledCataclysm(
                    t_start=doc["t_start"],
                    spec=CataclysmSpec(
                        zone=tuple(doc["zone"]),
                        region_side=doc.get("region_side", 0.5),
                        period=doc.get("period", 1000.0),
                        stream=doc.get("stream", STREAM_CATACLYSM),
                    ),
                ))
            else:
                raise ConfigError(f"unknown schedule entry type {doc.get('type')!r}")
        return cls(entries)


class EventApplier(Observer):
    """Events-phase observer applying a schedule before each step."""

    phase = "events"
    period = None

    def __init__(self, schedule: EventSchedule):
        self.schedule = schedule
        self._cataclysm_counts = {}

    def bind(self, state: SimState):
        self.schedule.validate_times(state.dt)

    def __call__(self, s: SimState):
        t = s.t
        eps = 0.25 * s.dt
        for idx, entry in enumerate(self.schedule.entries):
            if isinstance(entry, ScheduledPipette):
                if entry.t_start - eps <= t < entry.t_start + entry.duration - eps:
                    act = entry.action.at(entry.position_at(t, s.dt))
                    apply_pipette(s, act, s.dt)
            else:
                if t < entry.t_start - eps:
                    continue
                n = (t - entry.t_start) / entry.spec.period
                if abs(n - round(n)) * entry.spec.period <= eps:
                    counter = self._cataclysm_counts.get(idx, 0)
                    apply_cataclysm(s, entry.spec, counter)
                    self._cataclysm_counts[idx] = counter + 1
