"""From concentration fields to individuals: spots, tracks, and lineages.

A spot is a 4-connected component of the autocatalyst field above a
threshold (with periodic wrap), carrying a mass-weighted periodic centroid.
Tracks link spots across frames by greedy nearest-centroid matching under a
gate, emitting birth / death / division / merge / tail-change events, and
accumulate unwrapped trajectories so speeds are measured on the covering
plane.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.ndimage as ndi

from .errors import TrackTooShortError
from .grid import Field, GridSpec
from .integrator import SimState


@dataclass
class DetectConfig:
    """Spot-detection knobs.

    The paper leaves spot identity fuzzy, so everything is configurable:
    b_threshold is roughly half a typical spot peak; a component needs
    min_area_cells cells to count.  A spot is "tailed" when the integrated
    c within tail_radius of its centroid reaches tail_mass_threshold
    (absolute), or, when unset, tail_mass_fraction of the frame's median
    spot b-mass.
    """

    b_threshold: float = 0.1
    min_area_cells: int = 4
    tail_mass_fraction: float = 0.1
    tail_mass_threshold: float | None = None
    tail_radius: float | None = None
    tail_radius_factor: float = 3.0


@dataclass
class TrackerConfig:
    # max_step_cells is calibrated for the reference frame period; the gate
    # scales up for longer periods but never shrinks below 5 cells.
    max_step_cells: float = 5.0
    reference_frame_period: float = 100.0
    division_area_ratio: float = 0.75


@dataclass
class Spot:
    id: int
    centroid: tuple
    area: float
    peak_b: float
    b_mass: float
    n_cells: int
    tail_mass: float = 0.0
    tailed: bool = False

    @property
    def effective_radius(self) -> float:
        return math.sqrt(self.area / math.pi)


@dataclass
class Track:
    track_id: int
    birth_time: float
    parent: int | None = None
    times: list = field(default_factory=list)
    spots: list = field(default_factory=list)
    unwrapped: list = field(default_factory=list)
    death_time: float | None = None

    @property
    def alive(self) -> bool:
        return self.death_time is None

    @property
    def last_spot(self) -> Spot:
        return self.spots[-1]

    @property
    def last_centroid(self) -> tuple:
        return self.spots[-1].centroid

    def span(self) -> float:
        return self.times[-1] - self.times[0]

    def displacement(self) -> float:
        x0, y0 = self.unwrapped[0]
        x1, y1 = self.unwrapped[-1]
        return math.hypot(x1 - x0, y1 - y0)

    def tailed_fraction(self) -> float:
        return sum(1 for s in self.spots if s.tailed) / len(self.spots)

    def mean_effective_radius(self) -> float:
        return sum(s.effective_radius for s in self.spots) / len(self.spots)

    def append(self, grid: GridSpec, t: float, spot: Spot):
        if self.unwrapped:
            px, py = self.spots[-1].centroid
            ux, uy = self.unwrapped[-1]
            dx = grid.wrap_dx(spot.centroid[0] - px)
            dy = grid.wrap_dy(spot.centroid[1] - py)
            self.unwrapped.append((ux + dx, uy + dy))
        else:
            self.unwrapped.append(spot.centroid)
        self.times.append(t)
        self.spots.append(spot)


@dataclass
class LineageEvent:
    time: float
    kind: str  # birth | death | division | merge | tail_gain | tail_loss
    participants: tuple


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _periodic_labels(mask: np.ndarray) -> tuple:
    """4-connected labeling with periodic wrap on both axes."""
    labels, n = ndi.label(mask)
    if n == 0:
        return labels, 0
    uf = _UnionFind(n + 1)
    ny, nx = mask.shape
    if ny > 1:
        top, bottom = labels[0, :], labels[-1, :]
        for i in np.nonzero((top > 0) & (bottom > 0))[0]:
            uf.union(int(top[i]), int(bottom[i]))
    if nx > 1:
        left, right = labels[:, 0], labels[:, -1]
        for j in np.nonzero((left > 0) & (right > 0))[0]:
            uf.union(int(left[j]), int(right[j]))
    roots = np.array([uf.find(i) for i in range(n + 1)])
    # compact to 1..m preserving first-appearance order
    remap = np.zeros(n + 1, dtype=np.int64)
    seen = {}
    for lab in range(1, n + 1):
        root = roots[lab]
        if root not in seen:
            seen[root] = len(seen) + 1
        remap[lab] = seen[root]
    return remap[labels], len(seen)


def _circular_centroid(coords, weights, length):
    """Mass-weighted mean of periodic coordinates via circular statistics."""
    theta = coords * (2.0 * math.pi / length)
    s = float(np.sum(weights * np.sin(theta)))
    c = float(np.sum(weights * np.cos(theta)))
    return (math.atan2(s, c) % (2.0 * math.pi)) * length / (2.0 * math.pi)


def _tail_mass(c: np.ndarray, spec: GridSpec, centroid, radius: float) -> float:
    xc = spec.x_centers()
    yc = spec.y_centers()
    dx = spec.wrap_dx(xc - centroid[0])
    dy = spec.wrap_dy(yc - centroid[1])
    mask = (dy[:, None] ** 2 + dx[None, :] ** 2) <= radius * radius
    return float(np.sum(c[mask])) * spec.cell_area


def detect_spots(b: Field, c: Field | None = None, cfg: DetectConfig | None = None):
    """Detect spots in one frame; empty list when nothing clears threshold."""
    cfg = cfg or DetectConfig()
    spec = b.spec
    mask = b.values >= cfg.b_threshold
    labels, n = _periodic_labels(mask)
    if n == 0:
        return []
    xc = spec.x_centers()
    yc = spec.y_centers()
    spots = []
    for lab in range(1, n + 1):
        ys, xs = np.nonzero(labels == lab)
        if len(xs) < cfg.min_area_cells:
            continue
        w = b.values[ys, xs]
        cx = _circular_centroid(xc[xs], w, spec.lx)
        cy = _circular_centroid(yc[ys], w, spec.ly)
        spots.append(Spot(
            id=len(spots),
            centroid=(cx, cy),
            area=len(xs) * spec.cell_area,
            peak_b=float(w.max()),
            b_mass=float(w.sum()) * spec.cell_area,
            n_cells=len(xs),
        ))
    if c is not None and spots:
        threshold = cfg.tail_mass_threshold
        if threshold is None:
            threshold = cfg.tail_mass_fraction * float(
                np.median([s.b_mass for s in spots]))
        for s in spots:
            radius = cfg.tail_radius
            if radius is None:
                radius = cfg.tail_radius_factor * s.effective_radius
            s.tail_mass = _tail_mass(c.values, spec, s.centroid, radius)
            s.tailed = s.tail_mass >= threshold
    return spots


class SpotTracker:
    """Serial fold over frames: feeds detected spots, maintains tracks and
    lineage events."""

    def __init__(self, grid: GridSpec, cfg: TrackerConfig | None = None):
        self.grid = grid
        self.cfg = cfg or TrackerConfig()
        self.tracks = []  # index == track_id
        self.events = []
        self._active = []  # track ids
        self._last_t = None

    def gate(self, dt_frame: float) -> float:
        cells = self.cfg.max_step_cells * max(self.grid.hx, self.grid.hy)
        return cells * max(1.0, dt_frame / self.cfg.reference_frame_period)

    def _new_track(self, t, spot, parent=None) -> Track:
        tr = Track(track_id=len(self.tracks), birth_time=t, parent=parent)
        tr.append(self.grid, t, spot)
        self.tracks.append(tr)
        self._active.append(tr.track_id)
        return tr

    def _close(self, track: Track, t: float):
        track.death_time = t
        self._active.remove(track.track_id)

    def update(self, t: float, spots) -> list:
        """Ingest one frame; returns the events it produced."""
        events = []
        if self._last_t is None:
            for s in spots:
                tr = self._new_track(t, s)
                events.append(LineageEvent(t, "birth", (tr.track_id,)))
            self.events.extend(events)
            self._last_t = t
            return events

        gate = self.gate(t - self._last_t)
        active = [self.tracks[i] for i in self._active]

        pairs = []
        for tr in active:
            for s in spots:
                d = self.grid.periodic_distance(tr.last_centroid, s.centroid)
                if d <= gate:
                    pairs.append((d, tr.track_id, s.id))
        pairs.sort()
        track_to_spot = {}
        spot_to_track = {}
        for d, tid, sid in pairs:
            if tid not in track_to_spot and sid not in spot_to_track:
                track_to_spot[tid] = sid
                spot_to_track[sid] = tid

        spot_by_id = {s.id: s for s in spots}
        consumed_tracks = set()
        consumed_spots = set()

        # divisions: an unmatched spot near exactly one matched track whose
        # own spot shrank
        shrunk = {
            tid: sid for tid, sid in track_to_spot.items()
            if spot_by_id[sid].area
            <= self.cfg.division_area_ratio * self.tracks[tid].last_spot.area
        }
        for s in spots:
            if s.id in spot_to_track:
                continue
            candidates = [
                tid for tid in sorted(shrunk)
                if tid not in consumed_tracks
                and self.grid.periodic_distance(
                    self.tracks[tid].last_centroid, s.centroid) <= gate
            ]
            if len(candidates) == 1:
                parent = self.tracks[candidates[0]]
                sibling = spot_by_id[shrunk[parent.track_id]]
                consumed_tracks.add(parent.track_id)
                consumed_spots.update((s.id, sibling.id))
                self._close(parent, t)
                child_a = self._new_track(t, sibling, parent=parent.track_id)
                child_b = self._new_track(t, s, parent=parent.track_id)
                events.append(LineageEvent(
                    t, "division",
                    (parent.track_id, child_a.track_id, child_b.track_id)))

        # merges: an unmatched track near a matched spot
        for tr in active:
            if tr.track_id in track_to_spot or tr.track_id in consumed_tracks:
                continue
            best = None
            for sid, other_tid in spot_to_track.items():
                if sid in consumed_spots or other_tid in consumed_tracks:
                    continue
                d = self.grid.periodic_distance(
                    tr.last_centroid, spot_by_id[sid].centroid)
                if d <= gate and (best is None or d < best[0]):
                    best = (d, sid)
            if best is not None:
                sid = best[1]
                other = self.tracks[spot_to_track[sid]]
                consumed_tracks.update((tr.track_id, other.track_id))
                consumed_spots.add(sid)
                self._close(other, t)
                self._close(tr, t)
                child = self._new_track(t, spot_by_id[sid], parent=other.track_id)
                events.append(LineageEvent(
                    t, "merge", (other.track_id, tr.track_id, child.track_id)))

        # continuations, with tail transitions
        for tid, sid in track_to_spot.items():
            if tid in consumed_tracks or sid in consumed_spots:
                continue
            tr = self.tracks[tid]
            was_tailed = tr.last_spot.tailed
            spot = spot_by_id[sid]
            tr.append(self.grid, t, spot)
            if spot.tailed != was_tailed:
                kind = "tail_gain" if spot.tailed else "tail_loss"
                events.append(LineageEvent(t, kind, (tid,)))

        # deaths
        for tr in active:
            if tr.track_id not in track_to_spot and tr.track_id not in consumed_tracks:
                self._close(tr, t)
                events.append(LineageEvent(t, "death", (tr.track_id,)))

        # births
        for s in spots:
            if s.id not in spot_to_track and s.id not in consumed_spots:
                tr = self._new_track(t, s)
                events.append(LineageEvent(t, "birth", (tr.track_id,)))

        self.events.extend(events)
        self._last_t = t
        return events

    @property
    def active_count(self) -> int:
        return len(self._active)


def track_spots(prev_tracks, current, dt_frame, grid, cfg=None):
    """One tracking step as a function: link spots of the next frame onto
    existing tracks.  Returns (tracks, events)."""
    tracker = SpotTracker(grid, cfg)
    tracker.tracks = list(prev_tracks)
    tracker._active = [tr.track_id for tr in prev_tracks if tr.alive]
    last_times = [tr.times[-1] for tr in prev_tracks if tr.alive]
    tracker._last_t = max(last_times) if last_times else None
    t = tracker._last_t + dt_frame if tracker._last_t is not None else 0.0
    events = tracker.update(t, current)
    return tracker.tracks, events


def velocity(track: Track, window: float) -> float:
    """Mean speed over sliding windows of the given length."""
    if len(track.times) < 2 or track.span() < window - 1e-9:
        raise TrackTooShortError(
            f"track {track.track_id} spans {track.span() if track.times else 0}"
            f" < window {window}"
        )
    dt_frame = track.times[1] - track.times[0]
    m = max(1, int(round(window / dt_frame)))
    w_eff = m * dt_frame
    pts = track.unwrapped
    speeds = [
        math.hypot(pts[i + m][0] - pts[i][0], pts[i + m][1] - pts[i][1]) / w_eff
        for i in range(len(pts) - m)
    ]
    return sum(speeds) / len(speeds)


@dataclass
class Profile:
    r_centers: np.ndarray
    means: dict
    counts: np.ndarray


def radial_profile(s: SimState, spot: Spot, n_bins: int = 24) -> Profile:
    """Azimuthally averaged concentrations vs distance from the spot
    centroid, out to 3 effective radii."""
    spec = s.spec
    r_max = 3.0 * spot.effective_radius
    dx = spec.wrap_dx(spec.x_centers() - spot.centroid[0])
    dy = spec.wrap_dy(spec.y_centers() - spot.centroid[1])
    dist = np.sqrt(dy[:, None] ** 2 + dx[None, :] ** 2)
    bins = np.minimum((dist / (r_max / n_bins)).astype(int), n_bins)
    inside = bins < n_bins
    idx = bins[inside]
    counts = np.bincount(idx, minlength=n_bins)
    means = {}
    for name, arr in s.arrays.items():
        sums = np.bincount(idx, weights=arr[inside], minlength=n_bins)
        with np.errstate(invalid="ignore"):
            means[name] = sums / counts
    dr = r_max / n_bins
    centers = (np.arange(n_bins) + 0.5) * dr
    return Profile(centers, means, counts)


@dataclass
class HeredityStats:
    p_tail_inherit: float | None
    n_divisions: int
    n_tailed_parent_divisions: int
    n_children_of_tailed: int
    n_tailed_children: int

    @property
    def empty(self) -> bool:
        return self.p_tail_inherit is None


def heredity_stats(events, tracks) -> HeredityStats:
    """Fraction of children of tailed parents that are tailed at their
    first post-division frame.  Empty marker when nothing qualifies."""
    by_id = {tr.track_id: tr for tr in tracks}
    n_div = 0
    n_tailed_div = 0
    children = 0
    tailed_children = 0
    for e in events:
        if e.kind != "division":
            continue
        n_div += 1
        parent, child_a, child_b = e.participants
        if not by_id[parent].last_spot.tailed:
            continue
        n_tailed_div += 1
        for cid in (child_a, child_b):
            children += 1
            tailed_children += by_id[cid].spots[0].tailed
    p = tailed_children / children if children else None
    return HeredityStats(p, n_div, n_tailed_div, children, tailed_children)


@dataclass(frozen=True)
class Zone:
    name: str
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, point) -> bool:
        return self.x0 <= point[0] < self.x1 and self.y0 <= point[1] < self.y1


@dataclass
class SeriesPoint:
    t: float
    n_spots: int
    n_tailed: int
    zones: dict  # name -> (n_spots, n_tailed)


def population_series(frames, zones=()) -> list:
    """Per-frame population counts; frames are (t, spots) pairs."""
    series = []
    for t, spots in frames:
        zcounts = {}
        for z in zones:
            inside = [s for s in spots if z.contains(s.centroid)]
            zcounts[z.name] = (len(inside), sum(1 for s in inside if s.tailed))
        series.append(SeriesPoint(
            t=t,
            n_spots=len(spots),
            n_tailed=sum(1 for s in spots if s.tailed),
            zones=zcounts,
        ))
    return series


def count_population_peaks(values, min_prominence: float = 2.0) -> int:
    """Number of local maxima with at least the given prominence."""
    from scipy.signal import find_peaks

    peaks, _ = find_peaks(np.asarray(values, dtype=float),
                          prominence=min_prominence)
    return len(peaks)
