"""Exception types shared across the package."""


class SpotSimError(Exception):
    """Base class for all spotsim errors."""


class ConfigError(SpotSimError):
    """Invalid configuration: bad parameter values, CFL violation, malformed
    config documents, seed regions outside the domain, and similar."""


class GridMismatchError(SpotSimError):
    """Fields that are required to share a GridSpec do not."""


class DivergenceError(SpotSimError):
    """The integration produced a NaN or Inf value.

    Carries the simulation time, the species name, and the (i, j) cell index
    of the first offending cell.
    """

    def __init__(self, t, species, cell):
        self.t = t
        self.species = species
        self.cell = cell
        super().__init__(
            f"non-finite value in species '{species}' at cell {cell}, t={t}"
        )


class TrackTooShortError(SpotSimError):
    """A track does not span the requested measurement window."""


class SnapshotError(SpotSimError):
    """Base class for snapshot file problems."""


class SnapshotTruncatedError(SnapshotError):
    """Snapshot file ends before the declared payload is complete."""


class SnapshotCrcError(SnapshotError):
    """Snapshot payload does not match its trailing CRC32."""


class SnapshotVersionError(SnapshotError):
    """Snapshot declares an unsupported format version."""
