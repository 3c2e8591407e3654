"""Exception types shared across the package."""


class VoxCompressError(Exception):
    """Base class for all voxcompress errors."""


class InvalidK(VoxCompressError):
    """Requested cluster count is outside [1, n_voxels]."""


class InfeasibleK(VoxCompressError):
    """Requested cluster count cannot be produced on this topology."""


class DisconnectedTopology(InfeasibleK):
    """Operation requires a connected lattice but the topology has several components."""


class DegeneratePair(VoxCompressError):
    """Isometry ratio requested for two identical vectors (zero denominator)."""


class VolumeFormatError(VoxCompressError):
    """Volume file is malformed (bad magic, header, or payload length)."""
