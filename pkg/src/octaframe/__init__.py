"""Frame-field extension over tet meshes, decided in the binary octahedral group."""

from .group import GroupElement, OctaGroup, RotationElement, octa_group

__version__ = "0.1.0"

__all__ = [
    "GroupElement",
    "OctaGroup",
    "RotationElement",
    "octa_group",
    "__version__",
]
