from .vector import NormKind, Vector, as_vector, coords_of
from .certificate import Certificate
from .gallery import GalleryRow
from .trace import AbbIterate, AbbTrace, DeltaCertificate, ModulusReport

__all__ = [
    "NormKind", "Vector", "as_vector", "coords_of",
    "Certificate", "GalleryRow",
    "AbbIterate", "AbbTrace", "DeltaCertificate", "ModulusReport",
]
