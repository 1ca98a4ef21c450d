from conelab.services.analysis.abb import abb_approximate, abb_degradation_table, default_schedule, parse_schedule
from conelab.services.analysis.families import flat_support_witness
from conelab.services.analysis.gallery import GALLERY_FAMILIES, gallery
from conelab.services.analysis.maximality import (
    find_positive_point,
    is_maximal,
    nonmax_certificate_flat,
    pos_support_check,
    replay_certificate,
)
from conelab.services.analysis.strict import (
    modulus_profile,
    modulus_sweep,
    stmax_delta_certificate,
    strict_max_modulus,
)

__all__ = [
    'abb_approximate',
    'abb_degradation_table',
    'default_schedule',
    'find_positive_point',
    'flat_support_witness',
    'gallery',
    'GALLERY_FAMILIES',
    'is_maximal',
    'modulus_profile',
    'modulus_sweep',
    'nonmax_certificate_flat',
    'parse_schedule',
    'pos_support_check',
    'replay_certificate',
    'stmax_delta_certificate',
    'strict_max_modulus',
]
