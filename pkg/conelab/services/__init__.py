from conelab.services.cones import BaseSpec, ConeSpec, DilatedCone, OrthantCone, SlantedCone, base_of, dilate, make_cone
from conelab.services.sets import SET_FAMILIES, SetSpec, make_set
from conelab.services.solvers import DEFAULT_CONFIG, SolverConfig

__all__ = [
    'BaseSpec',
    'ConeSpec',
    'DilatedCone',
    'OrthantCone',
    'SlantedCone',
    'base_of',
    'dilate',
    'make_cone',
    'SET_FAMILIES',
    'SetSpec',
    'make_set',
    'DEFAULT_CONFIG',
    'SolverConfig',
]
