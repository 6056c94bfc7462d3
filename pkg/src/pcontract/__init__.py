"""Piecewise contractions of the unit interval, exactly."""

from .billiard import PolygonScene, extract_return_map, first_return
from .census import Kind, census_verdict, classify, enumerate_periodic_orbits, maximal_trapping_interval, trapping_region
from .conjugacy import ConjugacyTable, verify_half_slopes
from .core import AffinePiece, PiecewiseAffineContraction, validate
from .files import map_to_spec, parse_map, parse_scene
from .fixtures import fixture
from .fuzz import fuzz_generate
from .intervals import SidedInterval, rational
from .pipeline import analyze

__all__ = [
    "AffinePiece",
    "ConjugacyTable",
    "Kind",
    "PiecewiseAffineContraction",
    "PolygonScene",
    "SidedInterval",
    "analyze",
    "census_verdict",
    "classify",
    "enumerate_periodic_orbits",
    "extract_return_map",
    "first_return",
    "fixture",
    "fuzz_generate",
    "map_to_spec",
    "maximal_trapping_interval",
    "parse_map",
    "parse_scene",
    "rational",
    "trapping_region",
    "validate",
    "verify_half_slopes",
]
