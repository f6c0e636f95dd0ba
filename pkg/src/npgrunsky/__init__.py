"""Neumann-Poincare spectra of planar domains from Grunsky coefficients."""
from .conformal import ExteriorMap, disk, ellipse, parse_domain, powerlaw, preset, random_map
from .grunsky import grunsky_table_by_composition, grunsky_table_recursive, symmetrize
from .spectrum import assemble, spectrum, tail_norm

__version__ = "0.1.0"

__all__ = [
    "ExteriorMap",
    "assemble",
    "disk",
    "ellipse",
    "grunsky_table_by_composition",
    "grunsky_table_recursive",
    "parse_domain",
    "powerlaw",
    "preset",
    "random_map",
    "spectrum",
    "symmetrize",
    "tail_norm",
]
