"""Random walks, potential theory and geometry on circle-packed planar graphs."""
from .errors import CarrierLabError
from .generators import Triangulation, generate_delaunay, generate_hyperbolic, wheel
from .graph import EmbeddedGraph, build
from .packing import PackingResult, pack_maximal

__version__ = "0.1.0"

__all__ = ["CarrierLabError", "EmbeddedGraph", "PackingResult", "Triangulation", "build",
           "generate_delaunay", "generate_hyperbolic", "pack_maximal", "wheel"]
