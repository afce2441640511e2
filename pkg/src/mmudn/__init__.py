"""mmudn: a verification lab for millimeter-wave overlaid ultra-dense networks.

Modules:
  pointprocess — PPP sampling, association, scheduling, Voronoi cell law
  blockage     — 2D/3D blockage parameters and LOS distances from building stats
  analytic_se  — closed-form SE asymptotics and bounds for both tiers
  allocation   — TDD UL/DL resource allocation with mmW UL decoupling
  simulator    — Monte Carlo SIR/SE estimation validating the closed forms
  cli          — batch front end (``mmudn`` console script)
"""

from .analytic_se import NetworkParams, SEBounds
from .allocation import Allocation, RatePair, RegionLabel, SpectrumParams
from .blockage import BlockageParams, BuildingStats
from .pointprocess import Window
from .simulator import SEEstimate, SimConfig

__version__ = "0.1.0"

__all__ = [
    "NetworkParams",
    "SEBounds",
    "Allocation",
    "RatePair",
    "RegionLabel",
    "SpectrumParams",
    "BlockageParams",
    "BuildingStats",
    "Window",
    "SEEstimate",
    "SimConfig",
    "__version__",
]
