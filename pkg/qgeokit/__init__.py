# qgeokit/__init__.py
# Geometric reconstruction of discrete quantum mechanics: information metric,
# phase space, Kahler structure, wave functions and unitary dynamics.
from qgeokit.config import GeometryConfig, RunConfig, make_config
from qgeokit.errors import QGeoError

__all__ = ["GeometryConfig", "RunConfig", "make_config", "QGeoError"]
