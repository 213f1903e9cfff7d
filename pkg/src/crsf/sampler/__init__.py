"""p-LERW walks, finite Wilson-type samplers and infinite-volume sampling on Z^2."""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .lattice import *  # noqa: F401,F403
from .lattice import __all__ as _lat_all
from .replay import ReplayResult, model_weight, naive_lerw

__all__ = list(_core_all) + list(_lat_all) + ["ReplayResult", "model_weight", "naive_lerw"]
