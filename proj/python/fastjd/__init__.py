"""Block-FFT joint detection for TD-CDMA bursts, with reference detectors."""

from ._fastjd import *  # noqa: F401,F403
from ._fastjd import ConfigError, NumericError, __version__  # noqa: F401
