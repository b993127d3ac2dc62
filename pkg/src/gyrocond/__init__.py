"""gyrocond: behavioral simulator of a platform-based gyro
signal-conditioning system.

The package models a vibrating-ring rate sensor driven and read out by a
programmable analog front end, conditioned by a digital chain (PLL, AGC,
quadrature demodulation, decimation, temperature compensation, force
rebalance), supervised by a monitoring service with a scan-chain
register map, trace capture, a scenario CLI and a browser console.
"""

from ._accel import USING_NUMBA, backend_name

__version__ = "0.1.0"

__all__ = ["USING_NUMBA", "backend_name", "__version__"]
