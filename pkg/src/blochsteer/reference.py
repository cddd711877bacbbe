"""Benchmark models and the published reference results they come from.

The two standard examples used throughout the tests and the
``reproduce-tables`` command: a planar model with drift b = (1, 2) and rates
diag(-3, -4), and a spatial model with b = (1, 2, 3) and rates
diag(-7, -6, -5).  The result tables list (elapsed time, control energy)
pairs per ansatz order for both objectives, as published.
"""

from __future__ import annotations

import numpy as np

from .bloch import DissipationModel


def planar_model() -> DissipationModel:
    return DissipationModel.planar(a=[-3.0, -4.0], b=[1.0, 2.0])


def spatial_model() -> DissipationModel:
    return DissipationModel.from_drift(np.diag([-7.0, -6.0, -5.0]),
                                       [1.0, 2.0, 3.0])


PLANAR_APOGEE = (0.4079, 0.4493)
SPATIAL_APOGEE = (0.1140, 0.2954, 0.6287)

# order -> objective -> (elapsed time, control energy)
PLANAR_RESULTS = {
    1: {"time": (1.9371, 7.5830), "energy": (1.9393, 0.5365)},
    3: {"time": (1.9366, 8.6873), "energy": (2.1477, 0.2410)},
    5: {"time": (1.9361, 1.6368), "energy": (2.1789, 0.2334)},
    7: {"time": (1.9359, 1.3765), "energy": (2.1569, 0.2369)},
}
SPATIAL_RESULTS = {
    1: {"time": (1.3188, 207.26), "energy": (1.3243, 36.365)},
    2: {"time": (1.3188, 47.519), "energy": (1.3205, 32.491)},
    3: {"time": (1.3189, 42.431), "energy": (1.3212, 29.356)},
    4: {"time": (1.3188, 49.693), "energy": (1.3214, 31.682)},
}

# published endpoint-control observations
PLANAR_TERMINAL_CONTROL = -0.5000
SPATIAL_TERMINAL_CONTROLS = (0.0, 1.265, 2.007)
SPATIAL_TERMINAL_FIXED_POINT = (0.1364, 0.3789, 0.5655)


def results_for(dimension: int) -> dict:
    return PLANAR_RESULTS if dimension == 2 else SPATIAL_RESULTS
