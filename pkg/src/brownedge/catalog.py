"""Named example configurations: models, time values, and evaluation boxes."""

import math

from .kernels import Atomic, GridSpec, HaarUnitary, HermitianBeta, ProductPower, TwoLine

T_STAR_A4 = 2.0 * (math.sqrt(2.0) - 1.0)
T0_TANGENT = 72.0 / 49.0          # 1/f(0) for the two-line measure


def _a4():
    return Atomic([1, -1, 1j, -1j], [0.25] * 4)


EXAMPLES = {
    "a4": {
        "model": _a4,
        "t": [0.5, T_STAR_A4, 0.9, 1.0, 1.1],
        "box": (-2.2 - 2.2j, 2.2 + 2.2j),
        "mass_t": [0.5, 0.9, 1.1],
    },
    "haar": {
        "model": HaarUnitary,
        "t": [1.0],
        "box": (-2.2 - 2.2j, 2.2 + 2.2j),
        "mass_t": [0.5, 1.0, 1.5],
    },
    "tangent": {
        "model": TwoLine,
        "t": [T0_TANGENT],
        "box": (-2.8 - 2.8j, 2.8 + 2.8j),
        "mass_t": [1.0, T0_TANGENT, 2.0],
    },
    "powerlaw": {
        "model": lambda: ProductPower(1.0, 1.5),
        "t": [0.2, 0.9],
        "box": (-0.9 - 0.9j, 1.9 + 1.9j),
        "mass_t": [0.2, 0.5, 0.9],
    },
    "jacobi": {
        "model": lambda: HermitianBeta(3.0, 4.0),
        "t": [1.0 / 30.0, 1.0 / 10.0, 2.0 / 5.0],
        "box": (-0.9 - 0.9j, 1.9 + 0.9j),
        "mass_t": [1.0 / 30.0, 1.0 / 10.0, 2.0 / 5.0],
    },
}


def get_example(name):
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from "
                       + ", ".join(sorted(EXAMPLES)))
    spec = EXAMPLES[name]
    return spec["model"](), spec


def default_grid(name, res=200):
    spec = EXAMPLES[name]
    return GridSpec(spec["box"][0], spec["box"][1], res)
