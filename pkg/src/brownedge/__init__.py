"""Brown measure of free circular Brownian motion with general initial data.

The package computes, for an initial operator a with known spectral data and
the evolution a + sqrt(t) * x (x circular), the support boundary
{f_a = 1/t} of the Brown measure, its density, edge classification
(sharp vs. quadratic), and finite-matrix cross validation.
"""

from ._backend import BACKEND
from .kernels import (
    Atomic,
    GridSpec,
    HaarUnitary,
    HermitianBeta,
    HermitianTabulated,
    MatrixModel,
    MomentSet,
    ProductPower,
    SpectralModel,
    TwoLine,
    assumption_check,
    f_eval,
    grad_f,
    hess_f,
    model_from_dict,
    model_from_json,
    model_to_json,
    moments,
    spec_indicator,
)

__version__ = "0.1.0"
