"""Numerical toolkit for wave kernels, Wiener amalgam norms and amalgam Strichartz estimates."""

from . import amalgam, decaylab, kernel, nlw, regions, special
from .amalgam import RadialProfile, SampledSignal, Window, amalgam_norm_1d, amalgam_norm_radial
from .kernel import KernelQuery, kernel_closed_form_n3, kernel_eval
from .nlw import Nonlinearity, RadialGrid, fixed_point_solve, half_wave, sobolev_norm
from .regions import INF, ExponentTuple, ExtendedRational
from .special import BesselOrder, bessel_j

__version__ = "0.1.0"
