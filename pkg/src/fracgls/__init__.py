"""Numerical toolkit for fractional Sobolev embeddings and grand Lebesgue spaces."""

__version__ = "0.1.0"

from .constants import (  # noqa: E402
    ExponentPair,
    L_alpha,
    Z_bounds,
    conformal_pair,
    conformal_sharp_constant,
    g_alpha_n,
    inverse_p,
    sharp_constant_K,
    sobolev_q,
)
from .glspaces import PsiFunction, SweepGrid, TauFunction, dgl_norm, gls_norm, sgl_norm  # noqa: E402
from .norms import (  # noqa: E402
    HALF_LINE,
    ConvexDomain,
    NormResult,
    apply_frac_laplacian,
    delta_seminorm,
    frac_sobolev_norm,
    lp_norm,
    slobodetskii_norm,
    weighted_lp_norm,
)
from .testfuncs import TestFunction, bubble, bump, dilate, gaussian  # noqa: E402
from .verify import SlackRecord, check_sobolev, sharpness_probe  # noqa: E402

__all__ = [
    "__version__",
    "ExponentPair", "L_alpha", "Z_bounds", "conformal_pair", "conformal_sharp_constant",
    "g_alpha_n", "inverse_p", "sharp_constant_K", "sobolev_q",
    "PsiFunction", "SweepGrid", "TauFunction", "dgl_norm", "gls_norm", "sgl_norm",
    "HALF_LINE", "ConvexDomain", "NormResult", "apply_frac_laplacian", "delta_seminorm",
    "frac_sobolev_norm", "lp_norm", "slobodetskii_norm", "weighted_lp_norm",
    "TestFunction", "bubble", "bump", "dilate", "gaussian",
    "SlackRecord", "check_sobolev", "sharpness_probe",
]
