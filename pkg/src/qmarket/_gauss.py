"""Closed-form moments of complex Gaussian integrands.

Every integral in the package reduces to

    I_n = int x**n * exp(-A x**2 + B x + C) dx

over the real line, with ``A > 0`` real and ``B``, ``C`` complex. The
helpers broadcast over numpy arrays.
"""

import numpy as np
from scipy.special import erfc


def gauss_moment(n, A, B, C=0.0):
    """Return ``I_n`` for n in {0, 1, 2}."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B)
    base = np.sqrt(np.pi / A) * np.exp(B * B / (4.0 * A) + C)
    if n == 0:
        return base
    mean = B / (2.0 * A)
    if n == 1:
        return base * mean
    if n == 2:
        return base * (mean * mean + 1.0 / (2.0 * A))
    raise ValueError(f"moment order {n} not supported")


def gauss_upper_tail(x, A, B, C=0.0):
    """``int_x^inf exp(-A t**2 + B t + C) dt`` for real ``B`` and ``C``."""
    A = np.asarray(A, dtype=float)
    m = np.asarray(B, dtype=float) / (2.0 * A)
    scale = np.sqrt(np.pi / A) * np.exp(np.asarray(B, dtype=float) ** 2 / (4.0 * A) + C)
    return 0.5 * scale * erfc(np.sqrt(A) * (np.asarray(x, dtype=float) - m))
