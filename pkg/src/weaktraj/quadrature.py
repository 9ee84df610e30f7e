"""Numerical quadrature used as the independent oracle for the closed forms.

The integrands here are complex Gaussians times slowly varying factors, so a
fixed-order composite Gauss-Legendre rule on a truncated domain (+- 8
effective widths unless stated otherwise) resolves them to well below the
test tolerances.  Purely oscillatory kernels (Chapman-Kolmogorov) are
integrated on a pi/4-rotated contour through the stationary point, where the
integrand decays like a real Gaussian; the rotation is exact for entire
integrands with quadratic exponents.
"""

import numpy as np

_GL_NODES_CACHE = {}


def _gl(n: int):
    if n not in _GL_NODES_CACHE:
        _GL_NODES_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_NODES_CACHE[n]


def complex_quad(f, lo: float, hi: float, n: int = 800, panels: int = 8) -> complex:
    """Composite Gauss-Legendre integral of a complex-valued vectorized f."""
    nodes, weights = _gl(n)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0 + 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        xm, xr = 0.5 * (a + b), 0.5 * (b - a)
        total += xr * np.sum(weights * f(xm + xr * nodes))
    return total


def grid_overlap(values_bra, values_ket, x) -> complex:
    """Trapezoid ``int conj(bra) ket dx`` on a shared grid."""
    return np.trapezoid(np.conj(values_bra) * values_ket, x)


def rotated_line_quad(f, x_star: float, decay_rate: float, n: int = 800,
                      panels: int = 8, half_width_sigmas: float = 10.0) -> complex:
    """Integrate an entire function along the pi/4-rotated line through x_star.

    ``int f(x) dx = e^{i pi/4} int f(x_star + e^{i pi/4} s) ds`` whenever the
    arcs at infinity vanish (true for exponents ``i w (x - x_star)^2 + ...``
    with ``w > 0``).  ``decay_rate`` is that ``w``: along the rotated line the
    integrand decays like ``exp(-w s^2)``, so the s-domain is truncated at
    ``half_width_sigmas / sqrt(w)``.
    """
    phase = np.exp(1j * np.pi / 4.0)
    half = half_width_sigmas / np.sqrt(decay_rate)
    return phase * complex_quad(lambda s: f(x_star + phase * s), -half, half,
                                n=n, panels=panels)
