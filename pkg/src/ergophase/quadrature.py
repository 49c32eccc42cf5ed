"""Quadrature for oscillatory integrands with a known phase function."""

import math

import numpy as np
from scipy import integrate

__all__ = ['phase_panels', 'oscillatory_quad', 'fourier_tail']


def phase_panels(phase, a, b, max_step=math.pi / 2, max_depth=40):
    """Breakpoints of [a, b] such that ``phase`` changes by < ``max_step`` per panel.

    Panels are bisected until both halves satisfy the bound, which also
    catches non-monotone phases inside a panel.
    """
    out = [a]

    def split(lo, hi, plo, phi, depth):
        mid = 0.5 * (lo + hi)
        pmid = phase(mid)
        ok = abs(pmid - plo) < max_step / 2 and abs(phi - pmid) < max_step / 2
        if ok or depth >= max_depth:
            out.append(hi)
            return
        split(lo, mid, plo, pmid, depth + 1)
        split(mid, hi, pmid, phi, depth + 1)

    split(a, b, phase(a), phase(b), 0)
    return np.array(out)


def _quad_complex(f, lo, hi, rtol, atol):
    re, e1 = integrate.quad(lambda t: f(t).real, lo, hi, epsabs=atol, epsrel=rtol, limit=200)
    im, e2 = integrate.quad(lambda t: f(t).imag, lo, hi, epsabs=atol, epsrel=rtol, limit=200)
    return re, im, e1 + e2


def oscillatory_quad(f, a, b, phase, rtol=1e-10, atol=0.0):
    """Integral of a complex ``f`` over [a, b] on phase-resolved panels.

    Each panel is integrated with adaptive Gauss-Kronrod (QUADPACK) on the
    real and imaginary parts; panel results are combined with ``math.fsum``
    so the sum does not depend on accumulation order.

    Returns
    -------
    value : complex
    abserr : float
        Sum of the panel error estimates.
    """
    edges = phase_panels(phase, a, b)
    res_re, res_im, errs = [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        re, im, err = _quad_complex(f, lo, hi, rtol, atol)
        res_re.append(re)
        res_im.append(im)
        errs.append(err)
    return complex(math.fsum(res_re), math.fsum(res_im)), math.fsum(errs)


def fourier_tail(g, a, omega, atol=1e-12):
    """int_a^inf g(t) exp(i omega t) dt for a slowly varying, decaying ``g``.

    Uses QUADPACK's QAWF Fourier-integral routine (``quad`` with an infinite
    upper limit and a cos/sin weight), which works to the absolute
    tolerance ``atol`` only. ``omega`` must be nonzero.

    Returns
    -------
    value : complex
    abserr : float
    """
    if omega == 0:
        raise ValueError("omega must be nonzero")
    sgn = 1.0 if omega > 0 else -1.0
    w = abs(omega)
    parts = {}
    errs = []
    for name, comp in (('re', lambda t: g(t).real), ('im', lambda t: g(t).imag)):
        for weight in ('cos', 'sin'):
            val, err = integrate.quad(comp, a, np.inf, weight=weight, wvar=w,
                                      epsabs=atol, limlst=200)
            parts[name, weight] = val
            errs.append(err)
    # g e^{i s w t} = (gr + i gi)(cos + i s sin)
    re = parts['re', 'cos'] - sgn * parts['im', 'sin']
    im = parts['im', 'cos'] + sgn * parts['re', 'sin']
    return complex(re, im), math.fsum(errs)
