"""Small numerical helpers shared by several modules."""

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def composite_gauss(f, a, b, max_width=0.05):
    """Integrate a smooth ``f`` over ``[a, b]`` with panel-wise 16-point Gauss-Legendre.

    ``f`` must accept an array.  Returns a signed integral (``b < a`` allowed).
    """
    if a == b:
        return 0.0
    npanel = max(1, int(np.ceil(abs(b - a) / max_width)))
    edges = np.linspace(a, b, npanel + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.asarray(f(x.ravel())).reshape(x.shape)
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))


def cumulative_gauss(f, targets, origin, breakpoints=(), max_width=0.05):
    """Return ``int_origin^t f`` for every ``t`` in ``targets`` (signed).

    The integration path from ``origin`` is cut at every target and at every
    breakpoint, so ``f`` only needs to be smooth between consecutive cuts.
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    out = np.empty_like(targets)
    for side in (1.0, -1.0):
        mask = (targets - origin) * side > 0
        if not np.any(mask):
            continue
        cuts = [t for t in breakpoints if (t - origin) * side > 0]
        knots = np.unique(np.concatenate([[origin], targets[mask], cuts]))
        if side < 0:
            knots = knots[::-1]
        pieces = [composite_gauss(f, knots[i], knots[i + 1], max_width)
                  for i in range(len(knots) - 1)]
        acc = np.concatenate([[0.0], np.cumsum(pieces)])
        lookup = dict(zip(knots.tolist(), acc.tolist()))
        out[mask] = [lookup[t] for t in targets[mask].tolist()]
    out[targets == origin] = 0.0
    return out


def log_sum(terms):
    """Sum complex numbers given as ``(log_abs, phase)`` pairs without underflow.

    Returns ``(log_abs, phase)`` of the sum; ``log_abs`` is ``-inf`` for an exact zero.
    """
    terms = [(la, ph) for la, ph in terms if np.isfinite(la)]
    if not terms:
        return -np.inf, 0.0
    top = max(la for la, _ in terms)
    z = sum(np.exp(la - top) * np.exp(1j * ph) for la, ph in terms)
    if z == 0:
        return -np.inf, 0.0
    return top + float(np.log(abs(z))), float(np.angle(z))


def from_log(log_abs, phase=0.0):
    """Convert ``(log_abs, phase)`` to a complex number (may underflow to 0)."""
    if not np.isfinite(log_abs):
        return 0j
    return complex(np.exp(log_abs) * np.exp(1j * phase))


def flux_phase(xi0, h):
    """``pi * xi0 / h`` reduced to ``(-pi, pi]``; exact for shifts of ``xi0`` by ``h``."""
    t = np.remainder(xi0 / h, 2.0)
    if t > 1.0:
        t -= 2.0
    return float(np.pi * t)
