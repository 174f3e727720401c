"""Pure-Python kernels for the dihedral characteristic functions.

Mirrors ``_core.pyx`` function for function. Every characteristic function is
a product of two factors; values are handled factor by factor so that phases
and Newton steps never form the (possibly overflowing) product.
"""
import cmath
import math

# kind codes shared with the compiled core
DIRICHLET = 0          # (0,0) and (3,3)
DIRICHLET_SLIP = 1     # (0,1)
DIRICHLET_NORMAL = 2   # (0,2), out-of-plane factor cos
DIRICHLET_TRACTION = 3  # (0,3), out-of-plane factor cos
NORMAL_LITERAL = 4     # (0,2) with the sin(2 lambda theta) factor
TRACTION_LITERAL = 5   # (0,3) with the sin(2 lambda theta) factor

N_KINDS = 6


def factors(kind, theta, lam):
    """Return (f1, df1, scale1, f2, df2, scale2) at ``lam``."""
    a = lam * theta
    sa = cmath.sin(a)
    ca = cmath.cos(a)
    st = math.sin(theta)
    s2t = math.sin(2.0 * theta)
    trig = abs(sa) + abs(ca)
    if kind == DIRICHLET or kind == DIRICHLET_SLIP:
        f1, df1 = sa, theta * ca
    elif kind == DIRICHLET_NORMAL or kind == DIRICHLET_TRACTION:
        f1, df1 = ca, -theta * sa
    else:
        s2a = cmath.sin(2.0 * a)
        c2a = cmath.cos(2.0 * a)
        f1, df1 = s2a, 2.0 * theta * c2a
        trig = abs(s2a) + abs(c2a)
    sc1 = trig

    if kind == DIRICHLET:
        f2 = lam * lam * st * st - sa * sa
        df2 = 2.0 * lam * st * st - 2.0 * theta * sa * ca
        sc2 = abs(lam) ** 2 * st * st + (abs(sa) + abs(ca)) ** 2
    elif kind == DIRICHLET_TRACTION or kind == TRACTION_LITERAL:
        f2 = lam * lam * st * st - ca * ca
        df2 = 2.0 * lam * st * st + 2.0 * theta * sa * ca
        sc2 = abs(lam) ** 2 * st * st + (abs(sa) + abs(ca)) ** 2
    else:
        s2a = cmath.sin(2.0 * a)
        c2a = cmath.cos(2.0 * a)
        sign = 1.0 if kind == DIRICHLET_SLIP else -1.0
        f2 = lam * s2t + sign * s2a
        df2 = s2t + sign * 2.0 * theta * c2a
        sc2 = abs(lam * s2t) + abs(s2a) + abs(c2a)
    return f1, df1, sc1, f2, df2, sc2


def value(kind, theta, lam):
    f1, _, _, f2, _, _ = factors(kind, theta, lam)
    return f1 * f2


def value_and_derivative(kind, theta, lam):
    f1, df1, _, f2, df2, _ = factors(kind, theta, lam)
    return f1 * f2, df1 * f2 + f1 * df2


def _unit(kind, theta, z):
    """Unit phase of F and |F'/F| at z, or None on an exact zero."""
    f1, df1, _, f2, df2, _ = factors(kind, theta, z)
    m1 = abs(f1)
    m2 = abs(f2)
    if m1 == 0.0 or m2 == 0.0:
        return None
    return (f1 / m1) * (f2 / m2), abs(df1 / f1 + df2 / f2)


def _angle(u, v):
    return cmath.phase(v / u)


def segment_phase(kind, theta, z0, z1, step, max_jump, min_len):
    """Continuous change of arg F along the straight segment z0 -> z1.

    Returns ``(phase, ok)``; ``ok`` is False when the walk had to refine below
    ``min_len`` or met an exact zero, i.e. F vanishes (nearly) on the segment.
    A piece is accepted only when its length times |F'/F| at its ends and midpoint stays
    below ``max_jump``, which keeps a nearby (multiple) zero from aliasing
    a full turn into a small apparent step.
    """
    length = abs(z1 - z0)
    npieces = max(1, int(math.ceil(length / step)))
    dz = (z1 - z0) / npieces
    total = 0.0
    u_prev = _unit(kind, theta, z0)
    if u_prev is None:
        return 0.0, False
    for i in range(npieces):
        a = z0 + dz * i
        b = z1 if i == npieces - 1 else z0 + dz * (i + 1)
        ub = _unit(kind, theta, b)
        if ub is None:
            return total, False
        # depth-first refinement with an explicit stack of (za, ua, zb, ub)
        stack = [(a, u_prev, b, ub)]
        while stack:
            za, ua, zb, ub_ = stack.pop()
            zm = 0.5 * (za + zb)
            um = _unit(kind, theta, zm)
            if um is None:
                return total, False
            h = abs(zb - za)
            d_ab = _angle(ua[0], ub_[0])
            if (h * max(ua[1], ub_[1], um[1]) < 2.0 * max_jump and abs(d_ab) < max_jump
                    and abs(_angle(ua[0], um[0]) + _angle(um[0], ub_[0]) - d_ab) < 1e-2):
                total += d_ab
                continue
            if h < min_len:
                return total, False
            # push the right half first so the left half is processed next
            stack.append((zm, um, zb, ub_))
            stack.append((za, ua, zm, um))
        u_prev = ub
    return total, True


def newton(kind, theta, z, mult, tol, maxit):
    """Modified Newton z <- z - mult * F/F'. Returns (z, iterations, converged)."""
    for it in range(maxit):
        f1, df1, _, f2, df2, _ = factors(kind, theta, z)
        if f1 == 0.0 or f2 == 0.0:
            return z, it, True
        logd = df1 / f1 + df2 / f2
        if logd == 0.0:
            return z, it, False
        step = mult / logd
        z = z - step
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return z, it, False
        if abs(step) <= tol * max(1.0, abs(z)):
            return z, it + 1, True
    return z, maxit, False


def residual(kind, theta, z):
    """Return (|F(z)|, local scale) with the scale the product of factor term sizes."""
    f1, _, sc1, f2, _, sc2 = factors(kind, theta, z)
    return abs(f1) * abs(f2), sc1 * sc2
