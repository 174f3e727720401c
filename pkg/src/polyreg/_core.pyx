# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the dihedral characteristic functions.

Same interface and algorithms as ``_core_py``; complex trigonometry is written
out with real sin/cos/sinh/cosh to stay independent of the C complex header.
"""
from libc.math cimport sin, cos, sinh, cosh, atan2, fabs, sqrt, ceil, isfinite

cdef enum:
    MAX_STACK = 256

DIRICHLET = 0
DIRICHLET_SLIP = 1
DIRICHLET_NORMAL = 2
DIRICHLET_TRACTION = 3
NORMAL_LITERAL = 4
TRACTION_LITERAL = 5
N_KINDS = 6


cdef inline double cabs_(double complex z) nogil:
    cdef double x = fabs(z.real), y = fabs(z.imag), t
    if x < y:
        t = x; x = y; y = t
    if x == 0.0:
        return 0.0
    t = y / x
    return x * sqrt(1.0 + t * t)


cdef inline double complex csin_(double complex z) nogil:
    return sin(z.real) * cosh(z.imag) + 1j * (cos(z.real) * sinh(z.imag))


cdef inline double complex ccos_(double complex z) nogil:
    return cos(z.real) * cosh(z.imag) - 1j * (sin(z.real) * sinh(z.imag))


cdef struct Factors:
    double complex f1
    double complex df1
    double sc1
    double complex f2
    double complex df2
    double sc2


cdef Factors eval_factors(int kind, double theta, double complex lam) nogil:
    cdef Factors r
    cdef double complex a = lam * theta
    cdef double complex sa = csin_(a), ca = ccos_(a), s2a, c2a
    cdef double st = sin(theta), s2t = sin(2.0 * theta), sign, trig, la
    trig = cabs_(sa) + cabs_(ca)
    if kind == 0 or kind == 1:
        r.f1 = sa
        r.df1 = theta * ca
    elif kind == 2 or kind == 3:
        r.f1 = ca
        r.df1 = -theta * sa
    else:
        s2a = csin_(2.0 * a)
        c2a = ccos_(2.0 * a)
        r.f1 = s2a
        r.df1 = 2.0 * theta * c2a
        trig = cabs_(s2a) + cabs_(c2a)
    r.sc1 = trig
    la = cabs_(lam)
    if kind == 0:
        r.f2 = lam * lam * st * st - sa * sa
        r.df2 = 2.0 * lam * st * st - 2.0 * theta * sa * ca
        r.sc2 = la * la * st * st + (cabs_(sa) + cabs_(ca)) ** 2
    elif kind == 3 or kind == 5:
        r.f2 = lam * lam * st * st - ca * ca
        r.df2 = 2.0 * lam * st * st + 2.0 * theta * sa * ca
        r.sc2 = la * la * st * st + (cabs_(sa) + cabs_(ca)) ** 2
    else:
        s2a = csin_(2.0 * a)
        c2a = ccos_(2.0 * a)
        sign = 1.0 if kind == 1 else -1.0
        r.f2 = lam * s2t + sign * s2a
        r.df2 = s2t + sign * 2.0 * theta * c2a
        r.sc2 = cabs_(lam * s2t) + cabs_(s2a) + cabs_(c2a)
    return r


def factors(int kind, double theta, double complex lam):
    """Return (f1, df1, scale1, f2, df2, scale2) at ``lam``."""
    cdef Factors r = eval_factors(kind, theta, lam)
    return r.f1, r.df1, r.sc1, r.f2, r.df2, r.sc2


def value(int kind, double theta, double complex lam):
    cdef Factors r = eval_factors(kind, theta, lam)
    return r.f1 * r.f2


def value_and_derivative(int kind, double theta, double complex lam):
    cdef Factors r = eval_factors(kind, theta, lam)
    return r.f1 * r.f2, r.df1 * r.f2 + r.f1 * r.df2


cdef inline bint unit_value(int kind, double theta, double complex z,
                            double complex* out, double* logd) nogil:
    cdef Factors r = eval_factors(kind, theta, z)
    cdef double m1 = cabs_(r.f1), m2 = cabs_(r.f2)
    if m1 == 0.0 or m2 == 0.0:
        return False
    out[0] = (r.f1 / m1) * (r.f2 / m2)
    logd[0] = cabs_(r.df1 / r.f1 + r.df2 / r.f2)
    return True


cdef inline double angle_between(double complex u, double complex v) nogil:
    cdef double complex q = v * u.conjugate()
    return atan2(q.imag, q.real)


def segment_phase(int kind, double theta, double complex z0, double complex z1,
                  double step, double max_jump, double min_len):
    """Continuous change of arg F along z0 -> z1; returns (phase, ok)."""
    cdef double complex za_s[MAX_STACK]
    cdef double complex ua_s[MAX_STACK]
    cdef double complex zb_s[MAX_STACK]
    cdef double complex ub_s[MAX_STACK]
    cdef double la_s[MAX_STACK]
    cdef double lb_s[MAX_STACK]
    cdef double l_prev, lb, la, lbb, lm, h, lmax
    cdef int top, i, npieces
    cdef double length = cabs_(z1 - z0), total = 0.0, d_ab, d_am, d_mb
    cdef double complex dz, a, b, u_prev, ub, za, ua, zb, ubb, zm, um
    cdef bint ok = True
    npieces = <int>ceil(length / step)
    if npieces < 1:
        npieces = 1
    dz = (z1 - z0) / npieces
    with nogil:
        if not unit_value(kind, theta, z0, &u_prev, &l_prev):
            ok = False
        i = 0
        while ok and i < npieces:
            a = z0 + dz * i
            b = z1 if i == npieces - 1 else z0 + dz * (i + 1)
            if not unit_value(kind, theta, b, &ub, &lb):
                ok = False
                break
            top = 0
            za_s[0] = a; ua_s[0] = u_prev; zb_s[0] = b; ub_s[0] = ub
            la_s[0] = l_prev; lb_s[0] = lb
            top = 1
            while top > 0:
                top -= 1
                za = za_s[top]; ua = ua_s[top]; zb = zb_s[top]; ubb = ub_s[top]
                la = la_s[top]; lbb = lb_s[top]
                zm = 0.5 * (za + zb)
                if not unit_value(kind, theta, zm, &um, &lm):
                    ok = False
                    break
                h = cabs_(zb - za)
                lmax = la
                if lbb > lmax:
                    lmax = lbb
                if lm > lmax:
                    lmax = lm
                d_ab = angle_between(ua, ubb)
                d_am = angle_between(ua, um)
                d_mb = angle_between(um, ubb)
                if (h * lmax < 2.0 * max_jump and fabs(d_ab) < max_jump
                        and fabs(d_am + d_mb - d_ab) < 1e-2):
                    total += d_ab
                    continue
                if h < min_len or top + 2 > MAX_STACK:
                    ok = False
                    break
                za_s[top] = zm; ua_s[top] = um; zb_s[top] = zb; ub_s[top] = ubb
                la_s[top] = lm; lb_s[top] = lbb
                top += 1
                za_s[top] = za; ua_s[top] = ua; zb_s[top] = zm; ub_s[top] = um
                la_s[top] = la; lb_s[top] = lm
                top += 1
            u_prev = ub
            l_prev = lb
            i += 1
    return total, ok


def newton(int kind, double theta, double complex z, int mult, double tol, int maxit):
    """Modified Newton z <- z - mult * F/F'. Returns (z, iterations, converged)."""
    cdef int it
    cdef Factors r
    cdef double complex logd, step
    cdef double az
    for it in range(maxit):
        r = eval_factors(kind, theta, z)
        if (r.f1.real == 0.0 and r.f1.imag == 0.0) or (r.f2.real == 0.0 and r.f2.imag == 0.0):
            return z, it, True
        logd = r.df1 / r.f1 + r.df2 / r.f2
        if logd.real == 0.0 and logd.imag == 0.0:
            return z, it, False
        step = mult / logd
        z = z - step
        if not (isfinite(z.real) and isfinite(z.imag)):
            return z, it, False
        az = cabs_(z)
        if cabs_(step) <= tol * (az if az > 1.0 else 1.0):
            return z, it + 1, True
    return z, maxit, False


def residual(int kind, double theta, double complex z):
    """Return (|F(z)|, local scale)."""
    cdef Factors r = eval_factors(kind, theta, z)
    return cabs_(r.f1) * cabs_(r.f2), r.sc1 * r.sc2
