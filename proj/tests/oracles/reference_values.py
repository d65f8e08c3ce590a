"""Frozen reference values for the unit tests, computed in high precision with mpmath.

Run from the repository root:

    python3 tests/oracles/reference_values.py > tests/oracles/reference_values.inc

Every value is produced by direct series summation, with the working precision
raised above the magnitude of the largest term so alternating cancellation is
absorbed, independently of the library's series/contour dispatch.
"""

import mpmath as mp

mp.mp.dps = 80


def alternating_sum(term, max_terms=20000):
    """Sum term(j) at a precision 40 digits above the largest |term|."""
    # Terms can vanish at poles of the reciprocal gamma, so a single small term
    # never ends the sum; ten in a row do.
    with mp.workdps(30):
        peak = mp.mpf(0)
        run = 0
        for j in range(max_terms):
            t = abs(term(j))
            peak = max(peak, t)
            run = run + 1 if t < mp.mpf(10) ** -40 * peak else 0
            if j > 20 and run >= 10:
                break
        extra = max(0, int(mp.log10(peak + 1))) if peak > 0 else 0
    with mp.workdps(60 + extra):
        s = mp.mpf(0)
        run = 0
        for j in range(max_terms):
            t = term(j)
            s += t
            small = abs(t) < mp.mpf(10) ** -(60 + extra) * max(abs(s), mp.mpf(10) ** -300)
            run = run + 1 if small else 0
            if j > 20 and run >= 10:
                break
        return +s


def prabhakar_direct(eta, nu, tau, w):
    w = mp.mpf(w)
    return alternating_sum(lambda j: mp.rf(tau, j) * w ** j * mp.rgamma(eta * mp.mpf(j) + nu) / mp.factorial(j))


def wright(xi, omega, z):
    z = mp.mpf(z)
    return alternating_sum(lambda r: z ** r * mp.rgamma(xi * mp.mpf(r) + omega) / mp.factorial(r))


def gfpd_pmf(alpha, beta, delta, mu, x):
    mu = mp.mpf(mu)
    pre = mp.gamma(beta) / mp.gamma(delta) * mp.gamma(delta + x) / mp.factorial(x) * mu ** x
    return pre * prabhakar_direct(alpha, alpha * x + beta, delta + x, -mu)


def eta(alpha, beta, gamma, nu, lam, terms=3000):
    s = mp.mpf(0)
    for k in range(terms):
        t = mp.mpf(lam) ** k / mp.factorial(k) * mp.gamma(k + gamma) / mp.gamma(alpha * k + beta) ** nu
        s += t
        if k > 30 and t < mp.mpf(10) ** -70 * s:
            break
    return s


def emit(name, args, value):
    print("    {\"%s\", {%s}, %s}," % (name, ", ".join(mp.nstr(mp.mpf(a), 17) for a in args), mp.nstr(value, 17)))


print("// Generated by tests/oracles/reference_values.py; do not edit by hand.")
print("// name, arguments, value")

for a in [(0.5, 1, 1, -1), (0.5, 1, 1, -4), (0.3, 0.9, 3, -5), (0.9, 1, 1, -20), (0.6, 0.6, 0.5, -2),
          (0.8, 1.2, 2.5, 3.0), (1, 1, 1, -20), (0.7, 1.5, 1.3, -8)]:
    emit("prabhakar", a, prabhakar_direct(*a))

for a in [(-0.5, 0.5, -1.5), (0.5, 1, 2), (-0.3, 0.7, -1.0), (-0.7, 0.3, -0.5), (1, 1, 3)]:
    emit("wright", a, wright(*a))

# M_alpha(y) = phi(-alpha, 1 - alpha; -y)
for al, y in [(0.3, 1), (0.7, 0.5), (0.7, 5), (0.5, 2), (0.9, 0.5), (0.2, 3)]:
    emit("m_wright", (al, y), wright(-al, 1 - al, -y))

for al, be, de, mu, x in [(0.5, 1, 1, 1, 0), (0.5, 1, 1, 1, 3), (0.75, 1, 1, 3, 0), (0.75, 1, 1, 3, 2),
                          (0.75, 1, 1, 3, 5), (0.9, 1, 1, 20, 18), (0.9, 1, 1, 20, 25), (0.6, 0.9, 1.2, 2, 1),
                          (0.6, 0.9, 1.2, 2, 4), (0.7, 0.7, 1, 2, 0), (0.7, 0.7, 1, 2, 3), (0.3, 0.6, 1, 5, 7),
                          (0.85, 1, 1, 3.6, 4)]:
    emit("gfpd_pmf", (al, be, de, mu, x), gfpd_pmf(al, be, de, mu, x))

for a in [(1, 1, 1, 2, 1), (1, 1, 1, 1, 2), (0.6, 1.2, 0.7, 1.4, 2.0), (1, 0.5, 0.5, 0.1, 0.5), (1, 2, 1, 1, 3),
          (0.5, 1, 1, 1, 2), (1, 1.5, 0.8, 1, 2)]:
    emit("eta", a, eta(*a))
