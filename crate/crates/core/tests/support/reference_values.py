"""Regenerates the high-precision reference values frozen in the Rust tests.

Run with `python3 reference_values.py`; requires mpmath. Every value is
computed at 30+ significant digits, independently of the Rust code.
"""
from mpmath import mp, mpf, gamma, loggamma, digamma, psi, hyperu, hyp1f1, euler, quad, exp, inf

mp.dps = 40


def nu_1d(ratio, n):
    """Even-sector root of -Γ(-ν)/(2Γ(1/2-ν)) = a1/b in (n, n + 1/2)."""
    f = lambda v: -gamma(-v) / (2 * gamma(mpf(1) / 2 - v)) - ratio
    lo, hi = mpf(n) + mpf("1e-35"), mpf(n) + mpf(1) / 2 - mpf("1e-35")
    for _ in range(300):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def nu_2d(ln_b_over_a, n):
    """Root of γ_E + ψ(-ν)/2 = ln(b/a2) in (n, n + 1)."""
    f = lambda v: euler + digamma(-v) / 2 - ln_b_over_a
    lo, hi = mpf(n) + mpf("1e-35"), mpf(n) + 1 - mpf("1e-35")
    for _ in range(300):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def show(label, value):
    print(f"{label} = {mp.nstr(value, 25)}")


print("# gamma")
for x in ["0.1", "2.5", "7.3", "-0.5", "-1.25", "-3.7", "-9.9", "33.3", "-20.5"]:
    g = gamma(mpf(x))
    show(f"gamma({x})", g)
print("# digamma")
for x in ["0.25", "3.0", "-0.5", "-2.3", "-7.9", "12.6", "0.001"]:
    show(f"digamma({x})", digamma(mpf(x)))
print("# trigamma")
for x in ["0.3", "-0.6", "-3.4", "25.0"]:
    show(f"trigamma({x})", psi(1, mpf(x)))
print("# tricomi U")
for a in ["-0.3", "-1.7", "0.4"]:
    for b in ["0.5", "1"]:
        for z in ["0.05", "0.8", "3", "10", "18", "30"]:
            show(f"U({a},{b},{z})", hyperu(mpf(a), mpf(b), mpf(z)))
print("# 1D roots")
for ratio in ["0.1", "0.5", "1", "2", "10"]:
    for n in range(2):
        show(f"nu1d({ratio},{n})", nu_1d(mpf(ratio), n))
print("# 2D roots")
for L in ["-1", "0", "0.5", "2", "20"]:
    for n in range(3):
        show(f"nu2d({L},{n})", nu_2d(mpf(L), n))
print("# mean square radii by quadrature")
for ratio in ["0.3", "1", "3"]:
    v = nu_1d(mpf(ratio), 0)
    f = lambda x: exp(-x * x / 2) * hyperu(-v, mpf(1) / 2, x * x)
    num = quad(lambda x: x * x * f(x) ** 2, [0, 1, 3, 12])
    den = quad(lambda x: f(x) ** 2, [0, 1, 3, 12])
    show(f"msr1d({ratio})", num / den)
for L in ["-0.5", "0", "1"]:
    v = nu_2d(mpf(L), 0)
    f = lambda r: exp(-r * r / 2) * hyperu(-v, 1, r * r)
    num = quad(lambda r: r ** 3 * f(r) ** 2, [0, mpf("0.1"), 1, 3, 12])
    den = quad(lambda r: r * f(r) ** 2, [0, mpf("0.1"), 1, 3, 12])
    show(f"msr2d({L})", num / den)
