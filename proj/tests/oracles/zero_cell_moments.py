"""Zero-cell directional moments E[R0(phi)^k] at intensity 1.

Independent of the C++ lens formula: the lens area is the generic
intersection of two circles with radii r1 = x, r2 = y and centre distance
d = |(x, 0) - y (cos phi, sin phi)|. Run: python3 zero_cell_moments.py
"""
from mpmath import mp, mpf, acos, sqrt, cos, pi, exp, quad, inf

mp.dps = 20


def circle_intersection(r1, r2, d):
    if d >= r1 + r2:
        return mpf(0)
    if d <= abs(r1 - r2):
        return pi * min(r1, r2) ** 2
    a1 = acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    k = sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    return r1 * r1 * a1 + r2 * r2 * a2 - k / 2


def moment(phi, k, lam=1):
    def inner(x):
        def g(y):
            d = sqrt(x * x + y * y - 2 * x * y * cos(phi))
            s = circle_intersection(x, y, d)
            return k * y ** (k - 1) * exp(-lam * (pi * y * y - s))
        return quad(g, [0, x, x + 2, inf])
    return quad(lambda x: 2 * lam * pi * x * exp(-lam * pi * x * x) * inner(x), [0, 0.5, 1, 4])


for phi_name, phi in [("pi/4", pi / 4), ("pi/2", pi / 2), ("3pi/4", 3 * pi / 4), ("pi", pi)]:
    for k in (1, 2):
        print(f"{{{mp.nstr(phi, 17)}, {k}, {mp.nstr(moment(phi, k).real, 12)}}},  // phi = {phi_name}")
