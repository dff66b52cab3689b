"""Reference values for the linear cat map, computed in 50-digit arithmetic.

Run from the repository root to regenerate tests/oracles/oracle_values.hpp:

    python3 tests/oracles/linear_oracles.py > tests/oracles/oracle_values.hpp
"""
from mpmath import mp, mpf, matrix, sqrt, log, pi, sin, det, eye, fabs, frac, nint

mp.dps = 50

A = matrix([[2, 1], [1, 1]])
lam = (3 + sqrt(5)) / 2
nu_bar = 1 / lam
s_bar = -(1 + sqrt(5)) / 2
h_top = log(lam)

# unit stable eigenvector, first component positive
vs = matrix([1, s_bar])
vs = vs / sqrt(vs[0] ** 2 + vs[1] ** 2)


def fixed_count(n):
    return int(nint(fabs(det(A ** n - eye(2)))))


def trace_closed(n):
    return nu_bar ** (-n) / (1 - nu_bar ** (2 * n))


def trace_by_orbits(n):
    # every point of Fix A^n carries the same weight: |det(1 - A^n)|^{-1} times the fiber trace
    J = A ** n
    # fiber loop map s -> (J11 - J01 s)^{-1} (-J10 + J00 s) is a Moebius map with fixed slope s_bar
    w1 = J[1, 1] - J[0, 1] * s_bar
    q = 1 / w1 ** 2
    return fixed_count(n) * fabs(w1) / (fabs(2 - (J[0, 0] + J[1, 1])) * fabs(1 - q))


def det_coeffs(N, K=40):
    c = [mpf(1)] + [mpf(0)] * N
    for k in range(0, K):
        r = nu_bar ** (2 * k - 1)
        for m in range(N, 0, -1):
            c[m] -= r * c[m - 1]
    return c


def small_divisor_min(omega, K):
    best = None
    for k2 in range(0, K + 1):
        for k1 in range(-K, K + 1):
            if k1 == 0 and k2 == 0:
                continue
            if k2 == 0 and k1 < 0:
                continue
            p = max(abs(k1), k2) * fabs(k1 + omega * k2)
            if best is None or p < best[0]:
                best = (p, k1, k2)
    return best


def emit(name, v):
    print(f"inline constexpr double {name} = {mp.nstr(v, 20, strip_zeros=False)};")


def emit_array(name, vals):
    body = ", ".join(mp.nstr(v, 20, strip_zeros=False) for v in vals)
    print(f"inline constexpr double {name}[] = {{{body}}};")


print("#pragma once")
print("// Generated by tests/oracles/linear_oracles.py (mpmath, 50 digits). Do not edit.")
print()
print("namespace oracle {")
print()
emit("kLambda", lam)
emit("kNuBar", nu_bar)
emit("kSBar", s_bar)
emit("kHTop", h_top)
emit("kStableX", vs[0])
emit("kStableY", vs[1])
print()
# F(0.25, 0) at alpha = 0.3: G shears y, then A
a = mpf("0.3")
x, y = mpf("0.25"), mpf(0)
y = y - a / (2 * pi) * sin(2 * pi * x)
emit("kMapFirstAt025", frac(2 * x + y))
emit("kMapSecondAt025", frac(x + y))
print()
counts = [fixed_count(n) for n in range(1, 11)]
print("inline constexpr long kFixedCount[] = {" + ", ".join(str(c) for c in counts) + "};")
emit_array("kTrace", [trace_closed(n) for n in range(1, 11)])
emit_array("kTraceByOrbits", [trace_by_orbits(n) for n in range(1, 11)])
emit_array("kDetCoeff", det_coeffs(10))
emit_array("kResonance", [nu_bar ** (2 * k - 1) for k in range(0, 4)])
print()
# straight-line flow and its ergodic integral of cos 2 pi x1 from the origin
t = mpf("3.7")
emit("kFlowT", t)
emit("kErgodicCos", sin(2 * pi * vs[0] * t) / (2 * pi * vs[0]))
emit("kFlowUnitX", frac(vs[0]))
emit("kFlowUnitY", frac(vs[1]))
print()
rho = frac(s_bar)
emit("kRotation", rho)
emit("kRotationResidualK0", fabs(rho ** 2 + (2 - 1) * rho - 1))
print()
omega = s_bar
emit("kHomologyCoeff11", 1 / (4 * pi * fabs(1 + omega)))
emit("kDivisor85", fabs(8 + 5 * omega))
emit("kProduct85", 8 * fabs(8 + 5 * omega))
best = small_divisor_min(omega, 100)
emit("kMinProduct100", best[0])
print(f"inline constexpr int kMinProductK1 = {best[1]};")
print(f"inline constexpr int kMinProductK2 = {best[2]};")
print()
emit("kLeafSinPairing", mpf("0.4") * 2 / pi)
print()
print("}  // namespace oracle")
