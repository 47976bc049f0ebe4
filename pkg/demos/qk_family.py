"""m(Q_k) for Q_k = x + y + z + xy + yz + xyz + (inverses) - k.

For z <= -32 or z >= 16 the measure of Q_{z-4} is a fixed combination of two
f_3 values.  Between those points the same combination can still be evaluated
but stops being a Mahler measure; the torus integral shows where.
"""

from fractions import Fraction

from mpmath import mp

from mahler3 import mahler
from mahler3.numkernel import PrecisionContext

ctx = PrecisionContext(20)

print(f"{'z':>6} {'composition':>24} {'torus integral':>16}")
for z in (-200, -60, -40, -32, -20, -2, 16, 200):
    qmc = mahler.mahler_integral(mahler.PolyInstance("qk", float(z - 4)), samples=10 ** 6)
    try:
        value = mp.nstr(mahler.qk_mahler(Fraction(z), ctx).value, 20)
    except mahler.UnroutableError:
        a, b = mahler.qk_arguments(z)
        parts = [mahler.f_at_k(3, k, ctx).value for k in (a, b)]
        value = "(" + mp.nstr(-parts[0] / 15 + 8 * parts[1] / 15, 10) + ", invalid)"
    print(f"{z:>6} {value:>24} {float(qmc.value):>16.6f}")
