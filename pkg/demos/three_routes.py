"""f_2(64) three ways, against 8 L'(h, 0).

The G-series at q = e^(-pi) and the L-value agree to the full target.  The
5F4 series sits exactly on its circle of convergence here, so it goes through
Levin-u, which stalls in the high 30s of digits; it is run at 30.  The torus
integral gives 2-3 digits.
"""

from mpmath import mp

from mahler3 import lseries, mahler, qseries
from mahler3.numkernel import PrecisionContext

ctx = PrecisionContext(40)
tau = qseries.CMPoint.sqrt_neg(1, 2)

gs = mahler.f_gseries(2, tau, ctx)
hy = mahler.f_hyper(2, 64, PrecisionContext(30))
lp = lseries.newform_lprime0(lseries.builtin_forms()["h"], ctx)
qmc = mahler.mahler_integral(mahler.PolyInstance("f2", 64.0), samples=10 ** 6)

with mp.workdps(45):
    print("s_2(q)          ", mp.nstr(gs.s_value, 40))
    print("G-series        ", mp.nstr(gs.value, 40))
    print("8 L'(h,0)       ", mp.nstr(8 * lp.value, 40), f"[{lp.method}]")
    print("5F4 at x = 1    ", mp.nstr(hy.value, 40), f"[{hy.route}]")
    print("torus integral  ", mp.nstr(qmc.value, 10), "+-", mp.nstr(qmc.error_estimate, 2))
    print("G-series - L    ", mp.nstr(gs.value - 8 * lp.value, 3))
