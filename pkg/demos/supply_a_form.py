"""Checking a numerically observed formula with a user-supplied newform.

f_2(-64) = 2 (L'(g, 0) + L'(chi_-4, -1)) for a weight-3 form g of level 32 that
the library does not know.  Twisting the level-8 form f by chi_-4 produces it:
export f, twist, write a coefficient file, and hand it to the verifier.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from mahler3 import lseries, verify

M = 600
f = lseries.builtin_forms()["f"].coefficients(M)


def chi_m4(n):
    return 0 if n % 2 == 0 else (1 if n % 4 == 1 else -1)


rows = ["# g32 32 3 -8 1 twist of f by chi_-4"]
rows += [f"{n} {f[n] * chi_m4(n)}" for n in range(1, M + 1)]

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "g32.txt"
    path.write_text("\n".join(rows) + "\n")

    print("without the file:")
    print(verify.run_identity("S4-f2m64", 20).to_json())

    print("\nwith it, through the command line:")
    cmd = [sys.executable, "-m", "mahler3", "verify", "run", "--id", "S4-f2m64",
           "--coeff-file", str(path), "--digits", "25", "--json", "-"]
    print(subprocess.run(cmd, capture_output=True, text=True).stdout)
