"""Coefficient files for the five numerically observed formulas.

The library never ships these forms.  Here they are built the way a user
would build them before exporting a file: as twists of known CM forms, as
theta series over the two ideal classes of an imaginary quadratic field, or
directly from a Hecke character on the Gaussian integers.  Each construction
was identified by matching L'(g, 0) against the Mahler-measure side.
"""

from __future__ import annotations

import math

from mahler3 import lattice, lseries

COUNT = 600


def _chi_m4(n):
    return 0 if n % 2 == 0 else (1 if n % 4 == 1 else -1)


def _chi_8(n):
    return 0 if n % 2 == 0 else (1 if n % 8 in (1, 7) else -1)


def _twist(label, chi, M):
    a = lseries.builtin_forms()[label].coefficients(M)
    return [0] + [a[n] * chi(n) for n in range(1, M + 1)]


def _two_class_theta(d, sign, M):
    """Theta series of a weight-3 Hecke character of Q(sqrt(-d)), d = 1 mod 4, class number 2.

    Principal class: (m^2 - d n^2)/2 at q^(m^2 + d n^2).  The ideal P = (2, 1 + sqrt(-d))
    holds mu = (2u + v) + v sqrt(-d) with N(mu) = 2(2u^2 + 2uv + (1+d)/2 v^2); the class
    of P contributes sign * Re(mu^2)/4 at q^(N(mu)/2).
    """
    e = (1 - d) // 2
    spec = lattice.ThetaFormSpec((
        lattice.ThetaTerm((1, 0, -d), lattice.QuadForm(1, 0, d)),
        lattice.ThetaTerm((2 * sign, 2 * sign, e * sign), lattice.QuadForm(2, 2, (1 + d) // 2)),
    ))
    return list(lattice.theta_coeffs(spec, M).coefficients)


def _gaussian_conductor3(M):
    """Character psi(alpha) = eps(alpha mod 3) alpha^2 on Z[i], eps(1+i) = i."""
    log = {}
    x = (1, 0)
    for e in range(8):
        log[x] = e
        x = ((x[0] - x[1]) % 3, (x[0] + x[1]) % 3)
    acc = [0j] * (M + 1)
    r = math.isqrt(M) + 1
    for u in range(-r, r + 1):
        for v in range(-r, r + 1):
            n = u * u + v * v
            if n == 0 or n > M or n % 3 == 0:
                continue
            acc[n] += 1j ** log[(u % 3, v % 3)] * complex(u, v) ** 2
    out = []
    for z in acc:
        assert abs(z.imag) < 1e-6 and abs(z.real / 4 - round(z.real / 4)) < 1e-6
        out.append(int(round(z.real / 4)))
    return out


def build(label: str, M: int = COUNT) -> tuple[list[int], int, int]:
    """(coefficients a(0..M), level, character)."""
    if label == "g32":
        return _twist("f", _chi_m4, M), 32, -8
    if label == "g64":
        return _twist("h", _chi_8, M), 64, -4
    if label == "g20":
        return _two_class_theta(5, -1, M), 20, -20
    if label == "g52":
        return _two_class_theta(13, -1, M), 52, -52
    if label == "g36":
        return _gaussian_conductor3(M), 36, -4
    raise KeyError(label)


def write(label: str, path, M: int = COUNT) -> None:
    a, N, D = build(label, M)
    rows = [f"# {label} {N} 3 {D} 1 test fixture"]
    rows += [f"{k} {a[k]}" for k in range(1, M + 1)]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


LABELS = ("g32", "g64", "g20", "g36", "g52")
