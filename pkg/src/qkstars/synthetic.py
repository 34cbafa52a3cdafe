"""Synthetic star catalogue with the giants/dwarfs CSV schema.

Stars are drawn around a rough main sequence (dwarfs) and red-giant branch
(giants) in the colour/absolute-magnitude plane, then given parallaxes and
apparent magnitudes. The ``Amag`` column follows the catalogue-file
convention ``Vmag + 5 (log10(Plx_mas) + 1)``, i.e. true absolute magnitude
plus 15. Useful for tests, demos and timing when the real file is absent.
"""

from __future__ import annotations

import numpy as np

from .data import StarRecord

# B-V upper edges of the Harvard classes
_CLASS_EDGES = [(-0.30, "O"), (-0.02, "B"), (0.30, "A"), (0.58, "F"), (0.81, "G"), (1.40, "K")]


def spectral_letter(bv: float) -> str:
    for edge, letter in _CLASS_EDGES:
        if bv < edge:
            return letter
    return "M"


def synthetic_catalogue(n: int, seed: int = 0, giant_fraction: float = 0.5,
                        dirty: bool = False) -> list[StarRecord]:
    """``n`` synthetic :class:`StarRecord` rows.

    With ``dirty=True`` about 3% of rows get a duplicate, a blank field or a
    non-positive parallax so the cleaning path has something to do.
    """
    rng = np.random.default_rng(seed)
    giant = rng.random(n) < giant_fraction
    bv = np.where(
        giant,
        np.clip(rng.normal(1.05, 0.28, n), -0.25, 2.0),
        np.clip(rng.normal(0.65, 0.38, n), -0.35, 1.9),
    )
    m_abs = np.where(
        giant,
        2.6 - 1.4 * bv + rng.normal(0.0, 1.1, n),
        0.9 + 4.4 * bv + rng.normal(0.0, 1.2, n),
    )
    plx = np.exp(rng.normal(np.log(8.0), 0.7, n))  # mas
    vmag = m_abs - 5.0 * np.log10(plx * 1e-3) - 5.0
    e_plx = rng.uniform(0.5, 1.6, n)
    amag_file = vmag + 5.0 * (np.log10(plx) + 1.0)

    rows = []
    for k in range(n):
        letter = spectral_letter(bv[k])
        sub = int(rng.integers(0, 10))
        lum = "III" if giant[k] else "V"
        rows.append(StarRecord(
            Vmag=round(float(vmag[k]), 2),
            Plx=round(float(plx[k]), 2),
            e_Plx=round(float(e_plx[k]), 2),
            BV=round(float(bv[k]), 3),
            SpType=f"{letter}{sub}{lum}",
            Amag=round(float(amag_file[k]), 6),
            TargetClass=int(giant[k]),
        ))
    if dirty and n >= 10:
        k = max(1, n // 100)
        for i in rng.choice(n, size=k, replace=False).tolist():
            rows.append(rows[i])
        for i in rng.choice(n, size=k, replace=False).tolist():
            r = rows[i]
            rows[i] = StarRecord(r.Vmag, r.Plx, r.e_Plx, None, r.SpType, r.Amag, r.TargetClass)
        for i in rng.choice(n, size=k, replace=False).tolist():
            r = rows[i]
            rows[i] = StarRecord(r.Vmag, -abs(r.Plx), r.e_Plx, r.BV, r.SpType, r.Amag, r.TargetClass)
    return rows
