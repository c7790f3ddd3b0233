"""Independent reference computations used to freeze expected values.

Nothing here imports the package: properties are read straight from the CSV
with the csv module and interpolated by hand, and the correlations are
written out in plain ``math``.
"""

import csv
import math
from bisect import bisect_right
from pathlib import Path

TABLE = Path(__file__).resolve().parents[1] / "src" / "irtumap" / "data" / "dry_air_1atm_v1.csv"
SIGMA = 5.67e-8
G = 9.80665


def read_table():
    with open(TABLE) as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return [tuple(float(x) for x in r) for r in rows]


def props(t):
    rows = read_table()
    ts = [r[0] for r in rows]
    i = bisect_right(ts, t) - 1
    i = min(max(i, 0), len(rows) - 2)
    (t0, k0, n0, p0), (t1, k1, n1, p1) = rows[i], rows[i + 1]
    w = (t - t0) / (t1 - t0)
    return k0 + w * (k1 - k0), n0 + w * (n1 - n0), p0 + w * (p1 - p0)


def nusselt(ra, pr):
    psi = (1.0 + (0.492 / pr) ** (9.0 / 16.0)) ** (8.0 / 27.0)
    return (0.825 + 0.387 * ra ** (1.0 / 6.0) / psi) ** 2


def pixel(t_s_out, t_out, eps, L):
    """Hand evaluation of the exterior flux chain for one pixel."""
    tm = 0.5 * (t_s_out + t_out)
    k, nu, pr = props(tm)
    ra = G * (1.0 / tm) * abs(t_s_out - t_out) * L**3 / nu**2 * pr
    nu_n = nusselt(ra, pr)
    h = nu_n * k / L
    q_r = eps * SIGMA * (t_s_out**4 - t_out**4)
    q_c = h * (t_s_out - t_out)
    return dict(t_m=tm, k=k, nu=nu, pr=pr, ra=ra, nusselt=nu_n, h=h, q_r=q_r, q_c=q_c, q=q_r + q_c)


def area_mean_bruteforce(values, out_rows, out_cols):
    """Supersample every source cell onto the common refinement grid and average."""
    src_rows, src_cols = len(values), len(values[0])
    fine_r, fine_c = src_rows * out_rows, src_cols * out_cols
    out = [[0.0] * out_cols for _ in range(out_rows)]
    for fr in range(fine_r):
        for fc in range(fine_c):
            out[fr // src_rows][fc // src_cols] += values[fr // out_rows][fc // out_cols]
    n = src_rows * src_cols
    return [[v / n for v in row] for row in out]


if __name__ == "__main__":
    p = pixel(283.0, 278.0, 0.95, 2.4)
    for key, value in p.items():
        print(f"{key} = {value!r}")
    print("U_wall =", repr(p["q"] / (292.5 - 283.0)))
    print("U_total(3.209) =", repr(1.0 / (1.0 / 3.209 + 0.15)))
    print("Nu(1e9, 0.71) =", repr(nusselt(1e9, 0.71)))
    print("h(122.8, .02624, 2.4) =", repr(122.8 * 0.02624 / 2.4))
    print("q(h=1.343) =", repr(0.95 * SIGMA * (283.0**4 - 278.0**4) + 1.343 * 5.0))
    print("props(300) =", props(300.0))
    print("Ra spec props =", repr(G / 280.5 * 5 * 2.4**3 / 1.42e-5**2 * 0.713))
