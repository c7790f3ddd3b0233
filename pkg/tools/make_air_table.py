"""Regenerate the dry-air property table shipped in ``irtumap/data``.

Viscosity follows Sutherland's law, conductivity the 1976 US Standard
Atmosphere formula, density the ideal-gas law at 101325 Pa. Specific heat is
interpolated from tabulated values (1.006-1.014 kJ/(kg K) over 200-400 K).

Usage: python3 tools/make_air_table.py > src/irtumap/data/dry_air_1atm_v1.csv
"""
import numpy as np

P_ATM = 101325.0
R_AIR = 287.05

CP_T = [200.0, 250.0, 300.0, 350.0, 400.0]
CP = [1007.0, 1006.0, 1007.0, 1009.0, 1014.0]


def main():
    print("# dry-air 1atm v1")
    for t in np.arange(200.0, 400.0 + 1e-9, 10.0):
        mu = 1.458e-6 * t**1.5 / (t + 110.4)
        k = 2.64638e-3 * t**1.5 / (t + 245.4 * 10.0 ** (-12.0 / t))
        rho = P_ATM / (R_AIR * t)
        cp = np.interp(t, CP_T, CP)
        nu = mu / rho
        pr = cp * mu / k
        print(f"{t:.1f},{k:.6g},{nu:.6g},{pr:.5g}")


if __name__ == "__main__":
    main()
