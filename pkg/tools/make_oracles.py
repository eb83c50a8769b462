"""Regenerate tests/data/oracles.json from mpmath at 40 digits.

The values are independent of the package: Airy data come from mpmath's own
implementation and expansion coefficients from adaptive quadrature of the
overlap integral.
"""
import json
import os

import mpmath as mp

mp.mp.dps = 40

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "oracles.json")


def f(x):
    return float(x)


def coefficient(n, z0, sigma):
    zn = -mp.airyaizero(n)
    norm = 1 / abs(mp.airyai(-zn, 1))
    pref = (2 / (mp.pi * sigma ** 2)) ** mp.mpf(0.25)
    g = lambda z: norm * mp.airyai(z - zn) * pref * mp.exp(-((z - z0) / sigma) ** 2)
    lo = max(0, z0 - 12 * sigma)
    pts = mp.linspace(lo, z0 + 12 * sigma, 25)
    return mp.quad(g, pts)


def main():
    xs = [-150.5, -60.25, -20.0, -9.75, -9.0, -5.3, -2.338, -1.0, 0.0, 0.3, 1.7,
          4.9, 8.99, 9.01, 15.0, 40.0, 95.0]
    airy = [{"x": x, "ai": f(mp.airyai(x)), "aip": f(mp.airyai(x, 1))} for x in xs]
    ns = [1, 2, 3, 10, 50, 100, 212, 213, 300, 500]
    zeros = [{"n": n, "z": f(-mp.airyaizero(n)),
              "aip": f(abs(mp.airyai(mp.airyaizero(n), 1)))} for n in ns]
    coef = []
    for n in (150, 190, 205, 212, 215, 230, 260, 300, 350):
        coef.append({"n": n, "z0": 100, "sigma": 1, "c": f(coefficient(n, 100, 1))})
    for n in (40, 60, 80):
        coef.append({"n": n, "z0": 30, "sigma": 2, "c": f(coefficient(n, 30, 2))})
    # Gaussian Renyi entropy of a density with standard deviation s
    s = mp.mpf("0.5")
    renyi = []
    for a in ("2/3", "4/5", "2", "4/3"):
        a_ = mp.mpf(mp.fraction(*map(int, a.split("/")))) if "/" in a else mp.mpf(a)
        val = mp.log(2 * mp.pi * s ** 2) / 2 - mp.log(a_) / (2 * (1 - a_))
        renyi.append({"alpha": a, "s": f(s), "value": f(val)})
    shannon = {"s": f(s), "value": f(mp.log(2 * mp.pi * mp.e * s ** 2) / 2)}
    doc = {
        "ai0": f(mp.airyai(0)), "aip0": f(mp.airyai(0, 1)),
        "airy": airy, "zeros": zeros, "coefficients": coef,
        "gaussian_renyi": renyi, "gaussian_shannon": shannon,
        "shannon_bound": f(1 + mp.log(mp.pi)),
    }
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
