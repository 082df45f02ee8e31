#!/usr/bin/env python3
"""Derive the C1 contraction table G_ij = (1+z zbar)^2 (dzbar x_i)(dz x_j)
as ambient polynomials and write it to src/btq/data/c1_table.json.

Independent symbolic route: differentiate the chart expressions of the
coordinates exactly with sympy, then match against the degree<=2 ambient
monomial basis (x1-power <= 1, i.e. normal form) by coefficient comparison
in (z, zbar).  No hand-derived sign enters.
"""

import json
import pathlib

import sympy as sp

z, zb = sp.symbols("z zbar")
u = 1 + z * zb
X = [(z + zb) / u, -sp.I * (z - zb) / u, (1 - z * zb) / u]

# ambient monomial basis in normal form through degree 2
BASIS = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1),
         (1, 1, 0), (1, 0, 1), (0, 1, 1), (0, 2, 0), (0, 0, 2)]


def monomial_chart(e):
    a, b, c = e
    return X[0] ** a * X[1] ** b * X[2] ** c


def to_ambient(expr):
    """Solve expr = sum kappa_e * monomial_e on the sphere for the kappas."""
    kappas = sp.symbols(f"k0:{len(BASIS)}")
    ansatz = sum(k * monomial_chart(e) for k, e in zip(kappas, BASIS))
    diff = sp.expand(sp.simplify((expr - ansatz) * u ** 2))
    poly = sp.Poly(diff, z, zb)
    sol = sp.solve(poly.coeffs(), kappas, dict=True)
    if len(sol) != 1:
        raise RuntimeError(f"ambient matching not unique: {sol}")
    return {e: complex(sol[0].get(k, 0)) for k, e in zip(kappas, BASIS)}


def main():
    table = []
    for i in range(3):
        row = []
        for j in range(3):
            gij = sp.simplify(u ** 2 * sp.diff(X[i], zb) * sp.diff(X[j], z))
            coeffs = to_ambient(gij)
            row.append({"terms": [
                {"e": list(e), "re": c.real, "im": c.imag}
                for e, c in sorted(coeffs.items()) if c != 0]})
        table.append(row)
    out = pathlib.Path(__file__).resolve().parents[1] / "src/btq/data/c1_table.json"
    out.write_text(json.dumps({"G": table}, indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
