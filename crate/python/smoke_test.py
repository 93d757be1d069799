"""Smoke test for the `lops` extension module.

Build it first with `pip install --no-build-isolation -e crates/py`, then run
`python python/smoke_test.py`.
"""

from fractions import Fraction
from pathlib import Path

import lops

ROOT = Path(__file__).resolve().parent.parent


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    return bool(cond)


def main():
    results = []

    p = lops.Poly("(xi0 + xi1)*(xi0 - xi1)")
    results.append(check(p == lops.Poly("xi0^2 - xi1^2"), "difference of squares"))
    results.append(check(p.xi_degree() == 2, "covector degree"))
    results.append(check(p.eval({"xi0": 3, "xi1": Fraction(1, 2)}) == "35/4", "exact evaluation"))
    s = lops.Poly("F + q")
    results.append(check((s ** 3).exact_div(s * s) == s, "exact division"))
    results.append(check(s.substitute({"q": 0}) == lops.Poly("F"), "substitution"))

    try:
        lops.Poly("xi0 +")
        results.append(check(False, "parse error raises"))
    except lops.LopsError:
        results.append(check(True, "parse error raises"))

    ens = lops.System.ens()
    results.append(check(ens.total_order == 44, "reference total order"))
    results.append(check(sum(k for _, k, _ in ens.unknowns) == 25, "25 unknown components"))

    wave = lops.System.from_file(ROOT / "crates/core/data/wave.lops")
    report = wave.analyze(samples=200)
    results.append(check(report["pass"], "wave equation analysis passes"))

    cones = lops.cones("light", n=20)
    results.append(check(abs(cones["max_abs_root"] - 1.0) < 1e-12, "light cone speed is one"))
    p1 = lops.cones("P1", n=200, q="1/2", f=2)
    results.append(check(p1["inside_light_cone"], "P1 roots inside the light cone"))

    lab = lops.lab_run()
    identities = [r for r in lab["rows"] if r["kind"] == "identity"]
    results.append(
        check(all(3.5 <= r["levels"][1]["ratio"] <= 4.5 for r in identities), "lab identities converge at second order")
    )

    if not all(results):
        raise SystemExit(1)
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
