"""Smoke test for the polydisc_py extension.

Build and install first:
    pip install --no-build-isolation crates/polydisc-py
then run:
    python3 python/smoke_test.py
"""

import cmath
import json
import math
import random

import polydisc_py as pd

LEMMA = [2.5, 1.25, 0.5]
FAMILY = [1.5, 0.75, 0.5]


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    # strict inclusion: in G~_3, not in G_3, Costara sup not below 1
    assert pd.in_tilde_g(LEMMA)
    assert not pd.in_g(LEMMA)
    assert pd.costara_sup(LEMMA) >= 1.0

    rep = pd.membership_report("tilde_gamma", FAMILY)
    assert rep["verdict"] and rep["set_id"] == "TildeGamma"

    # forward oracle: symmetrized polydisc points
    rng = random.Random(7)
    for n in range(2, 7):
        z = [cmath.rect(rng.random() ** 0.5 * 0.99, rng.uniform(0, 2 * math.pi)) for _ in range(n)]
        s = pd.symmetrize(z)
        assert pd.in_g(s) and pd.in_gamma(s)
        t = [cmath.rect(1.0, rng.uniform(0, 2 * math.pi)) for _ in range(n)]
        assert pd.in_b_gamma(pd.symmetrize(t))

    # D_1 at the family point and its grid oracle
    assert close(pd.d_norm(1, FAMILY), 0.8, 1e-12)
    assert close(pd.sup_on_torus(1, FAMILY, 4096), 0.8, 1e-5)
    assert abs(pd.phi(1, FAMILY, 1.0)) < 1e-15

    # distances
    d = pd.distance(FAMILY)
    assert close(d["closed_form"], math.atanh(0.8), 1e-12)
    assert d["carath_lower"] <= d["closed_form"] + 1e-9 <= d["lempert_upper"] + 2e-9
    assert close(pd.dist_formula(FAMILY), math.atanh(0.8), 1e-12)

    # explicit family member and its JSON round trip
    disc = pd.family_disc(0.25j)
    assert max(abs(v) for v in disc(0)) < 1e-10
    assert max(abs(a - b) for a, b in zip(disc(-0.8), FAMILY)) < 1e-10
    again = pd.Disc.from_json(disc.to_json())
    assert again(0.3 + 0.1j) == disc(0.3 + 0.1j)

    # strict interpolation
    y = [0.3 + 0.1j, 0.2, 0.05]
    f = pd.interpolate(y, 0.6)
    origin, target, outside = f.verify(500, 1)
    assert origin < 1e-9 and target < 1e-9 and outside == 0
    m = f.matrix(0.6)
    assert len(m) == 2 and len(m[0]) == 2

    # Schwarz report
    rep = pd.schwarz(0.6, y)
    assert rep["verdict"] and len(rep["conditions"]) >= 9

    # witnesses and a separating polynomial
    for n in range(2, 9):
        a, b, mid = pd.nonconvex_witness(n)
        assert pd.in_tilde_gamma(a) and pd.in_tilde_gamma(b) and not pd.in_tilde_gamma(mid)
        y0, iy = pd.noncircular_witness(n)
        assert pd.in_tilde_gamma(y0) and not pd.in_tilde_gamma(iy)
    sep = pd.separating_polynomial([1.5 + 0.5j, 0.9], 500)
    assert sep["value_at_target"] > 1.0 >= sep["sup_bound"] - 1e-9

    # errors
    try:
        pd.in_g([])
    except ValueError:
        pass
    else:
        raise AssertionError("empty point accepted")
    try:
        pd.interpolate(LEMMA, 0.3)
    except RuntimeError:
        pass
    else:
        raise AssertionError("infeasible interpolation accepted")

    print(json.dumps({"ok": True, "distance": d["closed_form"]}))


if __name__ == "__main__":
    main()
