"""Smoke test for the nicety_py extension.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import json
from fractions import Fraction

import nicety_py


def main():
    k = json.loads(nicety_py.svc_set(1))
    assert k["components"] == [["0", "3/8"], ["5/8", "1"]], k
    assert k["measure"] == "3/4"
    k12 = json.loads(nicety_py.svc_set(12))
    assert len(k12["components"]) == 4096
    assert Fraction(k12["measure"]) == Fraction(1, 2) + Fraction(1, 2**13)

    verdict, s, sigma, kernel = nicety_py.span_is_dense_exact(["1"], ["-1"])
    assert verdict == "not_dense" and s == "-1" and sigma < 1e-10
    assert kernel == ["1", "-1"]
    verdict, s, sigma, kernel = nicety_py.span_is_dense_exact(["1/2", "1/3"], ["1", "-1"])
    assert verdict == "dense" and kernel is None and sigma > 0.1

    cert = json.loads(nicety_py.bump_certificate("0", "1", "2", "-3", "1/100"))
    assert all(c["passed"] for c in cert["checks"]), cert

    assert nicety_py.balanced_mass_residual(10, "1/2") <= 0.5
    try:
        nicety_py.balanced_mass_residual(4, "0.001")
    except RuntimeError as e:
        assert "increase depth" in str(e)
    else:
        raise AssertionError("expected an infeasibility error")

    for seed in range(50):
        agrees, full, chars = nicety_py.fge1(seed)
        assert agrees and (chars == 0) == full

    cert = json.loads(nicety_py.certify(7, 3, grid=11))
    assert cert["schema"] == "certificate_v1"
    assert cert["properness"]["value"] == cert["tower"]["k_measure"] == "129/256"
    assert all(a["passed"] for a in cert["annihilation"])
    print("smoke test passed; depth-7 certificate verdict:", cert["verdict"])


if __name__ == "__main__":
    main()
