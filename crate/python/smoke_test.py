"""Smoke test for the painleve extension module.

Build and install first:  pip install -e crates/py --no-build-isolation
"""

import json

import painleve


def main():
    assert "P2" in painleve.families()

    s2 = painleve.Instance("S2", {"alpha": "1/2"})
    assert s2.family == "S2"
    assert s2.system is not None
    assert s2.classify()["verdict"] == "NotStronglyMinimal"
    assert painleve.Instance("S2", {"alpha": "1/3"}).classify()["verdict"] == "StronglyMinimal"

    assert s2.verify_invariant("x - 2*y^2 - t") == "-2*y"
    assert s2.verify_invariant("x") is None
    certs = s2.darboux_search()
    assert len(certs) == 1, certs
    p, g = certs[0]
    assert g == "-2*y" and s2.verify_invariant(p) == g

    p1 = painleve.Instance("P1")
    run = p1.integrate(0.0, 1.0, "0, 2", tol=1e-9)
    assert run["status"] in ("completed", "pole")
    assert run["t"][0] == 0 and len(run["y"]) == len(run["t"])

    code, out, _ = painleve.run_cli(["classify", "--family", "P2", "--param", "alpha=1/2", "--json"])
    assert code == 0 and json.loads(out)["verdict"] == "NotStronglyMinimal"
    code, _, _ = painleve.run_cli(["classify", "--family", "P9"])
    assert code == 2

    try:
        painleve.Instance("P2")
    except ValueError:
        pass
    else:
        raise AssertionError("missing alpha should raise")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
