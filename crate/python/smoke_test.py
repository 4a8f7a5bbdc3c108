"""Smoke test for the octant extension module.

Build and run from the repository root:

    cargo build --release -p octant-py --features extension-module
    python3 python/smoke_test.py
"""

import json
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CERTIFIED_MODEL = "(-1,-1,0),(-1,0,1),(-1,1,-1),(0,-1,1),(0,0,-1),(0,1,0),(1,0,0)"
ZERO_ORBIT_MODEL = "(-1,-1,-1),(-1,0,0),(-1,0,1),(-1,1,0),(1,-1,0),(1,0,-1),(1,1,1)"


def load_module():
    built = os.path.join(ROOT, "target", "release", "liboctant.so")
    if not os.path.exists(built):
        sys.exit(f"missing {built}; build with: cargo build --release -p octant-py --features extension-module")
    tmp = tempfile.mkdtemp()
    shutil.copy(built, os.path.join(tmp, "octant.so"))
    sys.path.insert(0, tmp)
    import octant

    return octant


def main():
    octant = load_module()

    s = octant.StepSet(CERTIFIED_MODEL)
    assert len(s) == 7
    assert (1, 0, 0) in s.steps
    assert octant.StepSet(s.hex_id) == s
    assert octant.StepSet.from_id(s.id) == s
    assert s.canonical().is_canonical()

    try:
        octant.StepSet("(0,0,0)")
    except ValueError:
        pass
    else:
        raise AssertionError("origin accepted")

    cert = octant.certify(s)
    assert cert.verdict == "CertifiedDFinite", cert
    assert cert.group_order == 12
    assert cert.exit_code == 0
    assert cert.verify() and cert.mismatch() is None
    doc = cert.to_dict()
    assert doc["verdict"] == "CertifiedDFinite"
    assert octant.verify_certificate(cert.to_json())

    doc["elements"][0]["matrix"]["columns"][0][0] = 1
    assert not octant.verify_certificate(json.dumps(doc))
    assert octant.Certificate.from_json(json.dumps(doc)).mismatch().startswith("elements[0]")

    assert octant.certify(ZERO_ORBIT_MODEL).verdict == "ZeroOrbitSum"
    ungated = octant.certify(ZERO_ORBIT_MODEL, zero_orbit_sum_gate=False)
    assert ungated.verdict == "Obstructed" and ungated.obstruction is not None

    info = octant.group_info(CERTIFIED_MODEL)
    assert info["finite"] and info["order"] == 12
    assert info["elements"][0]["word"] == "id"
    assert not info["orbit_sum_is_zero"]
    assert octant.group_info(ZERO_ORBIT_MODEL)["orbit_sum_is_zero"]

    report = octant.oracle(s, n_max=5)
    assert report["pass"], report

    print("octant smoke test passed")


if __name__ == "__main__":
    main()
