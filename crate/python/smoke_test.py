"""Smoke test for the gaussopt_py extension (build with maturin first)."""

import json
import math

import gaussopt_py as go


def test_g_and_inverse():
    assert abs(go.g(1.0) - 2 * math.log(2)) < 1e-12
    assert abs(go.g_inverse(go.g(0.7)) - 0.7) < 1e-9


def test_thin_keeps_geometric_family():
    e, lam, n = 0.8, 0.4, 200
    geo = [(e / (1 + e)) ** k / (1 + e) for k in range(n)]
    out = go.thin(geo, lam)
    mean = lam * e
    expected = [(mean / (1 + mean)) ** k / (1 + mean) for k in range(20)]
    assert max(abs(a - b) for a, b in zip(out, expected)) < 1e-10


def test_entropy_of_maximally_mixed_qubit():
    state = {"mode_dims": [2], "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}
    assert abs(go.entropy(json.dumps(state)) - math.log(2)) < 1e-12


def test_verify_returns_report():
    ids = [i for i, _ in go.verifiers()]
    assert "moe" in ids
    report = json.loads(go.verify("moe", json.dumps({"trials": 20, "dim": 6}), seed=3))
    assert report["theorem_id"] == "moe"
    assert report["status"] == "pass"
    assert report["seed"] == 3


def test_bad_input_raises():
    try:
        go.verify("nope")
    except ValueError as e:
        assert "unknown verifier" in str(e)
    else:
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
