"""Smoke test for the pii_tau_py bindings.

Build and install first:  pip install --no-build-isolation -e crates/pii-tau-py
Run:                      python python/smoke_test.py   (or: pytest python/)
"""

import cmath
import math

import pii_tau_py as pt


def test_params():
    p = pt.Params(2j, 1j)
    assert abs(p.nu - 0.1748495763j) < 1e-9
    assert abs(p.s1 - p.s2 + p.s3 + p.s1 * p.s2 * p.s3) < 1e-12
    assert abs(1 + p.h0 * p.h1 - cmath.exp(2j * math.pi * p.nu)) < 1e-10


def test_invalid_params_raise_validation_error():
    try:
        pt.Params(0, 1j)
    except pt.ValidationError:
        return
    raise AssertionError("s1 = 0 was accepted")


def test_special_functions():
    assert abs(pt.gamma(0.5 + 1j) - (0.30069461726065581622 - 0.42496787943312381261j)) < 1e-12
    assert abs(pt.pcf_d(0.5, 2.0) - 0.53401394606745104606) < 1e-12


def test_jump_is_unimodular():
    p = pt.Params(2j, 1j)
    (a, b), (c, d) = pt.jump_matrix(p, 1.5j, 2.0)
    assert abs(a * d - b * c - 1) < 1e-9


def test_determinant_and_derivative():
    p = pt.Params(2j, 1j)
    num = pt.Numerics(nodes=96)
    det, err = pt.det(p, 2.0, num, estimate_error=True)
    assert abs(det - (0.9941337451 - 0.0065678457j)) < 1e-6
    assert err < 1e-6
    d = pt.dlogtau(p, 2.0, num)
    assert abs(d["ddt_log_det"] - d["ddt_log_det_fd"]) < 1e-6
    assert abs(d["total"] - (d["ddt_log_det"] - d["closed_form"] + d["calf"])) < 1e-12


def test_negative_time_is_a_numerical_error():
    try:
        pt.det(pt.Params(2j, 1j), -2.0, pt.Numerics(nodes=64))
    except pt.NumericalError:
        return
    raise AssertionError("Re t < 0 was accepted")


def test_divisor_scan_finds_the_zero():
    p = pt.Params(2j, 1j)
    hits = pt.divisor_scan(p, (1.8, 2.4, 2.8, 3.3), (6, 6), pt.Numerics(nodes=128))
    assert len(hits) == 1
    assert abs(hits[0]["t"] - (2.1136 + 3.0702j)) < 1e-3
    assert hits[0]["winding"] == 1


def test_selftest_filter():
    passed, results = pt.selftest("wronskian")
    assert passed
    assert [r["name"] for r in results] == ["pcf_wronskian"]


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok  {t.__name__}")
    print(f"{len(tests)} smoke tests passed")
