"""Smoke test for the pymagtele extension module.

Build and run from the repository root:

    cargo build --release -p magtele-python
    cp target/release/libpymagtele.so python/pymagtele.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pymagtele as mt  # noqa: E402


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    d = mt.PhysicalParams().derive()
    close(d.r, 0.8347471452186828, 1e-12)
    close(d.script_gc_tau_s, 0.01005, 1e-4)
    assert d.lambda_prime < d.lambda_

    close(mt.logneg_tmsv(d.r), 2 * d.r, 0.0)
    close(mt.logneg_numeric("nongaussian", d.lambda_prime), mt.logneg_subtracted(d.lambda_prime), 1e-5)

    ch = d.channel()
    beta = mt.InputState.coherent(1.0)
    for res in ("tmsv", "nongaussian"):
        value, err = mt.fidelity_quadrature(beta, ch, res)
        close(mt.fidelity_printed(beta, ch, res), value, 1e-6)
        assert err < 1e-8
    assert mt.fidelity_printed(beta, ch, "nongaussian") > mt.fidelity_printed(beta, ch, "tmsv")

    photon = mt.InputState.single_photon()
    vac = mt.Channel.vacuum()
    close(mt.fidelity_printed(photon, vac, "tmsv"), 4.0, 0.0)
    close(mt.fidelity_quadrature(photon, vac, "tmsv")[0], 0.25, 1e-6)
    close(mt.fidelity_fock_oracle(photon, vac, "tmsv"), 0.25, 1e-4)

    p = mt.joint_distribution("nongaussian", d.lambda_prime, max_number=5)
    x = d.lambda_prime ** 2
    close(p[0][0], (1 - x) ** 3 / (1 + x), 1e-12)

    xs, ps, w = mt.wigner_input(mt.InputState.single_photon(), half_width=4.0, resolution=41, cutoff=10)
    mid = len(xs) // 2
    close(w[mid][mid], -1.0 / math.pi, 1e-12)

    try:
        mt.PhysicalParams(g1_mhz=40.0).derive()
    except ValueError as e:
        assert "adiabatic" in str(e)
    else:
        raise AssertionError("strong coupling should be rejected")

    print("pymagtele smoke test passed")


if __name__ == "__main__":
    main()
