"""Quick check that the extension module imports and agrees with known values.

Build first:  pip install --no-build-isolation -e crates/python
"""

import math

import entpulse_py as ep


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    p = ep.PhysicalParams.indium()
    c = ep.coupling_constants(p)
    ok, report = ep.validate_regime(p, c, ratio=5.0)
    assert ok, report
    close(c.t_pi, 71.295e-6, 1e-8)

    run = ep.run_simultaneous(p, ratio=5.0, r_override=1.1)
    close(run["mean_photons_cav1"], 109.7506, 1e-3)
    close(run["mean_photons_cav2"], run["mean_photons_cav1"], 1e-8)
    assert run["motion_decorrelation"] < 1e-8

    s = ep.tmss(3.0, 0.0)
    close(s.log_negativity(["cav1"], ["cav2"]), 2 * math.log(2.0), 1e-10)
    assert s.is_physical()
    assert ep.GaussianState.from_text(s.to_text()).cov == s.cov

    u = ep.Couplings.unit_ratio(3.0)
    back = ep.evolve(ep.initial_state(0.5), u.chi1, u.chi2, 2 * u.t_pi)
    close(back.mean_photons("motion"), 0.5, 1e-9)

    traces = ep.fig3_sweep()
    assert len(traces) == 5
    assert all(0 < v <= 1 for t in traces for v in t["C"])

    seq = ep.run_sequential(p, 0.0, float("inf"), None)
    close(seq["transmittance"], 1.0, 0.0)

    diff, leak, rows = ep.oracle_check(3.0)
    assert diff < 1e-6 and leak < 1e-10 and len(rows) == 26

    assert ep.Couplings.unit_ratio(0.9).t_pi is None
    try:
        ep.run_simultaneous(p, ratio=5.0, r_override=0.9)
    except ValueError:
        pass
    else:
        raise AssertionError("r < 1 accepted")

    print("smoke ok: T_pi = %.3f us, <n> = %.4f, oracle diff = %.1e" % (c.t_pi * 1e6, run["mean_photons_cav1"], diff))


if __name__ == "__main__":
    main()
