"""Smoke test for the apkin extension module.

Build and install first:  pip install -e crates/py --no-build-isolation
Then run:                 python python/smoke_test.py
"""

import math

import apkin


def check(cond, msg):
    if not cond:
        raise SystemExit(f"FAIL: {msg}")
    print(f"ok   {msg}")


def main():
    check("dsa-cn" in apkin.schemes(), "scheme list")

    c = apkin.constants(1.5)
    check(abs(c["kappa"] - 1.6813) < 1e-3, f"kappa(1.5) = {c['kappa']:.5f}")
    check(c["identity_residual"] < 1e-6, "kappa identity")

    nodes, weights, values = apkin.equilibrium("heavytail", 50.0, 200, 2.5)
    mass = sum(w * m for w, m in zip(weights, values))
    first = sum(w * v * m for v, w, m in zip(nodes, weights, values))
    check(abs(mass - 1) < 1e-15 and abs(first) < 1e-15, "discrete equilibrium moments")

    cfg = apkin.Config("isa", eps=1e-6, dt=1e-3)
    out = apkin.run(cfg)
    check(out["error"] <= 1e-4, f"isa near the limit: error {out['error']:.2e}")
    mean = sum(out["rho"]) / len(out["rho"])
    check(abs(mean - 1) < 1e-12, "mass")

    ads = apkin.run(cfg.replace(scheme="ads"))
    check(abs(apkin.relative_error(ads["rho"], out["rho"]) - out["error"]) < 1e-15, "relative_error matches run")

    rep = apkin.sweep_dt(apkin.Config("dsd", eps=1.0, dt=1e-2, dt_list=[1e-2, 5e-3, 2.5e-3]))
    check(len(rep) == 3 and 1.6 <= rep.slope <= 2.4, f"dsd order at eps=1: {rep.slope:.3f}")
    check(rep.to_csv().splitlines()[0].startswith("scheme,alpha,eps"), "csv header")

    rep = apkin.sweep_eps(apkin.Config("isa", eps_list=[0.5, 0.25, 0.125], tfinal=0.01))
    check([r["eps"] for r in rep.rows] == [0.5, 0.25, 0.125], "sweep order")
    check(all(math.isfinite(e) and e >= 0 for e in rep.errors), "finite errors")

    back = apkin.Config.from_toml(cfg.to_toml())
    check(back.eps == cfg.eps and back.scheme == "isa", "toml round trip")

    try:
        apkin.Config("isa", bogus=1)
    except KeyError:
        check(True, "unknown key rejected")
    else:
        raise SystemExit("FAIL: unknown key accepted")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
