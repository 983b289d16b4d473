"""Regenerate the stored reference pulse shipped in ``transmon_ccz/data``.

SuSSADE runs with the default configuration for a fixed budget, then its
best genome is polished with bounded L-BFGS on central finite-difference
gradients until the intrinsic fidelity clears the requested threshold or
stops improving.

    python scripts/make_stored_pulse.py [--seed 0] [--budget 200000] [--out PATH]
"""

import argparse
import json
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from transmon_ccz.config import RunConfig
from transmon_ccz.fidelity import CCZObjective, objective
from transmon_ccz.sussade import optimize

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "transmon_ccz" / "data" / "ccz_26ns_g30mhz.json"


def fd_gradient(batch, x, h=1e-6):
    eye = np.eye(x.size) * h
    f = batch(np.vstack([x[None], x + eye, x - eye]))
    return f[0], (f[1 : x.size + 1] - f[x.size + 1 :]) / (2 * h)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=200_000)
    ap.add_argument("--threshold", type=float, default=0.9995)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()

    cfg = RunConfig(label="stored-pulse")
    chain = cfg.chain.build()
    obj = CCZObjective(chain, cfg.pulse.dt_ns, n_sub=cfg.pulse.n_sub)
    res = optimize(obj, cfg.optimizer_config(seed=args.seed, max_evaluations=args.budget, target_fitness=args.threshold),
                   batch_objective=obj.batch)
    print(f"SuSSADE: F = {res.best.fitness:.6f} after {res.evaluations} evaluations", flush=True)

    lo, hi = cfg.pulse.bounds_ghz
    x = res.best.x
    previous = res.best.fitness
    for _ in range(20):
        if previous >= args.threshold:
            break
        fit = minimize(lambda y: tuple(-v for v in fd_gradient(obj.batch, y)), x, jac=True, method="L-BFGS-B",
                       bounds=[(lo, hi)] * x.size, options={"maxiter": 500, "ftol": 1e-15, "gtol": 1e-12})
        x = fit.x
        print(f"polish: F = {-fit.fun:.6f}", flush=True)
        if -fit.fun - previous < 1e-9:
            break
        previous = -fit.fun

    table = cfg.pulse.table(x.reshape(chain.n_transmons, -1))
    table.save(args.out)
    meta = {"sussade_fidelity": res.best.fitness, "sussade_evaluations": res.evaluations, "seed": args.seed,
            "final_fidelity": objective(chain, table), "config_hash": cfg.semantic_hash()}
    args.out.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(json.dumps(meta))


if __name__ == "__main__":
    main()
