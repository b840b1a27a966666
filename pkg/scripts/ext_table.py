"""Ext^d(Phi^r F(1), F(1)) at a chosen window, with per-stage timings.

    python3 scripts/ext_table.py --window 128 --r 2 --d-max 10 --budget 20000

Large windows are slow: r = 2 at window 128 needs about ten minutes and
2 GB; r = 3 at window 128 does not fit in 5 GB.
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass

from unstable_ext import paper_lab as pl
from unstable_ext import resolve as rs
from unstable_ext import umod
from unstable_ext.errors import BudgetExceeded


@dataclass
class ExtRunConfig:
    window: int = 64
    r: int = 1
    d_max: int = 11
    budget: int | None = None


def run(cfg: ExtRunConfig) -> dict:
    t0 = time.time()
    R = rs.ProjectiveResolver(pl.phi_f1(cfg.r, cfg.window), cfg.window, cfg.budget)
    stages = []
    try:
        for s in range(cfg.d_max + 2):
            R.extend(s + 1)
            stages.append({"stage": s, "max_dim": max(R.stages[s].term.dims),
                           "seconds": round(time.time() - t0, 1)})
            print(json.dumps(stages[-1]), flush=True)
    except BudgetExceeded as exc:
        return {"config": asdict(cfg), "stages": stages, "error": str(exc)}
    table = rs.ext_groups(R.M, umod.free_module(1, cfg.window), cfg.d_max, cfg.window, resolver=R)
    row = table.row()
    return {"config": asdict(cfg), "stages": stages, "row": row,
            "predicted": [1] + [pl.predicted_ext_dim(d, cfg.r) for d in range(1, cfg.d_max + 1)],
            "seconds": round(time.time() - t0, 1)}


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--window", type=int, default=64)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--d-max", type=int, default=11)
    p.add_argument("--budget", type=int, default=None)
    a = p.parse_args()
    print(json.dumps(run(ExtRunConfig(a.window, a.r, a.d_max, a.budget)), indent=2))


if __name__ == "__main__":
    main()
