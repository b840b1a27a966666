"""Where truncated Ext classes appear: entries of Ext^d(Phi^r F(1), F(1) / F(1)^(>t)) at t = 2^j.

Shows why no simple window rule certifies a cell: some classes are only
seen at the last power of two below the window, and spurious classes
appear and vanish again as t grows.
"""
import argparse

from unstable_ext import paper_lab as pl
from unstable_ext import resolve as rs
from unstable_ext import umod


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--window", type=int, default=64)
    p.add_argument("--r-max", type=int, default=3)
    p.add_argument("--d-max", type=int, default=11)
    a = p.parse_args()
    D = a.window
    powers = [1 << j for j in range(D.bit_length()) if (1 << j) <= D]
    for r in range(a.r_max + 1):
        R = pl.phi_resolver(r, D, a.d_max + 2, None)
        table = rs.ext_groups(R.M, umod.free_module(1, D), a.d_max, D, resolver=R)
        print(f"r = {r}")
        print("   d  " + " ".join(f"t={t:<4}" for t in powers) + " predicted")
        for d in range(1, a.d_max + 1):
            cells = " ".join(f"{table.dim(d, t):<6}" for t in powers)
            print(f"  {d:2d}  {cells} {pl.predicted_ext_dim(d, r)}")


if __name__ == "__main__":
    main()
