"""Histogram of tau and R over Haar-random states for each odd n (text output)."""
import argparse

import numpy as np

from oddtangle.invariants import all_tau_i_amps
from oddtangle.state import random_state


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--n", default="3,5,7,9")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    edges = np.linspace(0, 1, 11)
    for n in (int(x) for x in args.n.split(",")):
        batch = np.stack([random_state(n, rng).amps for _ in range(args.samples)])
        vals = all_tau_i_amps(batch, n)
        t, r = vals[:, 0], vals.mean(axis=-1)
        print(f"n={n}: mean tau={t.mean():.4f} mean R={r.mean():.4f} max tau={t.max():.4f}")
        for name, data in (("tau", t), ("R", r)):
            counts, _ = np.histogram(data, edges)
            bars = " ".join(f"{c:5d}" for c in counts)
            print(f"  {name:>3} | {bars}")


if __name__ == "__main__":
    main()
