"""Interacting Aubry-Andre chain by exact diagonalization, for a few V."""
import argparse

from _common import out_path
from loclab.models import LatticeSpec
from loclab.sweep import SweepConfig, atomic_write, parse_grid, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--delta", default="0:4:0.25")
    ap.add_argument("--v", default="0,0.25,0.5")
    ap.add_argument("--jobs", type=int, default=None)
    args = ap.parse_args()
    cfg = SweepConfig("aa_interacting", LatticeSpec(args.n), delta=parse_grid(args.delta), v=parse_grid(args.v))
    res = run_sweep(cfg, jobs=args.jobs)
    path = out_path(f"fig3_interacting_N{args.n}.csv")
    atomic_write(path, res.to_csv())
    atomic_write(path.with_suffix(".json"), res.to_json() + "\n")
    print(f"wrote {path} ({len(res.rows)} rows, failed={res.failed})")


if __name__ == "__main__":
    main()
