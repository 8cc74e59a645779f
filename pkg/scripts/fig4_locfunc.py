"""Localization function curves: SSH at several delta (with the infinite-chain
limit) and Aubry-Andre on both sides of the transition."""
import argparse

from _common import out_path
from loclab.models import LatticeSpec
from loclab.sweep import SweepConfig, atomic_write, curve_to_csv, locfunc_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=610)
    args = ap.parse_args()
    lat = LatticeSpec(args.n)
    for model, deltas in (("ssh", (0.0, 0.1, 0.3, 0.5, 1.0)), ("aa_free", (0.5, 1.5, 2.0, 2.5, 3.0))):
        for d in deltas:
            rows = locfunc_curve(SweepConfig(model, lat, delta=(d,)), d)
            path = out_path(f"fig4_{model}_N{args.n}_delta{d:g}.csv")
            atomic_write(path, curve_to_csv(rows))
            print(f"{path.name}: C(pi) = {rows[args.n // 2]['C_p']:.4f}")


if __name__ == "__main__":
    main()
