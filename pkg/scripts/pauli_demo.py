"""Pairs of Gaussians with identical position and momentum densities."""
import argparse
from dataclasses import dataclass

from tomokit.symplectic_tomography import pauli_counterexample


@dataclass
class Config:
    re: float = 1.0
    im_values: tuple = (0.0, 0.1, 0.5, 1.0, 2.0, 5.0)
    beta: float = 0.0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--re", type=float, default=Config.re)
    ap.add_argument("--beta", type=float, default=Config.beta)
    args = ap.parse_args()
    cfg = Config(re=args.re, beta=args.beta)
    print(f"{'alpha':>12} {'gap q':>10} {'gap p':>10} {'fidelity':>10} {'Re/|a|':>10}")
    for im in cfg.im_values:
        alpha = complex(cfg.re, im)
        r = pauli_counterexample(alpha, cfg.beta)
        print(f"{alpha!s:>12} {r.marginal_gap_q:10.1e} {r.marginal_gap_p:10.1e} {r.fidelity:10.6f} "
              f"{alpha.real / abs(alpha):10.6f}")


if __name__ == "__main__":
    main()
