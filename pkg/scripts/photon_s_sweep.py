"""Photon-number reconstructions of one tomogram across the kernel parameter s."""
import argparse
from dataclasses import dataclass

import numpy as np

from tomokit.fock_tomography import FockSpace, PolarGrid, photon_reconstruct, photon_tomogram_grid


@dataclass
class Config:
    alpha: complex = 1.0
    s_values: tuple = (-0.6, -0.3, 0.0, 0.2, 0.4)
    nmax: int = 8
    ncut: int = 32
    radius: float = 4.0
    nodes: int = 24


def run(cfg: Config):
    psi = FockSpace(40).coherent_state(cfg.alpha)
    rho = np.outer(psi, psi.conj())
    tom = photon_tomogram_grid(rho, cfg.ncut, PolarGrid(cfg.radius, cfg.nodes, cfg.nodes))
    ref = rho[: cfg.nmax + 1, : cfg.nmax + 1]
    out = []
    for s in cfg.s_values:
        try:
            res = photon_reconstruct(tom, s, cfg.nmax)
        except OverflowError as exc:
            out.append((s, None, None, str(exc)))
            continue
        out.append((s, float(np.max(np.abs(res.matrix - ref))), float(np.trace(res.matrix).real), "; ".join(res.warnings)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=complex, default=Config.alpha)
    ap.add_argument("--radius", type=float, default=Config.radius)
    args = ap.parse_args()
    cfg = Config(alpha=args.alpha, radius=args.radius)
    print(f"{'s':>6} {'max error':>12} {'trace':>10}  notes")
    for s, err, tr, note in run(cfg):
        if err is None:
            print(f"{s:6.2f} {'-':>12} {'-':>10}  {note}")
        else:
            print(f"{s:6.2f} {err:12.3e} {tr:10.6f}  {note}")


if __name__ == "__main__":
    main()
