"""Audit the sideband CNOT compositions for a few control-qubit phases."""

import argparse
import warnings

import numpy as np

from jjcavity.device import CavityParams, DeviceModel, QubitParams, RegimeWarning
from jjcavity.gates import cnot_composition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-ph", type=int, default=6)
    ap.add_argument("--betas", type=float, nargs="+", default=[0.0, np.pi / 4, np.pi / 2])
    args = ap.parse_args()

    warnings.simplefilter("ignore", RegimeWarning)
    q = QubitParams(10.0, 1.0, 1.0, 0.5, 0.3)
    dev = DeviceModel((q, q), CavityParams(1.0, 0.05, args.n_ph))
    print(f"{'variant':>9} {'beta_j':>7} {'fidelity':>10} {'leakage':>9} {'|G1|':>9} {'G2':>9}")
    for variant in ("verified", "literal"):
        for b in args.betas:
            _, r = cnot_composition(0, 1, dev, variant, b)
            print(f"{variant:>9} {b:7.4f} {r.fidelity:10.6f} {r.leakage:9.1e} {abs(r.makhlin_g1):9.1e} {r.makhlin_g2:9.6f}")


if __name__ == "__main__":
    main()
