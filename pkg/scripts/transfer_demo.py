"""Compare transfer pulses and model variants over a symmetric window."""

import argparse

from jjcavity.io import write_csv
from jjcavity.protocols import run_transfer
from jjcavity.transfer import CSV_HEADER

RUNS = [
    ("solved", "cascaded", "solved_no_reflection"),
    ("mirrored", "cascaded", "closed_form_mirrored"),
    ("hold", "cascaded", "closed_form"),
    ("literal", "literal_paper", "closed_form"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--g", type=float, default=0.05)
    ap.add_argument("--e-j0", type=float, default=40.0)
    ap.add_argument("--span", type=float, default=12.0, help="half-window in units of 1/kappa")
    ap.add_argument("--outdir", default="runs")
    args = ap.parse_args()

    w = args.span / args.kappa
    print(f"{'run':>9} {'fidelity':>12} {'loss':>10} {'final norm':>11}")
    for name, variant, source in RUNS:
        p = {"kappa": args.kappa, "g": args.g, "e_j0": args.e_j0, "window": [-w, w],
             "coupling_variant": variant, "pulse_source": source}
        traj, _, _ = run_transfer(p)
        s = traj.summary()
        print(f"{name:>9} {s['final_fidelity']:12.8f} {s['loss']:10.2e} {s['final_norm']:11.6f}")
        write_csv(f"{args.outdir}/transfer_{name}.csv", CSV_HEADER, traj.rows(), meta={"params": p, "summary": s})


if __name__ == "__main__":
    main()
