"""Residuals of the coherent-pair constructions as the occupation cutoff grows.

    python3 scripts/truncation_sweep.py --alpha 0.5 --n-max 8 12 16 24 32 --csv sweep.csv
"""

import argparse
import csv
import sys

from gblab.coherent import (
    CoherentSpec,
    coherent_state_displaced,
    coherent_state_series,
    gb_residual,
    translation_invariance_check,
)
from gblab.fock import build_basis, photon_modes

Z = (0.0, 0.0, 1.0)


def row(n_max: int, alpha: complex) -> dict:
    basis = build_basis(photon_modes([Z], (0, 3)), n_max)
    spec = CoherentSpec.single(Z, alpha)
    series = coherent_state_series(basis, spec)
    displaced = coherent_state_displaced(basis, spec)
    return {
        "n_max": n_max,
        "series_norm_error": abs(series.physical_norm2() - 1.0),
        "series_gb_residual": gb_residual(basis, series),
        "displaced_distance": (displaced - series).euclidean_norm(),
        "displaced_gb_residual": gb_residual(basis, displaced),
        "translation_residual": translation_invariance_check(basis, spec).max_residual(),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=complex, default=0.5)
    p.add_argument("--n-max", type=int, nargs="+", default=[8, 12, 16, 24, 32])
    p.add_argument("--csv")
    args = p.parse_args(argv)
    rows = [row(n, args.alpha) for n in args.n_max]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    writer = csv.DictWriter(out, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if args.csv:
        out.close()


if __name__ == "__main__":
    main()
