"""Gauge split of <A_mu> along a line in time, for the correct and flipped signature.

Prints, per time sample, <A_mu> - <A_mu>_T next to d_mu Lambda.
"""

import argparse

import numpy as np

from gblab.coherent import CoherentSpec, PhysicalStateSpec, physical_state
from gblab.field import FLIPPED, MINKOWSKI, ModeSet, check_gauge_split
from gblab.fock import build_basis, photon_modes


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--k", type=float, nargs=3, default=[0.0, 0.0, 1.0])
    p.add_argument("--alpha", type=complex, default=0.5)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--samples", type=int, default=9)
    args = p.parse_args(argv)

    k = tuple(args.k)
    basis = build_basis(photon_modes([k]), args.n_max)
    pspec = PhysicalStateSpec(CoherentSpec.single(k, args.alpha), ((1, 0),))
    psi, ref = physical_state(basis, pspec), physical_state(basis, pspec.with_alpha_zero())
    pts = np.zeros((args.samples, 4))
    pts[:, 0] = np.linspace(0, 2 * np.pi, args.samples)

    for name, metric in (("minkowski", MINKOWSKI), ("flipped", FLIPPED)):
        rep = check_gauge_split(basis, psi, ref, ModeSet((k,)), pts, pspec.coherent, metric=metric)
        print(f"# {name}: max deviation {rep.max_deviation:.3e}")
        print("#   t      A_0-A_T0   dLambda_0   A_3-A_T3   dLambda_3")
        diff = rep.field_lower - rep.reference_lower
        for i, t in enumerate(pts[:, 0]):
            print(f"{t:7.3f} {diff[i, 0]:+.5f}  {rep.gauge_lower[i, 0]:+.5f}  {diff[i, 3]:+.5f}  {rep.gauge_lower[i, 3]:+.5f}")
    print(f"# box residual {rep.box.residual:.3e}, halving reduction {rep.box.reduction:.1f}")


if __name__ == "__main__":
    main()
