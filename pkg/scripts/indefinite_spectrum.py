"""Energy and metric sign of every low-lying occupation state of one momentum.

Scalar photons raise the energy eigenvalue like the others but flip the sign
of the norm, so the unnormalized <n|H|n> is negative for odd n0.
"""

import argparse
from collections import Counter

from gblab.algebra import hamiltonian, spectrum
from gblab.fock import build_basis, photon_modes


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=2)
    args = p.parse_args(argv)
    basis = build_basis(photon_modes([(0.0, 0.0, 1.0)]), args.n_max)
    entries = spectrum(hamiltonian(basis))
    print(" n0 n1 n2 n3   eigenvalue  norm  <n|H|n>")
    for e in entries:
        print(" " + "  ".join(str(n) for n in e.occupation) + f"   {e.eigenvalue:8.3f}  {e.norm_sign:+d}   {e.eigenvalue * e.norm_sign:+8.3f}")
    tally = Counter((e.eigenvalue, e.norm_sign) for e in entries)
    print("\n# (eigenvalue, sign): count")
    for key in sorted(tally):
        print(f"# {key}: {tally[key]}")


if __name__ == "__main__":
    main()
