"""CHSH value of the singlet when every local observable is smeared to eta * sigma."""

import argparse

import numpy as np

from unsharp.observables import PAULI_X, PAULI_Z, chsh_value, singlet_state


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=11)
    args = p.parse_args()

    B0 = -(PAULI_Z + PAULI_X) / np.sqrt(2)
    B1 = (PAULI_X - PAULI_Z) / np.sqrt(2)
    rho = singlet_state()
    sharp = chsh_value(rho, PAULI_Z, PAULI_X, B0, B1)
    print(f"{'eta':>6} {'S':>10} {'S/eta^2':>10}  violates")
    for eta in np.linspace(0, 1, args.points):
        s = chsh_value(rho, eta * PAULI_Z, eta * PAULI_X, eta * B0, eta * B1)
        ratio = s / eta**2 if eta > 0 else float("nan")
        print(f"{eta:6.2f} {s:10.6f} {ratio:10.6f}  {s > 2}")
    print(f"violation needs eta > 2**-0.25 = {2**-0.25:.6f} (sharp value {sharp:.7f})")


if __name__ == "__main__":
    main()
