"""Monte Carlo z-x-z sequence from |0>: the middle x measurement erases the z record."""

import argparse

import numpy as np

from unsharp.observables import PAULI_X, PAULI_Z, pvm_from_observable, unsharp_spin
from unsharp.simulator import exact_step_distributions, run_sequences
from unsharp.states_effects import DensityOperator


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trajectories", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--eta", type=float, nargs="*", default=[1.0, 0.75, 0.5, 0.25, 0.0],
                   help="sharpness of the middle x measurement")
    args = p.parse_args()

    rho = DensityOperator(np.diag([1.0, 0.0]))
    Z = pvm_from_observable(PAULI_Z)
    print(f"{'eta':>6} {'P(z3=+1)':>10} {'exact':>10} {'stderr':>10}")
    for eta in args.eta:
        middle = pvm_from_observable(PAULI_X) if eta == 1 else unsharp_spin([1, 0, 0], eta)
        stats = run_sequences(rho, [Z, middle, Z], args.trajectories, seed=args.seed)
        rec = stats.records[2]
        i = rec.labels.index("+1")
        exact = exact_step_distributions(rho, [Z, middle, Z])[2][i]
        print(f"{eta:6.2f} {rec.frequencies[i]:10.4f} {exact:10.4f} {rec.stderr[i]:10.4f}")


if __name__ == "__main__":
    main()
