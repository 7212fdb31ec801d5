"""Scan eta for unsharp x/z spins and locate where joint measurability is lost."""

import argparse

import numpy as np

from unsharp.coexistence import SearchBudget, coexist_binary_povms
from unsharp.observables import unsharp_spin


def scan(etas, budget):
    rows = []
    for eta in etas:
        res = coexist_binary_povms(unsharp_spin([1, 0, 0], eta), unsharp_spin([0, 0, 1], eta), budget)
        rows.append((eta, res.found, res.residual, res.method))
    return rows


def bisect(lo, hi, budget, steps):
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if coexist_binary_povms(unsharp_spin([1, 0, 0], mid), unsharp_spin([0, 0, 1], mid), budget).found:
            lo = mid
        else:
            hi = mid
    return lo, hi


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--bisect", type=int, default=20, help="bisection steps for the boundary")
    args = p.parse_args()
    budget = SearchBudget(depth=args.depth)

    print(f"{'eta':>8} {'found':>6} {'margin':>12}  method")
    for eta, found, m, method in scan(np.linspace(0.5, 1.0, args.points), budget):
        print(f"{eta:8.4f} {str(found):>6} {m:12.3e}  {method}")
    lo, hi = bisect(0.5, 1.0, budget, args.bisect)
    print(f"boundary in [{lo:.8f}, {hi:.8f}]; 1/sqrt(2) = {1 / np.sqrt(2):.8f}")


if __name__ == "__main__":
    main()
