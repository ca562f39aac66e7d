"""Walk through every detector outcome of two well-known fusion matrices.

For each matrix the script prints the 4x4 unitary, the six relevant
(off-diagonal) detector pairs with their output-state coefficients,
probability, entanglement entropy, and classification labels, then the
channel-invariant summary.  Run it with no arguments.
"""

import numpy as np

import fusionlab as fl
from fusionlab.classify import classify


def show(name):
    U = fl.builtin(name)
    table = fl.outcome_table(U)
    inv = fl.channel_invariants(U)

    print("=" * 64)
    print(f"{name}:")
    with np.printoptions(precision=4, suppress=True):
        print(U)
    print()

    for out in table.relevant:
        pair = f"({out.i},{out.j})"
        if out.zero_probability:
            print(f"  {pair}  p = 0          (never fires)")
            continue
        cls = classify(out)
        coeff = np.round(out.coefficients, 4)
        S = fl.outcome_entropy(out)
        print(f"  {pair}  p = {out.probability:.6f}  S = {S:.4f} bits")
        print(f"        coefficients {coeff}")
        print(f"        labels {cls.labels}"
              + (f"  phi = {cls.phi:.4f}" if cls.phi is not None else ""))

    diag = fl.diag_probabilities(U)
    print(f"  same-detector probabilities: {np.round(diag, 6)}")
    print(f"  total relevant probability:  {fl.total_relevant_probability(U):.6f}")
    print(f"  P(S >= 1 bit) = {fl.threshold_probability(U, 1.0):.6f}")
    print(f"  <S> over outcomes = {fl.expectation_entropy(U):.6f} bits")
    print(f"  invariants: m = {inv.m}, n = {np.round(inv.n, 4)}")
    print()


if __name__ == "__main__":
    for name in ("pbs2", "theorem7", "blockpair", "identity"):
        show(name)
