"""Solve a small weighted MaxSAT instance end to end and compare the
network's answer with the exhaustive optimum.

Run:  python3 demos/quickstart.py
"""

import numpy as np

from hypersat import (
    SolveConfig,
    assign_random_weights,
    exhaustive_optimum,
    generate_random_3sat,
    solve,
)


def main():
    seed = 7
    inst = generate_random_3sat(14, 60, seed=seed)
    inst = assign_random_weights(inst, seed=seed)
    print(f"instance: n={inst.num_vars} m={inst.num_clauses} "
          f"total weight={inst.total_weight()}")

    opt = exhaustive_optimum(inst)
    print(f"exhaustive optimum: unsat weight {opt.best_unsat_weight}")

    result = solve(inst, SolveConfig(seed=seed))
    print(f"network ({result.epochs_run} epochs): "
          f"unsat weight {result.unsat_weight}")
    print("assignment:", "".join(str(int(v)) for v in result.assignment))
    probs = np.round(result.probabilities, 3)
    print("probabilities:", probs)
    gap = result.unsat_weight - opt.best_unsat_weight
    print(f"gap to optimum: {gap} "
          f"({100.0 * gap / inst.total_weight():.1f}% of total weight)")


if __name__ == "__main__":
    main()
