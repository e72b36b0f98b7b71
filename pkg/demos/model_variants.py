"""Compare the model variants on a handful of hard instances.

Variants, weakest to strongest: variable-node graph with a sigmoid head,
literal-node graph without the transformer block, literal + transformer,
literal + antisymmetry penalty, and the full model (transformer + penalty).

Run:  python3 demos/model_variants.py  (a few minutes of CPU)
"""

import numpy as np

from hypersat import (
    SolveConfig,
    assign_random_weights,
    generate_random_3sat,
    solve,
)

VARIANTS = {
    "variable nodes": dict(mode="variable", use_transformer=False, lam=0.0),
    "literal, plain": dict(use_transformer=False, lam=0.0),
    "literal + transformer": dict(lam=0.0),
    "literal + penalty": dict(use_transformer=False),
    "full model": dict(),
}


def main():
    instances = []
    for i in range(3):
        inst = generate_random_3sat(100, 430, seed=600 + i)
        instances.append(assign_random_weights(inst, seed=600 + i))
    print(f"{len(instances)} instances, n=100 m=430, weights U{{1..10}}\n")
    for name, overrides in VARIANTS.items():
        unsats = [
            solve(inst, SolveConfig(seed=600 + i, **overrides)).unsat_weight
            for i, inst in enumerate(instances)
        ]
        print(f"{name:<22} mean unsat weight {np.mean(unsats):7.2f}  "
              f"per instance {unsats}")


if __name__ == "__main__":
    main()
