"""Train on one hard random instance and print the loss trajectory.

The task loss is the relaxed weighted unsatisfaction; on an unsatisfiable
instance it flattens out at a positive value that tracks the true optimum.

Run:  python3 demos/convergence_trace.py
"""

from hypersat import (
    SolveConfig,
    assign_random_weights,
    generate_random_3sat,
    solve,
)


def main():
    seed = 0
    # 250 variables at clause ratio 4.26: almost surely unsatisfiable
    inst = generate_random_3sat(250, 1065, seed=seed)
    inst = assign_random_weights(inst, seed=seed)
    print(f"instance: n={inst.num_vars} m={inst.num_clauses} "
          f"total weight={inst.total_weight()}")

    result = solve(inst, SolveConfig(seed=seed))
    trace = result.loss_trace
    print(f"trained {result.epochs_run} epochs; showing every 20th:")
    print(f"{'epoch':>5} {'task':>10} {'shared':>10} {'total':>10}")
    for e in range(0, len(trace), 20):
        lb = trace[e]
        print(f"{e + 1:>5} {lb.task:>10.3f} {lb.shared:>10.3f} "
              f"{lb.total:>10.3f}")
    lb = trace[-1]
    print(f"{len(trace):>5} {lb.task:>10.3f} {lb.shared:>10.3f} "
          f"{lb.total:>10.3f}")
    print(f"final dropout-off task loss: {result.final_loss.task:.3f}")
    print(f"rounded assignment unsat weight: {result.unsat_weight}")


if __name__ == "__main__":
    main()
