"""Run the history/prophecy completeness construction on random acyclic pairs.

For each trace-included pair: unfold A, take the canonical backward
relation to B, superpose, and check every stage.  Prints sizes per stage.

    python scripts/completeness_pipeline.py --cases 100 --seed 0
"""
import argparse
import random
from dataclasses import dataclass

from normsim.constructions import canonical_relation, lift_norm, superpose, unfold
from normsim.generators import included_acyclic_pair
from normsim.simulation import (
    check_history, check_normed_backward, check_prophecy, check_step_refinement,
    norm_from_branching_backward,
)


@dataclass
class Config:
    cases: int = 100
    max_states: int = 5
    max_steps: int = 8
    seed: int = 0


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    failed = 0
    for k in range(cfg.cases):
        A, B = included_acyclic_pair(rng, cfg.max_states, cfg.max_steps)
        C, last = unfold(A)
        b = canonical_relation(C, B)
        n = norm_from_branching_backward(C, B, b)
        D, pi1, pi2 = superpose(C, b, B)
        ok = (check_history(A, C, last) and check_normed_backward(C, B, b, n)
              and check_prophecy(C, D, pi1, lift_norm(n, pi2)) and check_step_refinement(D, B, pi2))
        failed += not ok
        print(f"case {k:3d}: |A|={len(A.states)} |C|={len(C.states)} |b|={len(b)} "
              f"|D|={len(D.states)} {'ok' if ok else 'FAILED'}")
    print(f"{cfg.cases - failed}/{cfg.cases} pipelines accepted")
    return failed


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-states", type=int, default=5)
    p.add_argument("--max-steps", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    raise SystemExit(1 if main(Config(a.cases, a.max_states, a.max_steps, a.seed)) else 0)
