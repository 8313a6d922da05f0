"""Search for certificates between random automata and compare against the trace oracle.

Reports how often each search succeeds, and counts any certificate whose
pair is not trace included (should be zero) and included pairs with no
certificate of either kind (incompleteness of the simulation notions).

    python scripts/soundness_fuzz.py --pairs 2000 --max-states 6 --seed 0
"""
import argparse
import random
import time
from collections import Counter
from dataclasses import dataclass

from normsim.generators import random_automaton
from normsim.oracle import format_trace, trace_inclusion
from normsim.simulation import check_certificate, find_certificate


@dataclass
class Config:
    pairs: int = 1000
    max_states: int = 6
    max_steps: int = 10
    seed: int = 0


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    stats = Counter()
    t0 = time.perf_counter()
    for k in range(cfg.pairs):
        A = random_automaton(rng, cfg.max_states, cfg.max_steps, prefix="s")
        B = random_automaton(rng, cfg.max_states, cfg.max_steps, prefix="u")
        v = trace_inclusion(A, B)
        stats["included" if v.holds else "not included"] += 1
        any_cert = False
        for kind in ("refinement", "forward", "backward"):
            cert = find_certificate(A, B, kind)
            if cert is None:
                continue
            any_cert = True
            stats[kind] += 1
            if not v.holds or not check_certificate(A, B, cert):
                stats["unsound"] += 1
                print(f"pair {k}: {kind} certificate but witness {format_trace(v.witness)}")
        if v.holds and not any_cert:
            stats["included, no certificate"] += 1
    print(f"{cfg.pairs} pairs in {time.perf_counter() - t0:.1f}s")
    for key in ("included", "not included", "refinement", "forward", "backward",
                "included, no certificate", "unsound"):
        print(f"  {key:26s} {stats[key]}")
    return stats["unsound"]


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--max-states", type=int, default=6)
    p.add_argument("--max-steps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    raise SystemExit(1 if main(Config(a.pairs, a.max_states, a.max_steps, a.seed)) else 0)
