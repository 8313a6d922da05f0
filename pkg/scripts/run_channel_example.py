"""Elaborate the channel example and run every check on it.

    python scripts/run_channel_example.py --nat-max 2 --seq-max 2 [--solver z3]
"""
import argparse
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from normsim.oracle import format_trace, trace_inclusion
from normsim.simulation import check_normed_forward, check_step_refinement
from normsim.speclang import load_fixture_spec, load_symbolic_certificate, vcgen_forward, vcgen_refinement
from normsim.speclang.examples import channel_example
from normsim.speclang.fixtures import fixture_path


@dataclass
class Config:
    nat_max: int = 2
    seq_max: int = 2
    solver: Optional[str] = None


def verdict(v):
    return "holds" if v.holds else f"fails, witness {format_trace(v.witness)}"


def main(cfg: Config):
    t0 = time.perf_counter()
    ex = channel_example(cfg.nat_max, cfg.seq_max)
    print(f"Channel: {len(ex.channel.states)} states, wide Channel: {len(ex.channel_wide.states)}, "
          f"TwoChannels: {len(ex.two_channels.states)}")
    ref = check_step_refinement(ex.two_channels, ex.channel_wide, ex.refinement.map)
    fwd = check_normed_forward(ex.channel, ex.two_channels, ex.forward.relation, ex.forward.norm)
    print(f"step refinement TwoChannels -> wide Channel: {'accepted' if ref else 'rejected'}")
    print(f"normed forward Channel -> TwoChannels: {'accepted' if fwd else 'rejected'}")
    print(f"traces(Channel) in traces(TwoChannels): {verdict(trace_inclusion(ex.channel, ex.two_channels))}")
    print(f"traces(TwoChannels) in traces(Channel): {verdict(trace_inclusion(ex.two_channels, ex.channel))}")
    print(f"traces(TwoChannels) in traces(wide Channel): "
          f"{verdict(trace_inclusion(ex.two_channels, ex.channel_wide))}")
    print(f"traces(wide Channel) in traces(TwoChannels): "
          f"{verdict(trace_inclusion(ex.channel_wide, ex.two_channels))}")
    print(f"explicit checks took {time.perf_counter() - t0:.3f}s")

    ch, tc = load_fixture_spec("channel.spec"), load_fixture_spec("twochannels.spec")
    vcs = {
        "refinement": vcgen_refinement(tc, ch, load_symbolic_certificate(fixture_path("twochannels_to_channel.refinement"))),
        "forward": vcgen_forward(ch, tc, load_symbolic_certificate(fixture_path("channel_to_twochannels.forward"))),
    }
    solver = cfg.solver and (shutil.which(cfg.solver) or cfg.solver)
    with tempfile.TemporaryDirectory() as d:
        for name, text in vcs.items():
            path = Path(d) / f"{name}.smt2"
            path.write_text(text)
            groups = text.count(":named")
            if not solver:
                print(f"{name} VC: {groups} groups (no solver given)")
                continue
            out = subprocess.run([solver, str(path)], capture_output=True, text=True).stdout.split()
            print(f"{name} VC: {groups} groups, solver says {' '.join(out)}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nat-max", type=int, default=2)
    p.add_argument("--seq-max", type=int, default=2)
    p.add_argument("--solver")
    a = p.parse_args()
    main(Config(a.nat_max, a.seq_max, a.solver))
