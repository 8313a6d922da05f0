"""The bundled channel example, elaborated with explicit certificates."""
from __future__ import annotations

from dataclasses import dataclass

from ..lts import Automaton
from ..simulation import Forward, Refinement
from .elaborate import Bounds, elaborate_explicit, explicit_forward, explicit_refinement
from .fixtures import fixture_path, load_fixture_spec
from .symcert import load_symbolic_certificate, refinement_shape

__all__ = ["ChannelExample", "channel_example"]


@dataclass(frozen=True)
class ChannelExample:
    channel: Automaton          # Channel within (nat_max, seq_max)
    channel_wide: Automaton     # Channel with room for both inner buffers
    two_channels: Automaton
    refinement: Refinement      # two_channels -> channel_wide
    forward: Forward            # channel -> two_channels


def channel_example(nat_max: int = 2, seq_max: int = 2) -> ChannelExample:
    ch, tc = load_fixture_spec("channel.spec"), load_fixture_spec("twochannels.spec")
    small, wide = Bounds(nat_max, seq_max), Bounds(nat_max, 2 * seq_max)
    A = elaborate_explicit(ch, small)
    A_wide = elaborate_explicit(ch, wide)
    B = elaborate_explicit(tc, small)
    rcert = load_symbolic_certificate(fixture_path("twochannels_to_channel.refinement"))
    theta, emap = refinement_shape(rcert, tc, ch)
    r = explicit_refinement(tc, small, ch, wide, theta, dict(emap))
    fcert = load_symbolic_certificate(fixture_path("channel_to_twochannels.forward"))
    f = explicit_forward(ch, small, tc, small, fcert.rho, fcert.norms, A)
    return ChannelExample(A, A_wide, B, r, f)
