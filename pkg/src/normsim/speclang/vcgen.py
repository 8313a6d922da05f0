"""SMT-LIB verification conditions for symbolic step refinements and normed forward simulations.

Each conjunct group of the validity obligation is emitted as its own
negated, named assertion between ``(push 1)`` and ``(pop 1)``; the
certificate is valid iff every ``check-sat`` answers ``unsat``.
Norms are naturals compared with ``<``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .semantics import AssumptionViolated, free_vars, initial_disjuncts, prime, substitute, transition_disjuncts
from .smtlib import sort_of, symbol, to_smt
from .symcert import SymbolicCertificate, check_norm_types, refinement_shape
from .syntax import BOOL, NAT, SEQ, BinOp, NatLit, SpecAst, Var, conj, disj

__all__ = ["VCGroup", "AlphabetError", "refinement_groups", "forward_groups",
           "vcgen_refinement", "vcgen_forward", "render"]


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class VCGroup:
    name: str
    formula: object        # Expr that must be valid
    params: tuple = ()     # ((name, type), ...) declared inside the group
    comment: str = ""


def _renaming(specA: SpecAst, specB: SpecAst) -> dict:
    """Per action, B's parameter names mapped onto A's; checks the alphabet assumption."""
    if set(specA.var_names) & set(specB.var_names):
        raise AlphabetError("state variables of the two specs must be disjoint")
    actsB = dict(specB.actions)
    out = {}
    for a, pa in specA.actions:
        if a not in actsB:
            raise AlphabetError(f"action {a!r} of {specA.name} is not an action of {specB.name}")
        pb = actsB[a]
        if [t for _, t in pa] != [t for _, t in pb]:
            raise AlphabetError(f"parameters of {a!r} differ: {list(pa)} vs {list(pb)}")
        out[a] = {Var(q): Var(p) for (p, _), (q, _) in zip(pa, pb)}
    return out


def _imp(a, b):
    return BinOp("=>", a, b)


def _and(*xs):
    out = xs[0]
    for x in xs[1:]:
        out = BinOp("/\\", out, x)
    return out


def refinement_groups(specA, specB, cert: SymbolicCertificate) -> list:
    ren = _renaming(specA, specB)
    theta, emap = refinement_shape(cert, specA, specB)
    X, Y = specA.var_names, specB.var_names
    rho = conj(theta, *(BinOp("=", Var(y), e) for y, e in emap))
    rho_p = prime(rho, X + Y)
    groups = [
        VCGroup("start_domain", _imp(specA.initial, theta), (), "start states lie in the domain"),
        VCGroup("start_map", _imp(_and(specA.initial, rho), specB.initial), (),
                "start states map to start states"),
    ]
    for a, pa in specA.actions:
        groups.append(VCGroup(f"domain_{a}", _imp(_and(specA.transitions[a], theta), prime(theta, X)),
                              pa, f"the domain is closed under {a}"))
    for a, pa in specA.actions:
        if a == "tau":
            continue
        psi = substitute(specB.transitions[a], ren[a])
        groups.append(VCGroup(f"transfer_{a}", _imp(_and(specA.transitions[a], rho, rho_p), psi),
                              pa, f"{a} steps map to {a} steps"))
    stutter = conj(*(BinOp("=", Var(y), Var(y, True)) for y in Y))
    groups.append(VCGroup("transfer_tau",
                          _imp(_and(specA.transitions["tau"], rho, rho_p),
                               BinOp("\\/", specB.transitions["tau"], stutter)),
                          (), "tau steps map to tau steps or stutter"))
    return groups


def forward_groups(specA, specB, cert: SymbolicCertificate) -> list:
    ren = _renaming(specA, specB)
    check_norm_types(cert, specA, specB)
    X, Y = specA.var_names, specB.var_names
    rho = cert.rho
    rho_p = prime(rho, X + Y)
    starts = initial_disjuncts(specB)
    trans = {a: [(substitute(chi, ren[a]), {Var(y, True): substitute(e, ren[a]) for y, e in eff.items()})
                 for chi, eff in transition_disjuncts(specB, a)]
             for a in specA.action_names}
    tau_inst = [(chi, eff, {Var(y.name): e for y, e in eff.items()}) for chi, eff in trans["tau"]]

    def norm(a):
        n = cert.norm(a)
        return NatLit(0) if n is None else n

    def descent(a):
        return [_and(chi, substitute(rho, unp), BinOp("<", substitute(norm(a), unp), norm(a)))
                for chi, _, unp in tau_inst]

    groups = [VCGroup("start",
                      _imp(specA.initial, disj(*(substitute(rho, {Var(y): e for y, e in s.items()})
                                                 for s in starts))),
                      (), "every start state is related to a start state")]
    for a, pa in specA.actions:
        if a == "tau":
            continue
        match = [_and(chi, substitute(rho_p, eff)) for chi, eff in trans[a]]
        groups.append(VCGroup(f"transfer_{a}",
                              _imp(_and(specA.transitions[a], rho), disj(*match, *descent(a))),
                              pa, f"{a} steps are matched or the norm decreases"))
    stutter = prime(rho, X)
    match = [_and(chi, substitute(rho_p, eff)) for chi, eff, _ in tau_inst]
    groups.append(VCGroup("transfer_tau",
                          _imp(_and(specA.transitions["tau"], rho),
                               disj(stutter, *match, *descent("tau"))),
                          (), "tau steps are matched, stutter, or the norm decreases"))
    return groups


def _nonneg(sym, typ):
    if typ == NAT:
        return f"(assert (>= {sym} 0))"
    if typ == SEQ:
        return (f"(assert (forall ((i Int)) (=> (and (<= 0 i) (< i (seq.len {sym}))) "
                f"(>= (seq.nth {sym} i) 0))))")
    return None


def render(title: str, specA, specB, groups) -> str:
    used = set()
    for g in groups:
        used |= free_vars(g.formula)
    lines = [f"; {title}: {specA.name} -> {specB.name}",
             "; each group asserts the negation of one obligation; unsat means it holds",
             "(set-logic ALL)"]
    decls = []
    for spec in (specA, specB):
        for name, typ in spec.state_vars:
            for primed in (False, True):
                if Var(name, primed) in used:
                    decls.append((symbol(name, primed), typ))
    for sym, typ in decls:
        lines.append(f"(declare-const {sym} {sort_of(typ)})")
    for sym, typ in decls:
        h = _nonneg(sym, typ)
        if h:
            lines.append(h)
    for g in groups:
        lines.append("")
        lines.append(f"; {g.name}: {g.comment}")
        lines.append("(push 1)")
        for p, typ in g.params:
            lines.append(f"(declare-const {symbol(p)} {sort_of(typ)})")
        for p, typ in g.params:
            h = _nonneg(symbol(p), typ)
            if h:
                lines.append(h)
        lines.append(f"(assert (! (not {to_smt(g.formula)}) :named {g.name}))")
        lines.append("(check-sat)")
        lines.append("(pop 1)")
    return "\n".join(lines) + "\n"


def vcgen_refinement(specA: SpecAst, specB: SpecAst, cert: SymbolicCertificate) -> str:
    """Obligations for ``rho = theta /\\ y = e`` being a step refinement from A to B."""
    return render("step refinement", specA, specB, refinement_groups(specA, specB, cert))


def vcgen_forward(specA: SpecAst, specB: SpecAst, cert: SymbolicCertificate) -> str:
    """Quantifier-free obligations for ``(rho, n)`` being a normed forward simulation from A to B.

    Raises :class:`AssumptionViolated` unless B lists its start states and
    transition instances explicitly.
    """
    return render("normed forward simulation", specA, specB, forward_groups(specA, specB, cert))
