"""Symbolic certificates: ``rho``, ``theta`` and per-action norm expressions.

File format, one definition per line, indented lines continue the previous
one and ``#`` starts a comment::

    rho = buffer = buffer2 || buffer1
    theta = true
    norm * = if buffer1 ~= {} /\\ buffer2 = {} then 1 else 0
    norm send = 0

``norm *`` applies to every action without its own line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .semantics import conjuncts, free_vars
from .syntax import NAT, TRUE, BinOp, Expr, SpecTypeError, Var, conj, format_expr, parse_expr, type_of

__all__ = [
    "SymbolicCertificate", "CertificateShapeError", "parse_symbolic_certificate",
    "load_symbolic_certificate", "refinement_shape", "format_symbolic_certificate",
]


class CertificateShapeError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolicCertificate:
    rho: Expr = TRUE
    theta: Expr = TRUE
    expr_map: Optional[tuple] = None     # ((y, e), ...) once derived
    norms: Mapping = field(default_factory=dict, hash=False)

    def norm(self, action: str):
        return self.norms.get(action, self.norms.get("*"))


_HEAD = re.compile(r"(rho|theta)\s*=(.*)\Z|norm\s+([A-Za-z_][A-Za-z0-9_]*|\*)\s*=(.*)\Z")


def parse_symbolic_certificate(text: str) -> SymbolicCertificate:
    entries: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0] in " \t":
            if not entries:
                raise CertificateShapeError(f"line {lineno}: continuation before any definition")
            entries[-1][2] += " " + line.strip()
            continue
        m = _HEAD.match(line)
        if not m:
            raise CertificateShapeError(f"line {lineno}: expected 'rho =', 'theta =' or 'norm <action> ='")
        if m.group(1):
            entries.append([m.group(1), None, m.group(2), lineno])
        else:
            entries.append(["norm", m.group(3), m.group(4), lineno])
    rho, theta, norms = TRUE, TRUE, {}
    seen = set()
    for kind, action, body, lineno in entries:
        key = (kind, action)
        if key in seen:
            raise CertificateShapeError(f"line {lineno}: duplicate {kind} definition")
        seen.add(key)
        try:
            e = parse_expr(body)
        except ValueError as exc:
            raise CertificateShapeError(f"line {lineno}: {exc}") from None
        if kind == "rho":
            rho = e
        elif kind == "theta":
            theta = e
        else:
            norms[action] = e
    return SymbolicCertificate(rho, theta, None, norms)


def load_symbolic_certificate(path) -> SymbolicCertificate:
    with open(path) as fh:
        return parse_symbolic_certificate(fh.read())


def format_symbolic_certificate(cert: SymbolicCertificate) -> str:
    lines = [f"rho = {format_expr(cert.rho)}", f"theta = {format_expr(cert.theta)}"]
    lines += [f"norm {a} = {format_expr(e)}" for a, e in cert.norms.items()]
    return "\n".join(lines) + "\n"


def refinement_shape(cert: SymbolicCertificate, specA, specB) -> tuple:
    """Split ``rho`` into the domain ``theta`` and one defining expression per Y variable.

    A conjunct ``y = e`` (either orientation) with ``e`` over X defines
    ``y``; every other conjunct must be over X and joins the domain.
    """
    X, Y = set(specA.var_names), set(specB.var_names)
    env_a = specA.var_types
    defs, extra = {}, []
    for c in conjuncts(cert.rho):
        found = None
        if isinstance(c, BinOp) and c.op == "=":
            for lhs, rhs in ((c.left, c.right), (c.right, c.left)):
                if (isinstance(lhs, Var) and not lhs.primed and lhs.name in Y
                        and lhs.name not in defs and _over(rhs, X)):
                    found = (lhs.name, rhs)
                    break
        if found:
            defs[found[0]] = found[1]
        elif _over(c, X):
            extra.append(c)
        else:
            raise CertificateShapeError(f"conjunct {format_expr(c)} is neither y = e(X) nor over X")
    missing = [y for y in specB.var_names if y not in defs]
    if missing:
        raise CertificateShapeError(f"no defining equation for {', '.join(missing)}")
    if not _over(cert.theta, X):
        raise CertificateShapeError("theta must mention only variables of the lower spec")
    theta = conj(cert.theta, *extra)
    try:
        type_of(theta, env_a)
        for y, e in defs.items():
            if type_of(e, env_a) != specB.var_types[y]:
                raise CertificateShapeError(f"type of the expression for {y} does not match")
    except SpecTypeError as exc:
        raise CertificateShapeError(str(exc)) from None
    return theta, tuple((y, defs[y]) for y in specB.var_names)


def _over(e, names) -> bool:
    return all(not v.primed and v.name in names for v in free_vars(e))


def check_norm_types(cert: SymbolicCertificate, specA, specB) -> None:
    env = {**specA.var_types, **specB.var_types}
    for a, params in specA.actions:
        n = cert.norm(a)
        if n is None:
            continue
        got = type_of(n, {**env, **dict(params)}, specA.var_types)
        if got != NAT:
            raise SpecTypeError(f"norm for {a} must be Nat", n)
