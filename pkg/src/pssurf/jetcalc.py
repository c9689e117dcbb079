"""Total derivatives over jet coordinates with pluggable derivation rules.

D_x acts by jet promotion (u_k -> u_{k+1}) plus explicit x-rules for
dependent auxiliaries; D_t is defined modulo an evolution system of the form
u_t - u_{2,t} = F, v_t - v_{2,t} = G, and only on expressions whose u, v
dependence factors through u - u2 and v - v2 (or through first-class m, n
symbols carrying their own t-rules).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from . import kernel as K
from .kernel import Coord, Expr, KernelError

MAX_ORDER = K.MAX_JET_ORDER


class JetCalcError(KernelError):
    pass


class MissingRuleError(JetCalcError):
    def __init__(self, coord: Coord):
        super().__init__(f"no derivation rule for dependent symbol '{coord}'")
        self.coord = coord


class IllFormedDependenceError(JetCalcError):
    def __init__(self, message: str):
        super().__init__(message)


@dataclass(frozen=True)
class PdeSystem:
    """Evolution laws u_t - u_{2,t} = F, v_t - v_{2,t} = G of orders (m, n)."""

    orders: tuple[int, int]
    F: Expr
    G: Expr
    delta: Expr = field(default_factory=lambda: K.ONE)

    def __post_init__(self):
        if not isinstance(self.delta, Expr):
            object.__setattr__(self, "delta", Expr.const(self.delta))
        mo, no = self.orders
        if mo < 2 or no < 2:
            raise ValueError("system orders must both be at least 2")
        allowed = {K.x, K.t}
        allowed |= {K.u(k) for k in range(mo + 1)}
        allowed |= {K.v(k) for k in range(no + 1)}
        for e in (self.F, self.G):
            bad = {
                c
                for c in e.coords()
                if c.kind in (K.KIND_INDEP, K.KIND_JET) and c not in allowed
            }
            if bad:
                raise ValueError(f"right-hand side mentions {sorted(map(str, bad))}")


@dataclass(frozen=True)
class DerivationRules:
    """x- and t-images of dependent symbols, plus optional jet constraints.

    ``constraints`` maps jet coordinates to their images (e.g. u2 -> u - m in
    contexts where m, n are first-class); it is applied after every total
    derivative so expressions stay inside a bounded coordinate set.
    """

    x_rules: Mapping[Coord, Expr] = field(default_factory=dict)
    t_rules: Mapping[Coord, Expr] = field(default_factory=dict)
    mn_independent: bool = False
    constraints: Mapping[Coord, Expr] = field(default_factory=dict)

    def __post_init__(self):
        for coord in itertools.chain(self.x_rules, self.t_rules):
            if coord.kind not in (K.KIND_DEP, K.KIND_JET):
                raise ValueError(f"rules may only target dependent symbols, got {coord}")
        for coord, image in self.x_rules.items():
            for s in image.coords():
                if s.kind == K.KIND_DEP and s not in self.x_rules:
                    raise ValueError(
                        f"x-rule of {coord} mentions {s}, which has no x-rule of its own"
                    )

    def close(self, e: Expr) -> Expr:
        if not self.constraints:
            return e
        while True:
            pending = {c: img for c, img in self.constraints.items() if c in e.coords()}
            if not pending:
                return e
            e = e.substitute(pending)


EMPTY_RULES = DerivationRules()


def total_dx(e: Expr, rules: DerivationRules = EMPTY_RULES) -> Expr:
    """Total x-derivative: partial in x plus jet promotion plus x-rules."""
    out = e.diff(K.x)
    for c in sorted(e.coords(), key=lambda c: c.key):
        if c.kind == K.KIND_JET:
            if c.order + 1 > MAX_ORDER:
                raise JetCalcError(f"jet order overflow promoting {c}")
            out = out + Expr.atom(K.jet(c.name, c.order + 1)) * e.diff(c)
        elif c.kind == K.KIND_DEP:
            rule = rules.x_rules.get(c)
            if rule is None:
                raise MissingRuleError(c)
            out = out + rule * e.diff(c)
    return rules.close(out)


def _factored_violations(e: Expr, base: str, top: int) -> list[str]:
    bad = []
    pair = e.diff(K.jet(base, 0)) + e.diff(K.jet(base, 2))
    if not pair.is_zero():
        bad.append(f"{base} + {base}2 pairing fails")
    for k in range(1, top + 1):
        if k == 2:
            continue
        if not e.diff(K.jet(base, k)).is_zero():
            bad.append(f"depends on {base}{k}")
    return bad


def check_factored_dependence(e: Expr, orders: tuple[int, int]) -> list[str]:
    """Why e's u, v dependence fails to factor through u - u2, v - v2."""
    top = max(orders[0], orders[1], *(c.order for c in e.coords() if c.kind == K.KIND_JET), 2)
    return _factored_violations(e, "u", top) + _factored_violations(e, "v", top)


def _dt_of_mn_jet(c: Coord, rules: DerivationRules) -> Expr:
    base_rule = rules.t_rules.get(K.jet(c.name, 0))
    if base_rule is None:
        raise MissingRuleError(c)
    out = base_rule
    for _ in range(c.order):
        out = total_dx(out, rules)
    return out


def total_dt_mod_system(
    e: Expr,
    sys: PdeSystem | None,
    rules: DerivationRules = EMPTY_RULES,
) -> Expr:
    """Total t-derivative reduced modulo the evolution system.

    The u, v dependence must factor through u - u2 and v - v2 (then
    (u - u2)_t is replaced by F and (v - v2)_t by G); m, n jets and dependent
    auxiliaries are handled through their t-rules.
    """
    coords = e.coords()
    out = e.diff(K.t)
    uv_jets = [c for c in coords if c.kind == K.KIND_JET and c.name in ("u", "v")]
    if uv_jets:
        if sys is None:
            raise IllFormedDependenceError(
                "expression depends on u, v jets but no system was supplied"
            )
        if rules.mn_independent:
            raise IllFormedDependenceError(
                "bare u, v jets have no local t-image when m, n are first-class; "
                "close the expression through the constraints first"
            )
        problems = check_factored_dependence(e, sys.orders)
        if problems:
            raise IllFormedDependenceError(
                "t-derivative not locally expressible: " + "; ".join(problems)
            )
        out = out + sys.F * e.diff(K.u(0)) + sys.G * e.diff(K.v(0))
    for c in sorted(coords, key=lambda c: c.key):
        if c.kind == K.KIND_JET and c.name in ("m", "n"):
            out = out + _dt_of_mn_jet(c, rules) * e.diff(c)
        elif c.kind == K.KIND_DEP:
            rule = rules.t_rules.get(c)
            if rule is None:
                raise MissingRuleError(c)
            out = out + rule * e.diff(c)
    return rules.close(out)


def check_rule_compatibility(
    rules: DerivationRules, sys: PdeSystem | None = None
) -> dict[Coord, Expr]:
    """Residuals D_t(x_rule(s)) - D_x(t_rule(s)) for every doubly-ruled symbol.

    All-zero residuals certify that the x- and t-rules are consistent on
    solutions of the system.
    """
    out: dict[Coord, Expr] = {}
    for coord in rules.x_rules:
        if coord not in rules.t_rules:
            continue
        lhs = total_dt_mod_system(rules.x_rules[coord], sys, rules)
        rhs = total_dx(rules.t_rules[coord], rules)
        out[coord] = lhs - rhs
    return out
