"""Constructive classification of Camassa-Holm-type systems describing
pseudospherical or spherical surfaces, plus the built-in example catalog.

Each constructor takes the free functional data of one classification
pattern, validates every hypothesis, and synthesizes the PDE system together
with its associated forms (and, for the third-order patterns, the Lax pair).
Hypothesis violations raise rich errors instead of producing invalid output.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel as K
from .forms import AssociatedForms, check_lemma31
from .jetcalc import PdeSystem, total_dx
from .kernel import Expr, KernelError, parse
from .laxzoo import MatrixForm, from_forms, mat, mat_scale, zero_curvature_residual


class HypothesisViolationError(KernelError):
    def __init__(self, condition: str, residual: Expr | str):
        super().__init__(f"hypothesis '{condition}' violated; residual: {residual}")
        self.condition = condition
        self.residual = str(residual)


@dataclass(frozen=True)
class Thm34Input:
    """Free data for the second-order-and-up pattern with the constant
    spectral slot in the middle row."""

    g: Expr
    h: Expr
    L: Expr
    M: Expr
    eta: Expr
    delta: int = 1
    orders: tuple[int, int] = (2, 2)


@dataclass(frozen=True)
class Thm36Input:
    """Free data for the third-order pattern u_t - u_{2,t} = A u3 + ..."""

    g: Expr
    h: Expr
    A: Expr
    L1: Expr
    N1: Expr
    M: Expr
    eta: Expr
    delta: int = 1


def _require_nonzero(e: Expr, condition: str):
    if e.is_zero():
        raise HypothesisViolationError(condition, e)


def _require_zero(e: Expr, condition: str):
    if not e.is_zero():
        raise HypothesisViolationError(condition, e)


def _require_reduced_dependence(e: Expr, name: str, xt_allowed: bool = True):
    """e may depend on x, t only through the combinations u - u2, v - v2."""
    problems = []
    for base in ("u", "v"):
        pair = e.diff(K.jet(base, 0)) + e.diff(K.jet(base, 2))
        if not pair.is_zero():
            problems.append(f"{base}/{base}2 pairing")
        for c in e.coords():
            if c.kind == K.KIND_JET and c.name == base and c.order not in (0, 2):
                problems.append(f"depends on {c}")
    if not xt_allowed:
        for c in (K.x, K.t):
            if not e.diff(c).is_zero():
                problems.append(f"depends on {c}")
    if problems:
        raise HypothesisViolationError(f"{name} reduced dependence", "; ".join(problems))


def _max_orders(*exprs: Expr) -> tuple[int, int]:
    mo = no = 0
    for e in exprs:
        for c in e.coords():
            if c.kind == K.KIND_JET and c.name == "u":
                mo = max(mo, c.order)
            elif c.kind == K.KIND_JET and c.name == "v":
                no = max(no, c.order)
    return mo, no


def wronskian(g: Expr, h: Expr) -> Expr:
    return g.diff(K.u(0)) * h.diff(K.v(0)) - g.diff(K.v(0)) * h.diff(K.u(0))


def _solve_fg(f, delta: int, const_row: int) -> tuple[Expr, Expr]:
    """Invert the two structure equations whose dx-coefficient depends on
    u, v for (F, G)."""
    (f11, f12), (f21, f22), (f31, f32) = f
    d = Expr.const(delta)
    rhs = {
        1: -f11.diff(K.t) + total_dx(f12) - (f31 * f22 - f32 * f21),
        2: -f21.diff(K.t) + total_dx(f22) - (f11 * f32 - f12 * f31),
        3: -f31.diff(K.t) + total_dx(f32) - d * (f11 * f22 - f12 * f21),
    }
    rows = [r for r in (1, 2, 3) if r != const_row]
    a, b = rows
    fa1 = {1: f11, 2: f21, 3: f31}[a]
    fb1 = {1: f11, 2: f21, 3: f31}[b]
    W = fa1.diff(K.u(0)) * fb1.diff(K.v(0)) - fa1.diff(K.v(0)) * fb1.diff(K.u(0))
    _require_nonzero(W, "frame wronskian nonzero")
    F = (fb1.diff(K.v(0)) * rhs[a] - fa1.diff(K.v(0)) * rhs[b]) / W
    G = (-fb1.diff(K.u(0)) * rhs[a] + fa1.diff(K.u(0)) * rhs[b]) / W
    return F, G


def _self_check(sys: PdeSystem, forms: AssociatedForms):
    report = check_lemma31(forms, sys)
    if not report.passed:
        failed = ", ".join(c.condition_id for c in report.failures())
        raise HypothesisViolationError("constructed forms verify", failed)


def build_theorem34(inp: Thm34Input) -> tuple[PdeSystem, AssociatedForms]:
    """Pattern with f21 constant: N = (D_x M + h L) / g."""
    _require_reduced_dependence(inp.g, "g")
    _require_reduced_dependence(inp.h, "h")
    _require_nonzero(wronskian(inp.g, inp.h), "wronskian of (g, h) nonzero")
    N = (total_dx(inp.M) + inp.h * inp.L) / inp.g
    _require_nonzero(inp.g * inp.M - inp.eta * inp.L, "g*M - eta*L nonzero")
    f = ((inp.g, inp.L), (inp.eta, inp.M), (inp.h, N))
    mo, no = inp.orders
    _generic_condition(inp.L, N, mo, no)
    F, G = _solve_fg(f, inp.delta, const_row=2)
    sys = _package_system(F, G, inp.orders, inp.delta)
    forms = AssociatedForms(f, inp.delta, eta_row=2, eta_value=inp.eta)
    _self_check(sys, forms)
    return sys, forms


def build_theorem35(inp: Thm34Input) -> tuple[PdeSystem, AssociatedForms]:
    """Pattern with f31 constant: N = (delta * D_x M + h L) / g; M non-constant."""
    _require_reduced_dependence(inp.g, "g")
    _require_reduced_dependence(inp.h, "h")
    _require_nonzero(wronskian(inp.g, inp.h), "wronskian of (g, h) nonzero")
    if inp.M.is_const():
        raise HypothesisViolationError("M non-constant", inp.M)
    N = (Expr.const(inp.delta) * total_dx(inp.M) + inp.h * inp.L) / inp.g
    f = ((inp.g, inp.L), (inp.h, N), (inp.eta, inp.M))
    mo, no = inp.orders
    _generic_condition(inp.L, N, mo, no)
    F, G = _solve_fg(f, inp.delta, const_row=3)
    sys = _package_system(F, G, inp.orders, inp.delta)
    forms = AssociatedForms(f, inp.delta, eta_row=3, eta_value=inp.eta)
    _self_check(sys, forms)
    return sys, forms


def _generic_condition(L: Expr, N: Expr, mo: int, no: int):
    lu = L.diff(K.u(mo - 1)) ** 2 + N.diff(K.u(mo - 1)) ** 2
    lv = L.diff(K.v(no - 1)) ** 2 + N.diff(K.v(no - 1)) ** 2
    _require_nonzero(lu * lv, "top-order coefficients present")


def _package_system(F: Expr, G: Expr, orders: tuple[int, int], delta: int) -> PdeSystem:
    mo, no = orders
    fo, go = _max_orders(F, G)
    if fo > mo or go > no:
        raise HypothesisViolationError(
            "output orders within bounds", f"built orders ({fo}, {go}) exceed ({mo}, {no})"
        )
    return PdeSystem((mo, no), F, G, Expr.const(delta))


def _check_pointwise_data(inp: Thm36Input):
    _require_reduced_dependence(inp.g, "g", xt_allowed=False)
    _require_reduced_dependence(inp.h, "h", xt_allowed=False)
    allowed = {K.u(0), K.u(1), K.v(0), K.v(1)}
    for name, e in (("A", inp.A), ("L1", inp.L1), ("N1", inp.N1), ("M", inp.M)):
        extra = {
            c
            for c in e.coords()
            if c.kind in (K.KIND_INDEP, K.KIND_JET, K.KIND_DEP) and c not in allowed
        }
        if extra:
            raise HypothesisViolationError(
                f"{name} depends only on (u, u1, v, v1)", ", ".join(sorted(map(str, extra)))
            )


def _third_order_constraint(inp: Thm36Input, signed: bool) -> None:
    """Exactness D_x M + h L1 - g N1 = 0 (with delta on D_x M when signed),
    reported together with its cross-derivative consequence."""
    lhs = inp.g * inp.N1 - inp.h * inp.L1
    cross = lhs.diff(K.u(2)).diff(K.v(1)) - lhs.diff(K.u(1)).diff(K.v(2))
    if not cross.is_zero():
        raise HypothesisViolationError(
            "cross-derivative compatibility of g*N1 - h*L1", cross
        )
    d = Expr.const(inp.delta) if signed else K.ONE
    _require_zero(d * total_dx(inp.M) + inp.h * inp.L1 - inp.g * inp.N1,
                  "D_x M + h*L1 - g*N1 vanishes")


def build_theorem36(inp: Thm36Input) -> tuple[PdeSystem, AssociatedForms, MatrixForm]:
    """Third-order pattern with f21 constant."""
    _check_pointwise_data(inp)
    _require_nonzero(wronskian(inp.g, inp.h), "wronskian of (g, h) nonzero")
    _require_nonzero(
        inp.L1 * inp.eta - inp.g * (inp.M + inp.eta * inp.A),
        "eta*L1 - g*(M + eta*A) nonzero",
    )
    _third_order_constraint(inp, signed=False)
    L = -inp.A * inp.g + inp.L1
    N = -inp.A * inp.h + inp.N1
    f = ((inp.g, L), (inp.eta, inp.M), (inp.h, N))
    F, G = _solve_fg(f, inp.delta, const_row=2)
    sys = _package_system(F, G, (3, 3), inp.delta)
    forms = AssociatedForms(f, inp.delta, eta_row=2, eta_value=inp.eta)
    _self_check(sys, forms)
    lax = from_forms(forms, "sl2" if inp.delta == 1 else "su2")
    _lax_self_check(lax, sys)
    return sys, forms, lax


def build_theorem37(inp: Thm36Input) -> tuple[PdeSystem, AssociatedForms, MatrixForm]:
    """Third-order pattern with f31 constant; M non-constant."""
    _check_pointwise_data(inp)
    _require_nonzero(wronskian(inp.g, inp.h), "wronskian of (g, h) nonzero")
    if inp.M.is_const():
        raise HypothesisViolationError("M non-constant", inp.M)
    _third_order_constraint(inp, signed=True)
    L = -inp.A * inp.g + inp.L1
    N = -inp.A * inp.h + inp.N1
    f = ((inp.g, L), (inp.h, N), (inp.eta, inp.M))
    F, G = _solve_fg(f, inp.delta, const_row=3)
    sys = _package_system(F, G, (3, 3), inp.delta)
    forms = AssociatedForms(f, inp.delta, eta_row=3, eta_value=inp.eta)
    _self_check(sys, forms)
    lax = from_forms(forms, "sl2" if inp.delta == 1 else "su2")
    _lax_self_check(lax, sys)
    return sys, forms, lax


def _lax_self_check(lax: MatrixForm, sys: PdeSystem):
    res = zero_curvature_residual(lax, sys)
    if any(not e.is_zero() for row in res for e in row):
        raise HypothesisViolationError("zero curvature of constructed pair", "nonzero matrix")


def check_corollary33(sys: PdeSystem) -> bool:
    """Right-hand sides must be linear in the top-order jets."""
    um, vn = K.u(sys.orders[0]), K.v(sys.orders[1])
    for e in (sys.F, sys.G):
        for a in (um, vn):
            for b in (um, vn):
                if not e.diff(a).diff(b).is_zero():
                    return False
    return True


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    system: PdeSystem
    forms: AssociatedForms
    lax: MatrixForm | None = None
    theorem_eta: tuple[int, Expr] | None = None  # (row of the constant slot, value)


def _P(s: str) -> Expr:
    return parse(s)


def _entry_song_qu_qiao() -> CatalogEntry:
    Q = _P("u1*v1 - u*v + u*v1 - u1*v")
    mh, nh = _P("u - u2"), _P("v - v2")
    F = total_dx(mh * Q)
    G = total_dx(nh * Q)
    sys = PdeSystem((3, 3), F, G, K.ONE)
    Ep = _P("exp((eta-1)*x)")
    Em = 1 / Ep
    eta = Expr.atom(K.eta)
    f11 = eta * (mh * Ep + nh * Em)
    f12 = eta * Q * (mh * Ep + nh * Em) + (_P("u + u1") * Ep + _P("v - v1") * Em) / (2 * eta)
    f21 = eta
    f22 = 1 / (2 * eta**2) + Q
    f31 = -eta * (mh * Ep - nh * Em)
    f32 = -eta * Q * (mh * Ep - nh * Em) - (_P("u + u1") * Ep - _P("v - v1") * Em) / (2 * eta)
    forms = AssociatedForms(((f11, f12), (f21, f22), (f31, f32)), 1, 2, eta)
    half = K.ONE / 2
    X = mat_scale(half, mat(eta, 2 * eta * mh * Ep, 2 * eta * nh * Em, -eta))
    T = mat_scale(
        half,
        mat(
            1 / (2 * eta**2) + Q,
            (2 * eta * Q * mh + _P("u + u1") / eta) * Ep,
            (2 * eta * Q * nh + _P("v - v1") / eta) * Em,
            -(1 / (2 * eta**2)) - Q,
        ),
    )
    return CatalogEntry(
        "song-qu-qiao",
        "coupled cubic flow with conserved exponential frame",
        sys,
        forms,
        MatrixForm(X, T, "sl2"),
        (2, eta),
    )


def _entry_cubic_ch2() -> CatalogEntry:
    mh, nh = _P("u - u2"), _P("v - v2")
    B = _P("u*v - u1*v1")
    C = _P("u*v1 - u1*v")
    half = K.ONE / 2
    F = half * total_dx(mh * B) - half * mh * C
    G = half * total_dx(nh * B) + half * nh * C
    sys = PdeSystem((3, 3), F, G, K.ONE)
    eta = Expr.atom(K.eta)
    f11 = half * eta * (mh - nh)
    f12 = eta / 4 * B * (mh - nh) + (_P("u - u1") - _P("v + v1")) / (2 * eta)
    f21 = Expr.const(-1)
    f22 = -1 / eta**2 - half * (B + C)
    f31 = -half * eta * (mh + nh)
    f32 = -eta / 4 * B * (mh + nh) - (_P("u - u1") + _P("v + v1")) / (2 * eta)
    forms = AssociatedForms(((f11, f12), (f21, f22), (f31, f32)), 1, 2, Expr.const(-1))
    X = mat_scale(half, mat(-1, eta * mh, -eta * nh, 1))
    T = mat_scale(
        half,
        mat(
            -1 / eta**2 - half * (B + C),
            half * eta * B * mh + _P("u - u1") / eta,
            -half * eta * B * nh - _P("v + v1") / eta,
            1 / eta**2 + half * (B + C),
        ),
    )
    return CatalogEntry(
        "cubic-ch2",
        "two-component cubic Camassa-Holm flow",
        sys,
        forms,
        MatrixForm(X, T, "sl2"),
        (2, Expr.const(-1)),
    )


def _entry_factored_ch2() -> CatalogEntry:
    mh, nh = _P("u - u2"), _P("v - v2")
    prod = _P("(u - u1)*(v + v1)")
    half = K.ONE / 2
    F = -half * mh * prod
    G = half * nh * prod
    sys = PdeSystem((2, 2), F, G, K.ONE)
    eta = Expr.atom(K.eta)
    f11 = half * eta * (nh - mh)
    f12 = (_P("v + v1") - _P("u - u1")) / (2 * eta)
    f21 = K.ONE
    f22 = 1 / eta**2 + half * prod
    f31 = -half * eta * (mh + nh)
    f32 = -(_P("u - u1") + _P("v + v1")) / (2 * eta)
    forms = AssociatedForms(((f11, f12), (f21, f22), (f31, f32)), 1, 2, K.ONE)
    X = mat_scale(half, mat(1, eta * nh, -eta * mh, -1))
    T = mat_scale(
        half,
        mat(
            1 / eta**2 + half * prod,
            _P("v + v1") / eta,
            -_P("u - u1") / eta,
            -1 / eta**2 - half * prod,
        ),
    )
    return CatalogEntry(
        "factored-ch2",
        "second-order flow with factored right-hand side",
        sys,
        forms,
        MatrixForm(X, T, "sl2"),
        (2, K.ONE),
    )


def _entry_mch_type() -> CatalogEntry:
    mh, nh = _P("u - u2"), _P("v - v2")
    R = _P("-1/2*(u^2 + v^2 - u1^2 - v1^2) - u*v1 + u1*v")
    F = total_dx(R * mh) - 2 * Expr.atom(K.u(1))
    G = total_dx(R * nh) - 2 * Expr.atom(K.v(1))
    sys = PdeSystem((3, 3), F, G, Expr.const(-1))
    f11 = -nh
    f12 = -R * nh + _P("v + u1")
    f21 = K.ONE
    f22 = R - 1
    f31 = mh
    f32 = R * mh - _P("u - v1")
    forms = AssociatedForms(((f11, f12), (f21, f22), (f31, f32)), -1, 2, K.ONE)
    i = Expr.atom(K.iunit)
    half = K.ONE / 2
    X = mat_scale(half, mat(i, -nh + i * mh, nh + i * mh, -i))
    T = mat_scale(
        half,
        mat(
            i * (R - 1),
            -R * (nh - i * mh) + _P("v + u1") + i * (_P("v1 - u")),
            R * (nh + i * mh) - _P("v + u1") + i * (_P("v1 - u")),
            -i * (R - 1),
        ),
    )
    return CatalogEntry(
        "mch-type",
        "modified Camassa-Holm-type flow on spherical surfaces",
        sys,
        forms,
        MatrixForm(X, T, "su2"),
        (2, K.ONE),
    )


def _entry_skew_ch2() -> CatalogEntry:
    mh, nh = _P("u - u2"), _P("v - v2")
    Pfx = _P("u*v1 - u1*v")
    B = _P("u*v - u1*v1")
    half = K.ONE / 2
    F = half * total_dx(mh * Pfx) - half * mh * B
    G = half * total_dx(nh * Pfx) + half * nh * B
    sys = PdeSystem((3, 3), F, G, K.ONE)
    eta = Expr.atom(K.eta)
    f11 = -half * eta * (mh - nh)
    f12 = -eta / 4 * Pfx * (mh - nh) - (_P("u - u1") - _P("v + v1")) / (2 * eta)
    f21 = K.ONE
    f22 = 1 / eta**2 + half * _P("(u - u1)*(v + v1)")
    f31 = -half * eta * (mh + nh)
    f32 = -eta / 4 * Pfx * (mh + nh) - (_P("u - u1") + _P("v + v1")) / (2 * eta)
    forms = AssociatedForms(((f11, f12), (f21, f22), (f31, f32)), 1, 2, K.ONE)
    X = mat_scale(half, mat(1, eta * nh, -eta * mh, -1))
    T = mat_scale(
        half,
        mat(
            1 / eta**2 + half * _P("(u - u1)*(v + v1)"),
            half * eta * Pfx * nh + _P("v + v1") / eta,
            -half * eta * Pfx * mh - _P("u - u1") / eta,
            -1 / eta**2 - half * _P("(u - u1)*(v + v1)"),
        ),
    )
    return CatalogEntry(
        "skew-ch2",
        "two-component flow with antisymmetric flux",
        sys,
        forms,
        MatrixForm(X, T, "sl2"),
        (2, K.ONE),
    )


_CATALOG_BUILDERS = (
    _entry_song_qu_qiao,
    _entry_cubic_ch2,
    _entry_factored_ch2,
    _entry_mch_type,
    _entry_skew_ch2,
)

_catalog_cache: list[CatalogEntry] | None = None


def catalog() -> list[CatalogEntry]:
    global _catalog_cache
    if _catalog_cache is None:
        _catalog_cache = [b() for b in _CATALOG_BUILDERS]
    return list(_catalog_cache)


def catalog_entry(name: str) -> CatalogEntry:
    for entry in catalog():
        if entry.name == name:
            return entry
    raise KeyError(f"unknown catalog entry '{name}'")
