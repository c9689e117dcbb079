"""Differential 1- and 2-forms in dx, dt and the structure-equation verifier.

A system u_t - u_{2,t} = F, v_t - v_{2,t} = G describes pseudospherical
(delta = +1) or spherical (delta = -1) surfaces when three 1-forms
omega_i = f_i1 dx + f_i2 dt satisfy the constant-curvature structure
equations on solutions.  The verifier checks, for supplied coefficient
functions f_ij: the dependence conditions on the dx-coefficients, the
nondegeneracy of the frame Jacobian, the three structure residuals, and the
metric nondegeneracy; "nonzero" conditions are certified as
not-identically-zero in the polynomial ring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from . import kernel as K
from .jetcalc import (
    DerivationRules,
    EMPTY_RULES,
    IllFormedDependenceError,
    PdeSystem,
    total_dt_mod_system,
    total_dx,
)
from .kernel import Expr


@dataclass(frozen=True)
class OneForm:
    a: Expr  # dx coefficient
    b: Expr  # dt coefficient


@dataclass(frozen=True)
class TwoForm:
    c: Expr  # dx ^ dt coefficient


def wedge(omega: OneForm, theta: OneForm) -> TwoForm:
    return TwoForm(omega.a * theta.b - omega.b * theta.a)


def exterior_d_mod_system(
    omega: OneForm,
    sys: PdeSystem | None,
    rules: DerivationRules = EMPTY_RULES,
) -> TwoForm:
    """d(a dx + b dt) reduced modulo the system: (D_x b - D_t a) dx ^ dt.

    Valid once the dx-coefficient dependence conditions hold, so that no
    du_k ^ dx terms survive; callers assert those separately.
    """
    return TwoForm(total_dx(omega.b, rules) - total_dt_mod_system(omega.a, sys, rules))


@dataclass(frozen=True)
class AssociatedForms:
    """The six coefficient functions f_ij with the curvature sign."""

    f: tuple[tuple[Expr, Expr], tuple[Expr, Expr], tuple[Expr, Expr]]
    delta: int
    eta_row: int | None = None  # which f_i1 plays the constant spectral slot
    eta_value: Expr | None = None

    def one_forms(self) -> tuple[OneForm, OneForm, OneForm]:
        return tuple(OneForm(a, b) for a, b in self.f)

    def swapped(self) -> "AssociatedForms":
        """The equivalent triple (omega2, omega1, -omega3); the structure
        equations are invariant under this exchange."""
        (f11, f12), (f21, f22), (f31, f32) = self.f
        return AssociatedForms(
            ((f21, f22), (f11, f12), (-f31, -f32)),
            self.delta,
            eta_row={1: 2, 2: 1, 3: 3}.get(self.eta_row),
            eta_value=self.eta_value if self.eta_row != 3 else None,
        )


@dataclass(frozen=True)
class ConditionReport:
    condition_id: str
    residual_text: str
    verdict: bool

    def as_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "residual_text": self.residual_text,
            "verdict": "pass" if self.verdict else "fail",
        }


@dataclass(frozen=True)
class Lemma31Report:
    conditions: tuple[ConditionReport, ...]
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", all(c.verdict for c in self.conditions))

    def failures(self) -> list[ConditionReport]:
        return [c for c in self.conditions if not c.verdict]

    def to_json(self) -> str:
        data = {
            "passed": self.passed,
            "conditions": [c.as_dict() for c in self.conditions],
        }
        return json.dumps(data, indent=2, sort_keys=True)

    def to_table(self) -> str:
        width = max(len(c.condition_id) for c in self.conditions)
        lines = []
        for c in self.conditions:
            mark = "pass" if c.verdict else "FAIL"
            residual = c.residual_text
            if len(residual) > 72:
                residual = residual[:69] + "..."
            lines.append(f"{c.condition_id.ljust(width)}  {mark}  {residual}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _dx_coefficient_conditions(
    forms: AssociatedForms, orders: tuple[int, int]
) -> Iterable[ConditionReport]:
    mo, no = orders
    for i, (fi1, fi2) in enumerate(forms.f, start=1):
        pair_u = fi1.diff(K.u(0)) + fi1.diff(K.u(2))
        pair_v = fi1.diff(K.v(0)) + fi1.diff(K.v(2))
        yield ConditionReport(f"f{i}1-pairs-u-with-u2", str(pair_u), pair_u.is_zero())
        yield ConditionReport(f"f{i}1-pairs-v-with-v2", str(pair_v), pair_v.is_zero())
        stray = K.ZERO
        for k in range(1, mo + 1):
            if k != 2:
                stray = stray + fi1.diff(K.u(k)) ** 2
        for k in range(1, no + 1):
            if k != 2:
                stray = stray + fi1.diff(K.v(k)) ** 2
        yield ConditionReport(
            f"f{i}1-free-of-odd-jets", str(stray), stray.is_zero()
        )
        top = fi2.diff(K.u(mo)) ** 2 + fi2.diff(K.v(no)) ** 2
        yield ConditionReport(
            f"f{i}2-free-of-top-order", str(top), top.is_zero()
        )


def _frame_jacobian(forms: AssociatedForms) -> Expr:
    rows = [f[0] for f in forms.f]
    du = [r.diff(K.u(0)) for r in rows]
    dv = [r.diff(K.v(0)) for r in rows]

    def det(i, j):
        return du[i] * dv[j] - dv[i] * du[j]

    return det(0, 1) ** 2 + det(1, 2) ** 2 + det(0, 2) ** 2


def structure_residuals(
    forms: AssociatedForms,
    sys: PdeSystem,
    rules: DerivationRules = EMPTY_RULES,
) -> tuple[Expr, Expr, Expr]:
    """Residuals of d(omega1) = omega3 ^ omega2, d(omega2) = omega1 ^ omega3,
    d(omega3) = delta * omega1 ^ omega2 reduced modulo the system."""
    w1, w2, w3 = forms.one_forms()
    r1 = exterior_d_mod_system(w1, sys, rules).c - wedge(w3, w2).c
    r2 = exterior_d_mod_system(w2, sys, rules).c - wedge(w1, w3).c
    r3 = exterior_d_mod_system(w3, sys, rules).c - Expr.const(forms.delta) * wedge(w1, w2).c
    return r1, r2, r3


def check_lemma31(
    forms: AssociatedForms,
    sys: PdeSystem,
    rules: DerivationRules = EMPTY_RULES,
) -> Lemma31Report:
    """Full verification that (sys, forms) describes pseudospherical or
    spherical surfaces.  Failures are reported, never raised."""
    conditions = list(_dx_coefficient_conditions(forms, sys.orders))
    gate_ok = all(c.verdict for c in conditions)

    jac = _frame_jacobian(forms)
    conditions.append(
        ConditionReport("frame-jacobian-nondegenerate", str(jac), not jac.is_zero())
    )

    if gate_ok:
        try:
            r1, r2, r3 = structure_residuals(forms, sys, rules)
            conditions.append(ConditionReport("structure-residual-1", str(r1), r1.is_zero()))
            conditions.append(ConditionReport("structure-residual-2", str(r2), r2.is_zero()))
            conditions.append(ConditionReport("structure-residual-3", str(r3), r3.is_zero()))
        except IllFormedDependenceError as err:
            conditions.append(ConditionReport("structure-residuals", str(err), False))
    else:
        conditions.append(
            ConditionReport(
                "structure-residuals",
                "skipped: dx-coefficient conditions failed",
                False,
            )
        )

    (f11, f12), (f21, f22), _ = forms.f
    metric = f11 * f22 - f12 * f21
    conditions.append(
        ConditionReport("metric-nondegenerate", str(metric), not metric.is_zero())
    )
    return Lemma31Report(tuple(conditions))
