"""2x2 matrix-valued 1-forms, trace-free packings, gauge transformations and
zero-curvature checks.

The sl(2, R) packing puts the three associated 1-forms into
(1/2) [[w2, w1 - w3], [w1 + w3, -w2]].  The su(2)-style packings carry a
formal imaginary unit i with the rewrite i*i -> -1; the arrangement differs
between the two curvature signs (for delta = -1 the off-diagonal entries are
+-w1 + i*w3 and the diagonal holds i*w2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import kernel as K
from .forms import AssociatedForms
from .jetcalc import DerivationRules, EMPTY_RULES, PdeSystem, total_dt_mod_system, total_dx
from .kernel import Expr, KernelError

Matrix = tuple[tuple[Expr, Expr], tuple[Expr, Expr]]

I = Expr.atom(K.iunit)


class NonUnimodularError(KernelError):
    def __init__(self, det: Expr):
        super().__init__(f"gauge matrix determinant is {det}, not +-1")
        self.det = det


def mat(a, b, c, d) -> Matrix:
    cv = Expr._coerce
    return ((cv(a), cv(b)), (cv(c), cv(d)))


def mat_map(fn: Callable[[Expr], Expr], A: Matrix) -> Matrix:
    return tuple(tuple(fn(e) for e in row) for row in A)


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(2)), K.ZERO) for j in range(2))
        for i in range(2)
    )


def mat_scale(c, A: Matrix) -> Matrix:
    c = Expr._coerce(c)
    return mat_map(lambda e: c * e, A)


def mat_det(A: Matrix) -> Expr:
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def mat_inv(A: Matrix) -> Matrix:
    det = mat_det(A)
    if det.is_zero():
        raise KernelError("matrix is singular")
    adj = mat(A[1][1], -A[0][1], -A[1][0], A[0][0])
    return mat_map(lambda e: e / det, adj)


def mat_is_zero(A: Matrix) -> bool:
    return all(e.is_zero() for row in A for e in row)


def mat_strings(A: Matrix) -> list[list[str]]:
    return [[str(e) for e in row] for row in A]


@dataclass(frozen=True)
class MatrixForm:
    """Trace-free X dx + T dt."""

    X: Matrix
    T: Matrix
    algebra: str = "sl2"

    def __post_init__(self):
        for name, M in (("X", self.X), ("T", self.T)):
            tr = M[0][0] + M[1][1]
            if not tr.is_zero():
                raise ValueError(f"{name} is not trace-free: trace = {tr}")


def from_forms(forms: AssociatedForms, algebra: str = "sl2") -> MatrixForm:
    """Pack associated forms into a matrix pair.

    sl2 uses the real packing; su2 uses the formal-i packing appropriate to
    the curvature sign of the forms.
    """
    (f11, f12), (f21, f22), (f31, f32) = forms.f
    half = Expr.const(1) / 2
    if algebra == "sl2":
        X = mat_scale(half, mat(f21, f11 - f31, f11 + f31, -f21))
        T = mat_scale(half, mat(f22, f12 - f32, f12 + f32, -f22))
    elif algebra == "su2":
        if forms.delta == 1:
            X = mat_scale(half, mat(I * f31, f11 - I * f21, f11 + I * f21, -(I * f31)))
            T = mat_scale(half, mat(I * f32, f12 - I * f22, f12 + I * f22, -(I * f32)))
        else:
            X = mat_scale(half, mat(I * f21, f11 + I * f31, -f11 + I * f31, -(I * f21)))
            T = mat_scale(half, mat(I * f22, f12 + I * f32, -f12 + I * f32, -(I * f22)))
    else:
        raise ValueError(f"unknown algebra tag '{algebra}'")
    return MatrixForm(X, T, algebra)


def zero_curvature_residual(
    mf: MatrixForm,
    sys: PdeSystem | None,
    rules: DerivationRules = EMPTY_RULES,
) -> Matrix:
    """D_t X - D_x T + [X, T] reduced modulo the system; the zero matrix
    certifies the Lax pair."""
    dtX = mat_map(lambda e: total_dt_mod_system(e, sys, rules), mf.X)
    dxT = mat_map(lambda e: total_dx(e, rules), mf.T)
    comm = mat_sub(mat_mul(mf.X, mf.T), mat_mul(mf.T, mf.X))
    return mat_add(mat_sub(dtX, dxT), comm)


def gauge_transform(
    mf: MatrixForm,
    A: Matrix,
    rules: DerivationRules = EMPTY_RULES,
    sys: PdeSystem | None = None,
) -> MatrixForm:
    """Omega' = dA A^-1 + A Omega A^-1, for A with det A = +-1.

    A constant A needs no rules; otherwise its entries must be
    differentiable under the supplied rules.
    """
    det = mat_det(A)
    if not (det - 1).is_zero() and not (det + 1).is_zero():
        raise NonUnimodularError(det)
    Ainv = mat_inv(A)
    dxA = mat_map(lambda e: total_dx(e, rules), A)
    if any(not e.is_zero() for row in dxA for e in row) or sys is not None:
        dtA = mat_map(lambda e: total_dt_mod_system(e, sys, rules), A)
    else:
        dtA = mat(0, 0, 0, 0)
    X = mat_add(mat_mul(dxA, Ainv), mat_mul(mat_mul(A, mf.X), Ainv))
    T = mat_add(mat_mul(dtA, Ainv), mat_mul(mat_mul(A, mf.T), Ainv))
    return MatrixForm(X, T, mf.algebra)
