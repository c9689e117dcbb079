"""Matrix packings, gauge transformations, zero-curvature residuals."""

import pytest

from pssurf import kernel as K
from pssurf.classify import catalog_entry
from pssurf.forms import AssociatedForms, structure_residuals
from pssurf.kernel import Expr, parse
from pssurf.laxzoo import (
    MatrixForm,
    NonUnimodularError,
    from_forms,
    gauge_transform,
    mat,
    mat_inv,
    mat_is_zero,
    mat_mul,
    mat_scale,
    mat_sub,
    zero_curvature_residual,
)

I = Expr.atom(K.iunit)
S = Expr.atom(K.sqrt2)


class TestPackings:
    def test_sl2_packing_matches_stored_pair(self):
        for name in ("song-qu-qiao", "cubic-ch2", "factored-ch2", "skew-ch2"):
            entry = catalog_entry(name)
            built = from_forms(entry.forms, "sl2")
            assert built.X == entry.lax.X, name
            assert built.T == entry.lax.T, name

    def test_su2_packing_matches_stored_spherical_pair(self):
        entry = catalog_entry("mch-type")
        built = from_forms(entry.forms, "su2")
        assert built.X == entry.lax.X
        assert built.T == entry.lax.T

    def test_zero_forms_pack_to_zero(self):
        zero = AssociatedForms(((K.ZERO, K.ZERO),) * 3, 1)
        mf = from_forms(zero)
        assert mat_is_zero(mf.X) and mat_is_zero(mf.T)

    def test_trace_free_enforced(self):
        with pytest.raises(ValueError):
            MatrixForm(mat(1, 0, 0, 1), mat(0, 0, 0, 0))


class TestZeroCurvature:
    def test_catalog_pairs(self):
        for entry in (catalog_entry(n) for n in ("cubic-ch2", "mch-type")):
            res = zero_curvature_residual(entry.lax, entry.system)
            assert mat_is_zero(res)

    def test_negated_flow_breaks_curvature_linearly(self):
        entry = catalog_entry("cubic-ch2")
        from pssurf.jetcalc import PdeSystem

        negated = PdeSystem(entry.system.orders, -entry.system.F, entry.system.G)
        res = zero_curvature_residual(entry.lax, negated)
        # X12 = eta*(u - u2)/2, so the (1,2) residual is -eta*F
        eta = Expr.atom(K.eta)
        assert res[0][1] == -eta * entry.system.F
        assert res[0][0].is_zero()

    def test_residual_trace_free(self):
        entry = catalog_entry("skew-ch2")
        from pssurf.jetcalc import PdeSystem

        perturbed = PdeSystem(
            entry.system.orders, entry.system.F + parse("u1"), entry.system.G
        )
        res = zero_curvature_residual(entry.lax, perturbed)
        assert not mat_is_zero(res)
        assert (res[0][0] + res[1][1]).is_zero()


class TestGauge:
    def _su2_rotation(self):
        half_s = S / 2
        return mat(-I * half_s, half_s, half_s, -I * half_s)

    def test_identity_gauge(self):
        entry = catalog_entry("cubic-ch2")
        out = gauge_transform(entry.lax, mat(1, 0, 0, 1))
        assert out.X == entry.lax.X and out.T == entry.lax.T

    def test_su2_rotation_reaches_su2_packing(self):
        # the pseudospherical su2 packing is the constant-rotation gauge
        # image of the sl2 packing
        entry = catalog_entry("cubic-ch2")
        A = self._su2_rotation()
        rotated = gauge_transform(entry.lax, A)
        su2 = from_forms(entry.forms, "su2")
        assert rotated.X == su2.X
        assert rotated.T == su2.T

    def test_non_unimodular_rejected(self):
        entry = catalog_entry("cubic-ch2")
        with pytest.raises(NonUnimodularError):
            gauge_transform(entry.lax, mat(2, 0, 0, 1))

    def test_gauge_covariance_of_residual(self):
        entry = catalog_entry("cubic-ch2")
        from pssurf.jetcalc import PdeSystem

        broken = PdeSystem(entry.system.orders, -entry.system.F, entry.system.G)
        A = mat(1, Expr.atom(K.eta), 0, 1)
        res_direct = zero_curvature_residual(entry.lax, broken)
        res_gauged = zero_curvature_residual(gauge_transform(entry.lax, A), broken)
        Ainv = mat_inv(A)
        expected = mat_mul(mat_mul(A, res_direct), Ainv)
        assert mat_is_zero(mat_sub(res_gauged, expected))


class TestCurvatureStructureEquivalence:
    def test_zero_curvature_iff_structure_residuals(self):
        # positive direction on the catalog, negative on perturbations
        for name in ("song-qu-qiao", "cubic-ch2", "factored-ch2", "mch-type", "skew-ch2"):
            entry = catalog_entry(name)
            res = zero_curvature_residual(entry.lax, entry.system)
            r = structure_residuals(entry.forms, entry.system)
            assert mat_is_zero(res) == all(e.is_zero() for e in r)
        for name in ("cubic-ch2", "factored-ch2", "mch-type"):
            entry = catalog_entry(name)
            (f11, f12), (f21, f22), (f31, f32) = entry.forms.f
            bad = AssociatedForms(
                ((f11, f12 + parse("u - u2")), (f21, f22), (f31, f32)),
                entry.forms.delta,
            )
            algebra = "su2" if entry.forms.delta == -1 else "sl2"
            mf = from_forms(bad, algebra)
            res = zero_curvature_residual(mf, entry.system)
            r = structure_residuals(bad, entry.system)
            assert not mat_is_zero(res)
            assert not all(e.is_zero() for e in r)
