import math

import numpy as np
import pytest

from carleman import (
    OracleFailure,
    ParametricCurve,
    carleman_product,
    figure_lune_polyline,
    get_test_function,
    half_disk_preset,
    reference_integrate,
    standard_test_functions,
    validate_lune,
)


class TestHalfDiskPreset:
    def test_validates(self, preset):
        diag = preset.validate()
        assert diag.all_ok
        assert diag.transversality_angle == pytest.approx(math.pi / 2, abs=1e-9)

    def test_pole_schedule(self, preset):
        assert preset.seq.pole(4) == -0.25 + 0j
        assert preset.seq.pole(1) == -1.0 + 0j
        assert preset.seq.pole(0) == -1.0 + 0j  # order 0 shares the N=1 pole

    def test_arc_orientations(self, preset):
        # data arc runs from i down to -i; complement from -i back to i
        g, c = preset.lune.gamma_arc, preset.lune.complement_arc
        assert complex(g.point(g.t_min)) == pytest.approx(1j)
        assert complex(g.point(g.t_max)) == pytest.approx(-1j)
        assert complex(c.point(c.t_min)) == pytest.approx(-1j)
        assert complex(c.point(c.t_max)) == pytest.approx(1j)

    def test_kernel_reduces_to_rational_form(self, preset):
        # with a = -1/N the kernel is ((Nz+1)/(Nzeta+1))^{N+1} / (2 pi i (zeta - z))
        zeta, z, n = 0.3 + 0j, 0.0 + 0.5j, 4
        # swap roles so both orderings are exercised
        for zeta, z in ((0.3 + 0j, 0.5j), (0.5j, 0.3 + 0j)):
            a = preset.seq.pole(n)
            closed = ((n * z + 1) / (n * zeta + 1)) ** (n + 1) / (2j * math.pi * (zeta - z))
            got = carleman_product(zeta, z, a, n)
            assert got == pytest.approx(closed, rel=1e-12)


class TestFigureLune:
    def test_polyline_lune_validates_origin_and_closure(self):
        lune = figure_lune_polyline()
        pre = half_disk_preset()
        diag = validate_lune(lune, pre.gamma)
        assert diag.closure_ok
        assert diag.gamma_in_disk


class TestTestFunctions:
    def test_catalog(self):
        names = [f.name for f in standard_test_functions()]
        assert names == ["one", "identity", "exp", "inv_z_plus_2",
                         "inv_pole_left", "cubic", "inv_pole_near_boundary"]
        assert get_test_function("inv_pole_near_boundary").stress
        with pytest.raises(KeyError):
            get_test_function("nope")

    def test_values(self):
        z = np.array([0.5 + 0j, 1j])
        assert np.allclose(get_test_function("one").value(z), [1.0, 1.0])
        assert np.allclose(get_test_function("identity").value(z), z)
        assert np.allclose(get_test_function("exp").value(z), np.exp(z))
        assert np.allclose(get_test_function("inv_z_plus_2").value(z), 1.0 / (z + 2.0))
        assert np.allclose(get_test_function("cubic").value(z), z ** 3 - 2 * z + 1)

    def test_cauchy_integral_formula_each(self, preset, rng):
        # every catalog function is holomorphic on the closed lune: the
        # Cauchy integral over the full boundary reproduces it
        circle = ParametricCurve.circle_arc(0.0, 0.98, 0.0, 2 * math.pi)
        pts = []
        while len(pts) < 5:
            z = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
            if abs(z) < 0.7:
                pts.append(z)
        for f in standard_test_functions():
            for z in pts:
                val = reference_integrate(
                    circle, lambda zeta: f.value(zeta) / (zeta - z), 1e-13)
                val /= 2j * math.pi
                exact = complex(f.value(np.asarray([z]))[0])
                assert abs(val - exact) < 1e-11, f.name


class TestReferenceIntegrator:
    def test_residue(self):
        circle = ParametricCurve.circle_arc(0.0, 1.0, 0.0, 2 * math.pi)
        v = reference_integrate(circle, lambda z: 1.0 / z, 1e-13)
        assert v == pytest.approx(2j * math.pi, abs=1e-12)

    def test_segment(self):
        seg = ParametricCurve.segment(-1j, 1j)
        v = reference_integrate(seg, lambda z: 1.0 / (z - 2.0), 1e-13)
        assert v == pytest.approx(complex(0.0, -2.0 * math.atan(0.5)), abs=1e-12)

    def test_impossible_target_raises(self):
        seg = ParametricCurve.segment(0j, 1.0 + 0j)
        with pytest.raises(OracleFailure):
            reference_integrate(seg, lambda z: np.exp(z), 0.0)

    def test_agrees_with_production_quadrature(self, rng):
        # oracle independence: 20 random smooth integrands on a random arc,
        # Romberg vs panelized Gauss must agree far beyond either's tolerance
        from carleman import integrate_contour
        arc = ParametricCurve.circle_arc(0.1 + 0.05j, 0.8, -1.2, 2.1)
        for _ in range(20):
            c = rng.normal(size=4) + 1j * rng.normal(size=4)
            p = complex(rng.uniform(2.0, 3.0), rng.uniform(-1.0, 1.0))

            def f(z, c=c, p=p):
                z = np.asarray(z, dtype=complex)
                return c[0] + c[1] * z + c[2] * np.exp(z) + c[3] / (z - p)

            ref = reference_integrate(arc, f, 1e-13)
            prod = integrate_contour(arc, f)
            assert abs(ref - prod.value) < 1e-11 * (1 + abs(ref))
