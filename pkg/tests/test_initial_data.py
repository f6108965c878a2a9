"""Initial-data families: construction, determinism, decay contracts."""

import numpy as np
import pytest

from mhdlab.fields import divergence, lp_norm
from mhdlab.initial_data import generate_initial_data, initial_size_report
from mhdlab.morrey import MorreyParams, morrey_norm


class TestSingleMode:
    def test_worked_example(self, grid32):
        w0, j0 = generate_initial_data(
            {"family": "single_mode", "wavevector": [1, 0, 0], "component": 3, "amplitude": 1e-3},
            grid32,
        )
        x1 = grid32.meshgrid()[0]
        assert np.abs(w0.values[2] - 1e-3 * np.cos(x1)).max() <= 1e-15
        assert np.abs(w0.values[:2]).max() <= 1e-15
        assert np.abs(j0.values).max() == 0.0

    def test_rejects_parallel_component(self, grid32):
        with pytest.raises(ValueError, match="orthogonal"):
            generate_initial_data(
                {"family": "single_mode", "wavevector": [1, 0, 0], "component": 1}, grid32
            )

    def test_rejects_zero_wavevector(self, grid32):
        with pytest.raises(ValueError, match="nonzero"):
            generate_initial_data(
                {"family": "single_mode", "wavevector": [0, 0, 0], "component": 1}, grid32
            )


class TestRandomDivfree:
    def test_deterministic_per_seed(self, grid32):
        spec = {"family": "random_divfree", "seed": 9, "cutoff": 6, "amplitude": 0.5}
        a, _ = generate_initial_data(spec, grid32)
        b, _ = generate_initial_data(spec, grid32)
        assert np.array_equal(a.values, b.values)

    def test_different_seeds_differ(self, grid32):
        a, _ = generate_initial_data({"family": "random_divfree", "seed": 1}, grid32)
        b, _ = generate_initial_data({"family": "random_divfree", "seed": 2}, grid32)
        assert not np.array_equal(a.values, b.values)

    def test_solenoidal_and_mean_free(self, grid32):
        w0, _ = generate_initial_data({"family": "random_divfree", "seed": 4}, grid32)
        assert np.abs(divergence(w0).values).max() <= 1e-10 * np.abs(w0.values).max()
        assert np.abs(w0.values.mean(axis=(1, 2, 3))).max() <= 1e-14


@pytest.fixture(scope="module")
def grid64():
    from mhdlab.fields import make_grid

    return make_grid(64, 2 * np.pi)


class TestVortexRing:
    # a tube at least 4 spacings wide that decays to 1e-8 inside the half-box
    # needs the finer grid

    def test_solenoidal_after_projection(self, grid64):
        spec = {"family": "gaussian_vortex_ring", "radius": 0.6, "core_width": 0.4, "amplitude": 1e-3}
        w0, _ = generate_initial_data(spec, grid64)
        assert np.abs(divergence(w0).values).max() <= 1e-10 * np.abs(w0.values).max()
        assert lp_norm(w0, np.inf) == pytest.approx(1e-3, rel=1e-12)

    def test_norm_scales_linearly_in_amplitude(self, grid64):
        values = []
        for eps in (1e-3, 2e-3):
            spec = {
                "family": "gaussian_vortex_ring",
                "radius": 0.6,
                "core_width": 0.4,
                "amplitude": eps,
            }
            w0, _ = generate_initial_data(spec, grid64)
            values.append(morrey_norm(w0, MorreyParams(1.0, 1.0)))
        assert values[1] / values[0] == pytest.approx(2.0, rel=0.01)

    def test_rejects_unresolved_core(self, grid32):
        spec = {"family": "gaussian_vortex_ring", "radius": 1.0, "core_width": 0.1}
        with pytest.raises(ValueError, match="4 grid spacings"):
            generate_initial_data(spec, grid32)

    def test_rejects_boundary_contact(self, grid32):
        spec = {"family": "gaussian_vortex_ring", "radius": 2.8, "core_width": 0.9}
        with pytest.raises(ValueError, match="decay"):
            generate_initial_data(spec, grid32)


class TestSpecHandling:
    def test_unknown_family(self, grid32):
        with pytest.raises(ValueError, match="unknown data family"):
            generate_initial_data({"family": "wavelet"}, grid32)

    def test_rejects_nonpositive_amplitude(self, grid32):
        with pytest.raises(ValueError, match="amplitude"):
            generate_initial_data({"family": "single_mode", "amplitude": 0.0}, grid32)

    def test_missing_keys(self, grid32):
        with pytest.raises(ValueError, match="omega"):
            generate_initial_data({"j": {"family": "zero"}}, grid32)

    def test_coupled_spec(self, grid32):
        w0, j0 = generate_initial_data(
            {
                "omega": {"family": "single_mode", "wavevector": [1, 0, 0], "component": 3},
                "j": {"family": "random_divfree", "seed": 3, "amplitude": 0.5},
            },
            grid32,
        )
        assert np.abs(w0.values).max() > 0
        assert np.abs(j0.values).max() > 0

    def test_size_report(self, grid32):
        w0, j0 = generate_initial_data(
            {"family": "single_mode", "wavevector": [1, 0, 0], "component": 3, "amplitude": 1e-3},
            grid32,
        )
        report = initial_size_report(w0, j0, p0=1.5, q0=1.0)
        assert report["omega_m11"] > 0
        assert report["j_m11"] == 0.0
        assert report["omega_mp0q0"] > 0


class TestBoxStudy:
    def test_ring_norms_stabilize(self):
        from mhdlab.fields import make_grid
        from mhdlab.initial_data import box_study

        g = make_grid(64, 2 * np.pi)
        spec = {"family": "gaussian_vortex_ring", "radius": 0.6, "core_width": 0.4, "amplitude": 1e-3}
        rows = box_study(spec, g, factors=[2])
        assert rows[0]["factor"] == 1.0 and rows[1]["factor"] == 2.0
        assert rows[1]["n"] == 128
        # same physical object: the localized-mass norm moves little as the box grows
        drift = abs(rows[1]["omega_m11"] - rows[0]["omega_m11"]) / rows[0]["omega_m11"]
        assert drift <= 0.2

    def test_rejects_box_locked_families(self, grid32):
        from mhdlab.initial_data import box_study

        with pytest.raises(ValueError, match="localized"):
            box_study({"family": "single_mode"}, grid32, factors=[2.0])
