import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import hellinger_gamma_quad
from priorscan import (
    AlignmentError,
    DensityGrid,
    DomainError,
    Family,
    IngestionError,
    ParamPoint,
    PriorSpec,
    Scale,
    bhattacharyya_grid,
    common_support,
    hellinger_grid,
    hellinger_normal,
    normalize_grid,
    read_density_csv,
    tabulate_prior,
    trapezoid_mass,
    write_density_csv,
)


def normal_grid(mu, lam, lo=-10.0, hi=10.0, n=4001):
    xs = np.linspace(lo, hi, n)
    vs = np.sqrt(lam / (2 * np.pi)) * np.exp(-0.5 * lam * (xs - mu) ** 2)
    return normalize_grid(DensityGrid(xs, vs))


class TestDensityGrid:
    def test_basic_construction(self):
        g = DensityGrid(np.linspace(0, 1, 10), np.ones(10))
        assert len(g) == 10
        assert g.scale is Scale.NATURAL

    def test_arrays_are_frozen(self):
        g = DensityGrid(np.linspace(0, 1, 10), np.ones(10))
        with pytest.raises(ValueError):
            g.values[0] = 2.0

    def test_input_arrays_are_copied(self):
        xs = np.linspace(0, 1, 10)
        vs = np.ones(10)
        g = DensityGrid(xs, vs)
        vs[0] = 50.0
        assert g.values[0] == 1.0

    @pytest.mark.parametrize(
        "support,values",
        [
            (np.linspace(0, 1, 7), np.ones(7)),          # too short
            (np.linspace(0, 1, 10), np.ones(9)),         # length mismatch
            (np.zeros(10), np.ones(10)),                 # not increasing
            (np.linspace(0, 1, 10), -np.ones(10)),       # negative density
            (np.linspace(0, 1, 10), np.zeros(10)),       # identically zero
            (np.linspace(0, 1, 10), np.r_[np.nan, np.ones(9)]),
        ],
    )
    def test_rejects_malformed(self, support, values):
        with pytest.raises(DomainError):
            DensityGrid(support, values)

    def test_normalize(self):
        g = DensityGrid(np.linspace(0, 2, 101), np.full(101, 3.7))
        n = normalize_grid(g)
        assert abs(trapezoid_mass(n) - 1.0) <= 1e-10


class TestCommonSupport:
    def test_identical_supports_unchanged(self):
        g = normal_grid(0.0, 1.0)
        a0, a1 = common_support(g, g)
        assert a0 is g and a1 is g

    def test_interval_intersection(self):
        g0 = DensityGrid(np.linspace(0, 10, 101), np.ones(101))
        g1 = DensityGrid(np.linspace(5, 15, 101), np.ones(101))
        a0, a1 = common_support(g0, g1)
        assert a0.support[0] == 5.0 and a0.support[-1] == 10.0
        assert np.array_equal(a0.support, a1.support)

    def test_shifted_normal_tabulations(self):
        # grids tabulated on shifted windows still give the analytic BC
        g0 = normal_grid(0.0, 1.0, -10.0, 10.0)
        g1 = normal_grid(0.3, 1.0, -9.4, 10.6)
        a0, a1 = common_support(g0, g1)
        bc = bhattacharyya_grid(a0, a1)
        h_true = hellinger_normal(ParamPoint(0.0, 1.0), ParamPoint(0.3, 1.0))
        assert abs(math.sqrt(1.0 - bc) - h_true) <= 1e-6

    def test_scale_mismatch(self):
        g0 = DensityGrid(np.linspace(0, 1, 10), np.ones(10), Scale.NATURAL)
        g1 = DensityGrid(np.linspace(0, 1, 10), np.ones(10), Scale.LOG_PARAMETER)
        with pytest.raises(AlignmentError):
            common_support(g0, g1)

    def test_empty_intersection(self):
        g0 = DensityGrid(np.linspace(0, 1, 10), np.ones(10))
        g1 = DensityGrid(np.linspace(2, 3, 10), np.ones(10))
        with pytest.raises(AlignmentError):
            common_support(g0, g1)

    def test_no_mass_in_overlap(self):
        xs = np.linspace(0, 1, 50)
        left = np.where(xs < 0.4, 1.0, 0.0)
        g0 = DensityGrid(xs, left)
        g1 = DensityGrid(np.linspace(0.6, 1.6, 50), np.ones(50))
        with pytest.raises(AlignmentError):
            common_support(g0, g1)


class TestBhattacharyya:
    def test_self_affinity_is_one(self):
        g = normal_grid(0.0, 1.0)
        assert abs(bhattacharyya_grid(g, g) - 1.0) <= 1e-10

    def test_benchmark_shift(self):
        # N(0,1) against N(0.01,1) on [-10, 10] with 4001 points
        g0 = normal_grid(0.0, 1.0)
        g1 = normal_grid(0.01, 1.0)
        bc = bhattacharyya_grid(g0, g1)
        assert abs(math.sqrt(1.0 - bc) - 0.0035355) <= 1e-6

    def test_disjoint_mass_gives_zero(self):
        xs = np.linspace(0, 1, 100)
        f0 = np.where(xs < 0.5, 2.0, 0.0)
        f1 = np.where(xs >= 0.5, 2.0, 0.0)
        g0 = normalize_grid(DensityGrid(xs, f0))
        g1 = normalize_grid(DensityGrid(xs, f1))
        assert bhattacharyya_grid(g0, g1) == 0.0

    def test_requires_identical_support(self):
        g0 = DensityGrid(np.linspace(0, 1, 10), np.ones(10))
        g1 = DensityGrid(np.linspace(0, 1, 11), np.ones(11))
        with pytest.raises(AlignmentError):
            bhattacharyya_grid(g0, g1)


class TestHellingerGrid:
    def test_self_distance_zero(self):
        g = normal_grid(1.0, 2.0)
        assert hellinger_grid(g, g) == 0.0

    def test_gamma_pair_vs_closed_form(self):
        g0 = tabulate_prior(PriorSpec(Family.GAMMA, ParamPoint(1.0, 0.34)), Scale.LOG_PARAMETER)
        g1 = tabulate_prior(PriorSpec(Family.GAMMA, ParamPoint(1.0, 0.68)), Scale.LOG_PARAMETER)
        assert abs(hellinger_grid(g0, g1) - 0.239146311738100) <= 1e-5

    def test_normal_pair_vs_closed_form(self):
        g0 = normal_grid(0.0, 1.0, -10.0, 12.0)
        g1 = normal_grid(2.0, 1.0, -10.0, 12.0)
        h = hellinger_grid(g0, g1)
        assert abs(h - math.sqrt(1.0 - math.exp(-0.5))) <= 1e-6

    def test_grid_symmetry(self):
        g0 = normal_grid(0.0, 1.0, -10.0, 11.0)
        g1 = normal_grid(0.7, 2.0, -9.0, 10.0)
        assert abs(hellinger_grid(g0, g1) - hellinger_grid(g1, g0)) <= 1e-12

    @given(
        a0=st.floats(0.5, 20.0),
        b0=st.floats(0.1, 10.0),
        a1=st.floats(0.5, 20.0),
        b1=st.floats(0.1, 10.0),
    )
    def test_range_property(self, a0, b0, a1, b1):
        g0 = tabulate_prior(PriorSpec(Family.GAMMA, ParamPoint(a0, b0)), Scale.LOG_PARAMETER, 801)
        g1 = tabulate_prior(PriorSpec(Family.GAMMA, ParamPoint(a1, b1)), Scale.LOG_PARAMETER, 801)
        try:
            h = hellinger_grid(g0, g1)
        except AlignmentError:
            # tabulation windows of extreme pairs need not overlap at all;
            # the distance is saturated rather than computable on a grid
            return
        assert 0.0 <= h <= 1.0

    @pytest.mark.parametrize(
        "p0,p1",
        [
            (ParamPoint(1.0, 0.34), ParamPoint(1.0, 0.68)),
            (ParamPoint(2.0, 1.0), ParamPoint(4.0, 2.0)),
            (ParamPoint(3.0, 0.5), ParamPoint(2.2, 0.9)),
        ],
    )
    def test_scale_invariance(self, p0, p1):
        # the distance does not depend on which scale the grids tabulate
        nat0 = tabulate_prior(PriorSpec(Family.GAMMA, p0), Scale.NATURAL)
        nat1 = tabulate_prior(PriorSpec(Family.GAMMA, p1), Scale.NATURAL)
        log0 = tabulate_prior(PriorSpec(Family.GAMMA, p0), Scale.LOG_PARAMETER)
        log1 = tabulate_prior(PriorSpec(Family.GAMMA, p1), Scale.LOG_PARAMETER)
        assert abs(hellinger_grid(nat0, nat1) - hellinger_grid(log0, log1)) <= 2e-4

    def test_log_scale_matches_quadrature(self):
        p0, p1 = ParamPoint(2.0, 1.0), ParamPoint(4.0, 2.0)
        g0 = tabulate_prior(PriorSpec(Family.GAMMA, p0), Scale.LOG_PARAMETER)
        g1 = tabulate_prior(PriorSpec(Family.GAMMA, p1), Scale.LOG_PARAMETER)
        h_ref = hellinger_gamma_quad(p0.as_tuple(), p1.as_tuple())
        assert abs(hellinger_grid(g0, g1) - h_ref) <= 1e-5


class TestDensityCsv:
    def test_round_trip(self, tmp_path):
        g = normal_grid(0.3, 2.0, -6.0, 6.0, 501)
        path = tmp_path / "density.csv"
        write_density_csv(path, g)
        back = read_density_csv(path)
        assert np.array_equal(back.support, g.support)
        assert np.array_equal(back.values, g.values)

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,0.5\n1.0,0.5\n2.0,0.4\n")
        with pytest.raises(IngestionError):
            read_density_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError):
            read_density_csv(tmp_path / "nope.csv")

    def test_non_numeric_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,density\n0.0,0.5\noops,0.5\n")
        with pytest.raises(IngestionError):
            read_density_csv(path)

    def test_single_column_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x\n0.0\n1.0\n")
        with pytest.raises(IngestionError):
            read_density_csv(path)

    def test_scale_flag_carried(self, tmp_path):
        g = DensityGrid(np.linspace(-2, 2, 20), np.ones(20), Scale.LOG_PARAMETER)
        path = tmp_path / "log.csv"
        write_density_csv(path, g)
        assert read_density_csv(path, Scale.LOG_PARAMETER).scale is Scale.LOG_PARAMETER
