import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entrobound import (BoundInput, DiagonalFamily, DomainError, SamplerConfig,
                        bound_theorem, equality_states_theorem, fuzz_slack,
                        maximize_entropy_at_constraints, sharpness_report)
from entrobound.sharpness import SlackRecord, bin_min_slack, constraint_residuals


class TestFuzz:
    def test_empty(self):
        out = fuzz_slack(SamplerConfig(3, 0), 0)
        assert out.records == [] and out.violations == 0 and math.isnan(out.min_slack)

    def test_identical_pairs_have_zero_slack(self):
        rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
        out = fuzz_slack(SamplerConfig(3, 0), 0, extra_pairs=[(rho, rho)] * 3)
        assert [r.slack for r in out.records] == pytest.approx([0.0] * 3, abs=1e-15)

    def test_equality_states_hit_zero_slack(self):
        rho, sigma = equality_states_theorem(BoundInput(0.2, 0.1, 0.1), 3)
        out = fuzz_slack(SamplerConfig(3, 1), 200, extra_pairs=[(rho.entries, sigma.entries)])
        assert out.min_slack <= 1e-10
        assert out.violations == 0

    @pytest.mark.parametrize("which", ["prop", "theorem", "cor1", "cor2", "cor2-simple"])
    def test_no_violations(self, which):
        for d in (2, 3, 4):
            out = fuzz_slack(SamplerConfig(d, 11), 300, which)
            assert out.violations == 0 and out.min_slack >= -1e-9
            assert len(out.records) + out.skipped == 300

    def test_sorted_and_deterministic(self):
        a = fuzz_slack(SamplerConfig(3, 7), 100)
        b = fuzz_slack(SamplerConfig(3, 7), 100)
        assert a.records == b.records
        slacks = [r.slack for r in a.records]
        assert slacks == sorted(slacks)

    def test_bad_selector(self):
        with pytest.raises(ValueError):
            fuzz_slack(SamplerConfig(3, 0), 1, "lemma")

    def test_binning(self):
        recs = [SlackRecord(0.01, 0, 0.01, 0, 0, 0.5), SlackRecord(0.02, 0, 0.02, 0, 0, 0.1),
                SlackRecord(0.99, 0, 1.0, 0, 0, 0.3)]
        assert bin_min_slack(recs) == {(0, 0): 0.1, (19, 19): 0.3}


class TestDiagonalFamily:
    def test_properties(self):
        fam = DiagonalFamily(3, [0.3, 0.1, 0.6], [0.1, 0.3, 0.6])
        assert (fam.T, fam.alpha, fam.beta) == pytest.approx((0.2, 0.1, 0.1))
        assert fam.relative_entropy() == pytest.approx(0.2 * math.log(3))
        assert constraint_residuals(fam, BoundInput(0.2, 0.1, 0.1)) == pytest.approx((0, 0, 0))

    @pytest.mark.parametrize("r", [[0.5, 0.5], [0.6, 0.6, -0.2], [0.5, 0.4, 0.2]])
    def test_rejects_non_probability(self, r):
        with pytest.raises(DomainError):
            DiagonalFamily(3, r, [1 / 3] * 3)


class TestSearch:
    def test_reaches_known_optimum(self):
        fam, s = maximize_entropy_at_constraints(BoundInput(0.2, 0.1, 0.1), 3, restarts=10)
        assert abs(s - 0.2 * math.log(3)) <= 1e-6
        assert max(map(abs, constraint_residuals(fam, BoundInput(0.2, 0.1, 0.1)))) <= 1e-12

    def test_zero_distance(self):
        _, s = maximize_entropy_at_constraints(BoundInput(0.0, 0.2, 0.2), 3, restarts=2)
        assert s == pytest.approx(0.0, abs=1e-12)

    def test_feasibility_edge_stays_below_bound(self):
        target = BoundInput(0.1, 0.05, 0.15)
        fam, s = maximize_entropy_at_constraints(target, 4, restarts=4)
        assert s <= bound_theorem(target) + 1e-12
        assert max(map(abs, constraint_residuals(fam, target))) <= 1e-12

    @settings(max_examples=8)
    @given(st.floats(0.02, 0.2), st.floats(0.02, 0.2), st.floats(0.05, 0.4))
    def test_never_exceeds_bound(self, alpha, beta, T):
        target = BoundInput(max(T, abs(alpha - beta)), alpha, beta)
        _, s = maximize_entropy_at_constraints(target, 3, restarts=2)
        assert s <= bound_theorem(target) + 1e-9

    @pytest.mark.parametrize("d", [2, 17])
    def test_dimension_limits(self, d):
        with pytest.raises(DomainError):
            maximize_entropy_at_constraints(BoundInput(0.1, 0.0, 0.05), d)


class TestReport:
    def test_constructor_points(self):
        grid = [BoundInput(T, a, b) for T, a, b in
                [(0.05, 0.02, 0.02), (0.2, 0.1, 0.1), (0.3, 0.1, 0.2), (0.4, 0.2, 0.2)]]
        rows = sharpness_report(grid, 3)
        assert all(r.source == "constructor" and r.relative_gap <= 1e-6 for r in rows)

    def test_zero_point(self):
        (row,) = sharpness_report([BoundInput(0.0, 0.1, 0.1)], 3)
        assert row.relative_gap == 0.0 and row.attained

    def test_padding_lost_in_higher_dimension(self):
        # padding (1 - alpha - beta - T) / (d - 2) drops below beta at d = 4
        point = BoundInput(0.4, 0.1, 0.2)
        (row3,) = sharpness_report([point], 3)
        assert row3.attained and row3.relative_gap <= 1e-10
        (row4,) = sharpness_report([point], 4, restarts=4)
        assert row4.source == "search" and not row4.attained
        assert 0 < row4.relative_gap < 1

    def test_search_always(self):
        (row,) = sharpness_report([BoundInput(0.2, 0.1, 0.1)], 3, restarts=3, search="always")
        assert row.relative_gap <= 1e-6
