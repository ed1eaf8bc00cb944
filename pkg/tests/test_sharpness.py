import numpy as np
import pytest

from selbounds import (
    EstimandKind,
    ObservedSub,
    ParameterDomainError,
    UnsupportedEstimandError,
    Verdict,
    af_bound,
    bias_from_joint_sub,
    bounding_factor,
    construct_sharp,
    evaluate_tables,
    observed_summary,
    reverse_treatment,
    sharpness_grid,
    sv_bound_sharp,
    zika_spec,
)


class TestSvBoundSharp:
    def test_zika_verdict_is_sharp(self):
        verdict = sv_bound_sharp(1.56, 0.27, sv_bound=1.56, af_bound=3.5)
        assert verdict.verdict is Verdict.SHARP
        assert verdict.verdict.message == "SV bound is sharp."

    def test_unit_factor_always_sharp(self):
        for p in (0.01, 0.27, 0.5, 1.0):
            assert sv_bound_sharp(1.0, p).verdict is Verdict.SHARP

    def test_above_both_thresholds_not_sharp(self):
        verdict = sv_bound_sharp(5.0, 0.5, sv_bound=5.0, af_bound=3.0)
        assert verdict.verdict is Verdict.NOT_SHARP

    def test_between_thresholds_inconclusive(self):
        verdict = sv_bound_sharp(2.5, 0.5, sv_bound=2.5, af_bound=3.0)
        assert verdict.verdict is Verdict.INCONCLUSIVE

    def test_missing_optional_values_never_not_sharp(self):
        assert sv_bound_sharp(50.0, 0.5).verdict is Verdict.INCONCLUSIVE
        assert sv_bound_sharp(50.0, 0.5, sv_bound=50.0).verdict is Verdict.INCONCLUSIVE
        assert sv_bound_sharp(50.0, 0.5, af_bound=3.0).verdict is Verdict.INCONCLUSIVE

    def test_boundaries(self):
        # at the sharp limit: sharp; at the AF bound: still inconclusive
        assert sv_bound_sharp(2.0, 0.5).verdict is Verdict.SHARP
        assert sv_bound_sharp(3.0, 0.5, sv_bound=3.0, af_bound=3.0).verdict is Verdict.INCONCLUSIVE

    def test_domain_errors(self):
        with pytest.raises(ParameterDomainError):
            sv_bound_sharp(0.9, 0.5)
        with pytest.raises(ParameterDomainError):
            sv_bound_sharp(1.5, 0.0)
        with pytest.raises(ParameterDomainError):
            sv_bound_sharp(1.5, 1.2)

    def test_total_population_request_is_typed_error(self):
        with pytest.raises(UnsupportedEstimandError):
            sv_bound_sharp(1.5, 0.5, estimand=EstimandKind.RR_TOT)
        with pytest.raises(UnsupportedEstimandError):
            sv_bound_sharp(1.5, 0.5, estimand=EstimandKind.RD_TOT)

    def test_monotone_along_bounding_factor(self):
        # once not sharp as BF_U grows (fixed AF), never sharp again; the
        # sharp region is exactly {BF_U <= 1/p}
        p0, af = 0.4, 2.6
        verdicts = [
            sv_bound_sharp(bf, p0, sv_bound=bf, af_bound=af).verdict
            for bf in np.linspace(1.0, 6.0, 400)
        ]
        ranks = {Verdict.SHARP: 0, Verdict.INCONCLUSIVE: 1, Verdict.NOT_SHARP: 2}
        seq = [ranks[v] for v in verdicts]
        assert seq == sorted(seq)
        for bf in np.linspace(1.0, 6.0, 400):
            expected_sharp = bf <= 1.0 / p0
            got = sv_bound_sharp(bf, p0, sv_bound=bf, af_bound=af).verdict
            assert (got is Verdict.SHARP) == expected_sharp

    def test_every_sharp_verdict_is_attained(self):
        # the attainment construction achieves bias equal to the bound for
        # every point classified sharp
        rng = np.random.default_rng(41)
        checked = 0
        while checked < 100:
            uy = float(np.exp(rng.uniform(np.log(1.01), np.log(8.0))))
            tu = float(np.exp(rng.uniform(np.log(1.01), np.log(8.0))))
            p0 = float(rng.uniform(0.05, 0.95))
            p1 = float(rng.uniform(0.05, 0.95))
            pt1 = float(rng.uniform(0.05, 0.95))
            bf = bounding_factor(uy, tu)
            if sv_bound_sharp(bf, p0).verdict is not Verdict.SHARP:
                continue
            joint, achieved_rr, _ = construct_sharp(
                tu, uy, ObservedSub(p_t1_s1=pt1, p_y1_t1_s1=p1, p_y1_t0_s1=p0)
            )
            assert achieved_rr == pytest.approx(bf, abs=1e-9)
            assert bias_from_joint_sub(joint)[0] == pytest.approx(bf, abs=1e-9)
            checked += 1


class TestSharpnessGrid:
    def test_all_unit_axes(self):
        grid = sharpness_grid([1.0], [1.0], 0.3)
        assert grid.bounds == ((1.0,),)
        assert grid.verdicts == ((Verdict.SHARP,),)

    def test_grid_equals_pointwise_calls(self):
        uy = [1.0, 2.0, 4.0]
        tu = [1.5, 3.0, 6.0]
        grid = sharpness_grid(uy, tu, 0.5, af_bound=1.8)
        for i, a in enumerate(uy):
            for j, b in enumerate(tu):
                bf = bounding_factor(a, b)
                cell = sv_bound_sharp(bf, 0.5, sv_bound=bf, af_bound=1.8)
                assert grid.bounds[i][j] == bf
                assert grid.verdicts[i][j] is cell.verdict

    def test_zika_single_selection_frontiers(self):
        # population thresholds: sharp limit 1/p0 and the AF bound straddle
        # a narrow band, matching the published sample-based pair
        tables = reverse_treatment(evaluate_tables(zika_spec(selections=1)))
        obs = observed_summary(tables)
        af = af_bound(EstimandKind.RR_SUB, obs).value
        limit = 1.0 / obs.pY1_T0_S1
        assert af >= limit
        assert af - limit == pytest.approx(0.002, abs=0.01)
        assert obs.pY1_T0_S1 == pytest.approx(1.0 / 3.667, abs=0.01)

        axis = list(np.linspace(1.0, 12.0, 40))
        grid = sharpness_grid(axis, axis, obs.pY1_T0_S1, af_bound=af)
        for i in range(len(axis)):
            for j in range(len(axis)):
                bf = grid.bounds[i][j]
                verdict = grid.verdicts[i][j]
                if bf <= limit:
                    assert verdict is Verdict.SHARP
                elif bf > af:
                    assert verdict is Verdict.NOT_SHARP
                else:
                    assert verdict is Verdict.INCONCLUSIVE

    def test_axis_validation(self):
        with pytest.raises(ParameterDomainError):
            sharpness_grid([0.5, 2.0], [1.0, 2.0], 0.5)
        with pytest.raises(ParameterDomainError):
            sharpness_grid([2.0, 1.5], [1.0, 2.0], 0.5)
        with pytest.raises(ParameterDomainError):
            sharpness_grid([], [1.0], 0.5)

    def test_serialization_shape(self):
        grid = sharpness_grid([1.0, 2.0], [1.0, 3.0], 0.4, af_bound=2.0)
        payload = grid.to_dict()
        assert payload["uy_axis"] == [1.0, 2.0]
        assert payload["tu_axis"] == [1.0, 3.0]
        assert len(payload["bounds"]) == 2 and len(payload["bounds"][0]) == 2
        assert payload["verdicts"][0][0] == "sharp"
        assert payload["sharp_limit"] == 2.5
