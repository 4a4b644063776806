use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;

pub(crate) fn dsbs(p: f64) -> JointPmf<f64> {
    JointPmf::from_xy(vec![vec![(1.0 - p) / 2.0, p / 2.0], vec![p / 2.0, (1.0 - p) / 2.0]]).unwrap()
}

fn erasure(e: f64) -> JointPmf<f64> {
    let (a, b) = ((1.0 - e) / 2.0, e / 2.0);
    JointPmf::from_xy(vec![vec![a, 0.0, b], vec![0.0, a, b]]).unwrap()
}

/// DSBS(p) with Z = Y erased with probability e.
fn dsbs_erased_z(p: f64, e: f64) -> JointPmf<f64> {
    let cube = (0..2)
        .map(|x| {
            (0..2)
                .map(|y| {
                    let pxy = if x == y { (1.0 - p) / 2.0 } else { p / 2.0 };
                    let mut z = vec![0.0; 3];
                    z[y] = pxy * (1.0 - e);
                    z[2] = pxy * e;
                    z
                })
                .collect()
        })
        .collect();
    JointPmf::from_xyz(cube).unwrap()
}

fn with_constant_z(pmf: &JointPmf<f64>) -> JointPmf<f64> {
    JointPmf::from_xyz(pmf.xy_table().into_iter().map(|r| r.into_iter().map(|v| vec![v]).collect()).collect()).unwrap()
}

fn product_xy(px: &[f64], channel: &[Vec<f64>]) -> JointPmf<f64> {
    JointPmf::from_xy(px.iter().zip(channel).map(|(&p, row)| row.iter().map(|&w| p * w).collect()).collect()).unwrap()
}

#[test]
fn audit_reports_normalization_deficit() {
    let err = JointPmf::from_xy(vec![vec![0.5, 0.499]]).unwrap_err();
    assert!(err.to_string().contains("deficit"), "{err}");
    assert!(matches!(JointPmf::from_xy(vec![vec![1.5, -0.5]]), Err(Error::InvalidPmf(_))));
    assert!(matches!(JointPmf::from_xy(vec![vec![1.0 / 7.0; 7]]), Err(Error::AlphabetTooLarge { size: 7, cap: 6 })));
    assert!(matches!(JointPmf::from_xy(vec![vec![0.5], vec![0.25, 0.25]]), Err(Error::InvalidPmf(_))));
}

#[test]
fn independent_source_has_zero_constant() {
    let pmf = product_xy(&[0.3, 0.7], &[vec![0.2, 0.8], vec![0.2, 0.8]]);
    assert!(s_star(&pmf, 60).unwrap().value < 1e-12);
    assert!(maximal_correlation(&pmf).unwrap().abs() < 1e-14);
}

#[test]
fn erasure_constant_is_one_minus_e() {
    for e in [0.25, 0.5] {
        let r = s_star(&erasure(e), 60).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 - e, epsilon = 1e-6);
    }
}

#[test]
fn dsbs_matches_squared_maximal_correlation() {
    for p in [0.05, 0.1, 0.2, 0.3] {
        let pmf = dsbs(p);
        let expect = (1.0 - 2.0 * p) * (1.0 - 2.0 * p);
        assert_abs_diff_eq!(maximal_correlation(&pmf).unwrap(), expect, epsilon = 1e-10);
        let r = s_star(&pmf, 60).unwrap();
        assert_abs_diff_eq!(r.value, expect, epsilon = 1e-3);
        assert_abs_diff_eq!(r.argmax_qx.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn copy_has_unit_maximal_correlation() {
    let pmf = JointPmf::from_xy((0..3).map(|i| (0..3).map(|j| if i == j { 1.0 / 3.0 } else { 0.0 }).collect()).collect()).unwrap();
    assert_abs_diff_eq!(maximal_correlation(&pmf).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn constant_eavesdropper_reduces_to_plain_constant() {
    let pmf = product_xy(&[0.35, 0.65], &[vec![0.8, 0.15, 0.05], vec![0.25, 0.25, 0.5]]);
    let plain = s_star(&pmf, 60).unwrap().value;
    let r = s_star_degraded(&with_constant_z(&pmf), 60).unwrap();
    assert_abs_diff_eq!(r.value, plain, epsilon = 2e-3);
    assert!(!r.degradedness_warning);
}

#[test]
fn identity_main_channel_gives_one() {
    let cube = vec![
        vec![vec![0.3, 0.1], vec![0.0, 0.0]],
        vec![vec![0.0, 0.0], vec![0.2, 0.4]],
    ];
    let r = s_star_degraded(&JointPmf::from_xyz(cube).unwrap(), 60).unwrap();
    assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
}

#[test]
fn independent_with_constant_z_is_zero() {
    let pmf = with_constant_z(&product_xy(&[0.5, 0.5], &[vec![0.3, 0.7], vec![0.3, 0.7]]));
    assert!(s_star_degraded(&pmf, 60).unwrap().value < 1e-12);
}

#[test]
fn dsbs_with_erased_eavesdropper() {
    let pmf = dsbs_erased_z(0.1, 0.5);
    let r = s_star_degraded(&pmf, 60).unwrap();
    // (ρ² − (1−e)ρ²)/(1 − (1−e)ρ²) along the symmetric direction.
    let rho2 = 0.64;
    assert_abs_diff_eq!(r.value, 0.5 * rho2 / (1.0 - 0.5 * rho2), epsilon = 1e-3);
    assert!(!r.degradedness_warning);
    let lb = s_star_lower_bound(&pmf, 2, DEFAULT_RESTARTS, 7).unwrap();
    assert_eq!(lb.method, SdpiMethod::LowerBoundRandomSearch);
    assert!(lb.value <= r.value + 1e-6, "{} > {}", lb.value, r.value);
    assert_abs_diff_eq!(lb.value, r.value, epsilon = 5e-3);
}

#[test]
fn non_degraded_eavesdropper_raises_the_flag() {
    let cube = (0..2)
        .map(|x| {
            (0..2)
                .map(|y| {
                    let py = if x == y { 0.35 } else { 0.15 };
                    (0..2).map(|z| py * if x == z { 0.95 } else { 0.05 }).collect()
                })
                .collect()
        })
        .collect();
    let r = s_star_degraded(&JointPmf::from_xyz(cube).unwrap(), 60);
    match r {
        Ok(r) => assert!(r.degradedness_warning),
        Err(e) => assert_eq!(e, Error::DenominatorVanishes),
    }
}

#[test]
fn lower_bound_with_constant_z_matches_plain_constant() {
    let pmf = product_xy(&[0.4, 0.6], &[vec![0.85, 0.15], vec![0.2, 0.8]]);
    let plain = s_star(&pmf, 60).unwrap().value;
    let lb = s_star_lower_bound(&with_constant_z(&pmf), 2, DEFAULT_RESTARTS, 11).unwrap();
    assert_abs_diff_eq!(lb.value, plain, epsilon = 5e-3);
}

#[test]
fn lower_bound_is_seeded_and_trivial_without_restarts() {
    let pmf = dsbs_erased_z(0.2, 0.3);
    let a = s_star_lower_bound(&pmf, 2, 4, 99).unwrap();
    let b = s_star_lower_bound(&pmf, 2, 4, 99).unwrap();
    assert_eq!(a, b);
    let none = s_star_lower_bound(&pmf, 2, 0, 99).unwrap();
    assert_eq!(none.value, 0.0);
    assert!(matches!(s_star_lower_bound(&pmf, 1, 4, 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn efficiency_from_constant() {
    let mk = |v: f64| SdpiResult { value: v, argmax_qx: vec![], method: SdpiMethod::Grid, evaluations: 0, degradedness_warning: false };
    assert_eq!(initial_efficiency_discrete(&mk(0.0)).unwrap(), 0.0);
    assert_eq!(initial_efficiency_discrete(&mk(0.5)).unwrap(), 1.0);
    assert_eq!(initial_efficiency_discrete(&mk(1.0)), Err(Error::SaturatedConstant));
    let gauss = crate::waterfill::initial_efficiency(&crate::waterfill::BetaProfile::from_values(&[0.64 / 0.36]).unwrap());
    assert_abs_diff_eq!(initial_efficiency_discrete(&mk(0.64)).unwrap(), gauss, epsilon = 1e-12);
}

#[test]
fn tensor_product_factors_and_point_mass_is_neutral() {
    let (a, b) = (dsbs(0.1), dsbs(0.3));
    let ab = tensor_product(&a, &b).unwrap();
    assert_eq!((ab.nx(), ab.ny()), (4, 4));
    let (mx, ma, mb) = (ab.marginal_x(), a.marginal_x(), b.marginal_x());
    for i in 0..2 {
        for j in 0..2 {
            assert_abs_diff_eq!(mx[2 * i + j], ma[i] * mb[j], epsilon = 1e-15);
        }
    }
    let point = JointPmf::from_xy(vec![vec![1.0]]).unwrap();
    let src = product_xy(&[0.3, 0.7], &[vec![0.9, 0.1], vec![0.25, 0.75]]);
    let lifted = tensor_product(&src, &point).unwrap();
    assert_abs_diff_eq!(s_star(&lifted, 60).unwrap().value, s_star(&src, 60).unwrap().value, epsilon = 1e-9);
}

#[test]
fn dsbs_product_tensorizes() {
    let r = s_star(&tensor_product(&dsbs(0.1), &dsbs(0.3)).unwrap(), 12).unwrap();
    assert_abs_diff_eq!(r.value, 0.64, epsilon = 3e-3);
}

#[test]
fn relabeling_leaves_values_unchanged() {
    let pmf = JointPmf::from_xy(vec![
        vec![0.20, 0.05, 0.03],
        vec![0.02, 0.25, 0.05],
        vec![0.10, 0.05, 0.25],
    ])
    .unwrap();
    let base = s_star(&pmf, 24).unwrap().value;
    let moved = pmf.relabeled(&[2, 0, 1], &[1, 2, 0], &[0]).unwrap();
    assert_abs_diff_eq!(s_star(&moved, 24).unwrap().value, base, epsilon = 1e-12);
    assert_abs_diff_eq!(maximal_correlation(&moved).unwrap(), maximal_correlation(&pmf).unwrap(), epsilon = 1e-12);
}

fn stochastic(raw: &[f64], cols: usize) -> Vec<Vec<f64>> {
    raw.chunks(cols).map(|r| {
        let s: f64 = r.iter().sum();
        r.iter().map(|v| v / s).collect()
    }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn constant_lies_in_unit_interval(px in 0.05f64..0.95, raw in prop::collection::vec(0.01f64..1.0, 6)) {
        let pmf = product_xy(&[px, 1.0 - px], &stochastic(&raw, 3));
        let v = s_star(&pmf, 60).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(v + 1e-3 >= maximal_correlation(&pmf).unwrap());
    }

    #[test]
    fn post_processing_never_increases(
        px in 0.05f64..0.95,
        raw in prop::collection::vec(0.01f64..1.0, 6),
        post in prop::collection::vec(0.01f64..1.0, 6),
    ) {
        let pmf = product_xy(&[px, 1.0 - px], &stochastic(&raw, 3));
        let degraded = pmf.post_process_y(&stochastic(&post, 2)).unwrap();
        let before = s_star(&pmf, 60).unwrap().value;
        let after = s_star(&degraded, 60).unwrap().value;
        prop_assert!(after <= before + 3e-3, "{after} > {before}");
    }
}
