use morse_gpe::model::{energy_on_constraint, AnsatzParams, DimensionlessSystem};
use morse_gpe::solver::*;
use morse_gpe::Error;
use proptest::prelude::*;

fn sys(k: f64, g: f64) -> DimensionlessSystem {
    DimensionlessSystem::new(k, g).unwrap()
}

// high-precision references: Paper-mode roots at k=3, g'=0.1 and the
// tangency (maximum of f1/f2) for each k
const ROOTS_K3_G01: [f64; 2] = [1.212_815_179_341_14, 6.237_344_597_515_13];
const TANGENCY: [(f64, f64, f64, f64); 6] = [
    (2.0, 0.444_983_510_189_749, 0.940_702_601_204_228, -0.068_590_203_957_931_4),
    (3.0, 0.168_751_047_578_34, 2.000_266_163_950_85, -0.257_626_984_497_493),
    (4.0, 0.094_020_775_514_039_8, 3.012_497_275_202_6, -0.390_908_563_653_088),
    (5.0, 0.061_272_387_673_777_2, 4.016_971_128_846_91, -0.482_678_638_228_005),
    (10.0, 0.017_458_030_696_149, 9.037_447_700_976_92, -0.693_310_406_661_63),
    (30.0, 0.002_661_359_946_078_01, 29.302_310_912_326_4, -0.857_276_986_106_822),
];

#[test]
fn paper_roots_at_k3() {
    let r = find_roots(sys(3.0, 0.1), SolveMode::Paper, (0.02, 40.0), 2000).unwrap();
    assert_eq!(r.len(), 2);
    for (got, want) in r.iter().zip(ROOTS_K3_G01) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    assert!((r[0] - 1.2).abs() <= 0.15 && (r[1] - 6.2).abs() <= 0.15);
    assert!(find_roots(sys(3.0, 1.0), SolveMode::Paper, (0.02, 40.0), 2000)
        .unwrap()
        .is_empty());
}

#[test]
fn weak_coupling_lower_root_approaches_free_exponent() {
    for g in [1e-4, 1e-6, 1e-10] {
        let r = find_roots(sys(3.0, g), SolveMode::Paper, (0.02, 40.0), 2000).unwrap();
        assert!((r[0] - 1.0).abs() < 10.0 * g + 1e-9, "g={g}: {}", r[0]);
    }
}

#[test]
fn invalid_search_windows() {
    let s = sys(3.0, 0.1);
    for (range, n) in [((0.0, 40.0), 2000), ((-1.0, 4.0), 2000), ((5.0, 5.0), 2000), ((0.02, 40.0), 50)] {
        assert!(matches!(find_roots(s, SolveMode::Paper, range, n), Err(Error::Argument(_))));
    }
}

#[test]
fn free_case_single_point_in_both_modes() {
    for mode in [SolveMode::Paper, SolveMode::Consistent] {
        let pts = stationary_points(sys(3.0, 0.0), mode).unwrap();
        assert_eq!(pts.len(), 1);
        let p = pts[0];
        assert!((p.alpha - 1.0).abs() < 1e-9 && (p.beta - 0.5).abs() < 1e-9);
        assert!((p.energy.total + 4.0 / 9.0).abs() < 1e-12);
        assert_eq!(p.classification, Classification::LocalMin);
    }
}

#[test]
fn paper_points_at_k3_g01() {
    let pts = stationary_points(sys(3.0, 0.1), SolveMode::Paper).unwrap();
    assert_eq!(pts.len(), 2);
    let (lo, hi) = (pts[0], pts[1]);
    assert_eq!(lo.classification, Classification::LocalMin);
    assert!(lo.hessian.eigenvalues().0 > 0.0);
    assert!(lo.energy.total < hi.energy.total);
    // printed stationarity is not stationarity of the energy
    assert!(lo.grad_norm > 0.05 && lo.grad_norm < 0.1, "{}", lo.grad_norm);
    assert!((lo.energy.total - -0.394_293_863_102_182).abs() < 1e-9);
    assert!((hi.energy.total - 0.564_914_823_473_728).abs() < 1e-9);
    // the stationarity-condition functional has the saddle at the upper root
    assert_eq!(lo.condition_classification, Classification::LocalMin);
    assert_eq!(hi.condition_classification, Classification::Saddle);
    assert!(hi.condition_hessian.determinant() < 0.0);
}

#[test]
fn hessian_at_published_points() {
    let s = sys(3.0, 0.1);
    let lower = hessian_fd(AnsatzParams::new(1.2, 0.56).unwrap(), s, 1e-4).unwrap();
    assert!(lower.eigenvalues().0 > 0.0);
    let upper = hessian_fd(AnsatzParams::new(6.2, 2.23).unwrap(), s, 1e-4).unwrap();
    // the full energy is convex here as well: det ~ +1e-3
    assert!(upper.determinant() > 0.0 && upper.determinant() < 2e-3);

    let bracket = bracket_hessian_fd(AnsatzParams::new(1.2, 0.56).unwrap(), 3.0, 1e-4).unwrap();
    // 3.06/beta^4 - 3.6/beta^3 at beta = 0.56
    let exact = 3.06 / 0.56f64.powi(4) - 3.6 / 0.56f64.powi(3);
    assert!((bracket.d2_beta - exact).abs() < 1e-6);
    assert!((bracket.d2_beta - 10.6).abs() < 0.2);
}

#[test]
fn hessian_matches_closed_form_oscillator_part() {
    // without coupling the energy is (4/k^2)(a/2 + (2a^2 + a)/(8b^2) - a k/(2b))
    let (a, b, k) = (1.7, 0.8, 4.0);
    let h = hessian_fd(AnsatzParams::new(a, b).unwrap(), sys(k, 0.0), 1e-4).unwrap();
    let pre = 4.0 / (k * k);
    let aa = pre * 4.0 / (8.0 * b * b);
    let ab = pre * (-(4.0 * a + 1.0) / (4.0 * b.powi(3)) + k / (2.0 * b * b));
    let bb = pre * (3.0 * (2.0 * a * a + a) / (4.0 * b.powi(4)) - a * k / b.powi(3));
    assert!((h.d2_alpha - aa).abs() < 1e-6);
    assert!((h.d2_alpha_beta - ab).abs() < 1e-6);
    assert!((h.d2_beta - bb).abs() < 1e-6);
}

#[test]
fn hessian_step_bounds() {
    let p = AnsatzParams::new(1.0, 0.5).unwrap();
    let s = sys(3.0, 0.1);
    assert!(hessian_fd(p, s, 1e-7).is_err());
    assert!(hessian_fd(p, s, 0.1).is_err());
    assert!(hessian_fd(p, s, 1e-6).is_ok());
    assert!(hessian_fd(p, s, 1e-2).is_ok());
}

#[test]
fn classification_rules() {
    let h = |a, b, c| Hessian2 { d2_alpha: a, d2_alpha_beta: b, d2_beta: c };
    assert_eq!(h(1.0, 0.0, 2.0).classify(), Classification::LocalMin);
    assert_eq!(h(-1.0, 0.0, -2.0).classify(), Classification::LocalMax);
    assert_eq!(h(1.0, 0.0, -2.0).classify(), Classification::Saddle);
    assert_eq!(h(1.0, 1.0, 1.0).classify(), Classification::Degenerate);
    assert_eq!(h(1.0, 0.0, 1e-7).classify(), Classification::Degenerate);
}

#[test]
fn consistent_minimum_at_k3_g01() {
    let pts = stationary_points(sys(3.0, 0.1), SolveMode::Consistent).unwrap();
    assert_eq!(pts.len(), 1);
    let p = pts[0];
    assert!((p.alpha - 0.927_235_100_468_263).abs() < 1e-9);
    assert!((p.energy.total - -0.405_501_484_349_742).abs() < 1e-12);
    assert!(p.grad_norm <= CONSISTENT_GRADIENT_LIMIT);
    assert_eq!(p.classification, Classification::LocalMin);
}

#[test]
fn paper_critical_couplings() {
    for (k, gc, alpha, e) in TANGENCY {
        let c = critical_coupling(k, SolveMode::Paper).unwrap();
        assert!((c.gprime_c - gc).abs() < 1e-5, "k={k}: {}", c.gprime_c);
        assert!((c.alpha_star - alpha).abs() < 1e-3, "k={k}: {}", c.alpha_star);
        assert!((c.energy_at_critical - e).abs() < 1e-5, "k={k}");
        // the two routes agree
        assert!((c.tangency_gprime.unwrap() - c.gprime_c).abs() < 1e-4);
        assert!((c.tangency_alpha.unwrap() - alpha).abs() < 1e-5 * alpha);
        assert_eq!(c.termination, Termination::SaddleNode);
        assert!((c.beta_star - (c.alpha_star + 0.5) / k).abs() < 1e-12);
    }
}

#[test]
fn root_count_changes_across_critical_coupling() {
    for k in [2.0, 3.0, 4.0, 5.0] {
        let c = critical_coupling(k, SolveMode::Paper).unwrap();
        let search = RootSearch::fine_for(k);
        let count = |g: f64| find_roots_in(sys(k, g), SolveMode::Paper, &search).unwrap().len();
        assert_eq!(count(c.gprime_c - 1e-5), 2, "k={k}");
        assert_eq!(count(c.gprime_c + 1e-5), 0, "k={k}");
        for frac in [0.3, 0.6, 0.9] {
            assert_eq!(count(frac * c.gprime_c), 2, "k={k} frac={frac}");
        }
        for mult in [1.1, 2.0] {
            assert_eq!(count(mult * c.gprime_c), 0, "k={k} mult={mult}");
        }
    }
}

#[test]
fn strong_coupling_small_alpha_branch() {
    // below (k-1)/2 both sides of the condition are negative, so a second
    // branch enters the window once the coupling is large enough
    let k = 2.0;
    let c = critical_coupling(k, SolveMode::Paper).unwrap();
    let r = find_roots_in(sys(k, 10.0 * c.gprime_c), SolveMode::Paper, &RootSearch::fine_for(k)).unwrap();
    assert_eq!(r.len(), 1);
    assert!(r[0] < (k - 1.0) / 2.0);
}

#[test]
fn tangency_is_a_double_root() {
    for k in [2.0, 3.0, 4.0, 5.0] {
        let c = critical_coupling(k, SolveMode::Paper).unwrap();
        let s = sys(k, c.gprime_c);
        assert!(stationarity_residual(c.alpha_star, s, SolveMode::Paper).abs() < 1e-6);
        assert!(residual_slope(c.alpha_star, s, SolveMode::Paper).abs() < 1e-3, "k={k}");
        // the constrained energy is not flat there (printed condition != dE = 0)
        assert!(constrained_curvature(c.alpha_star, s).abs() > 1e-3);
    }
}

#[test]
fn consistent_termination_at_k3() {
    let c = critical_coupling(3.0, SolveMode::Consistent).unwrap();
    // zero-energy minimum and saddle-node from an independent 30-digit solve
    assert!((c.gprime_c - 1.708_230_435_595_904).abs() < 1e-6, "{}", c.gprime_c);
    assert!((c.alpha_star - 0.083_970_231_471_876_5).abs() < 1e-4);
    assert!(c.energy_at_critical <= 0.0 && c.energy_at_critical > -1e-6);
    match c.termination {
        Termination::EnergyCrossesZero { minimum_vanishes_at } => {
            assert!((minimum_vanishes_at - 1.719_485_267_883_663).abs() < 1e-4);
        }
        other => panic!("unexpected termination {other:?}"),
    }
    // far beyond the Paper-mode value
    assert!(c.gprime_c > 10.0 * critical_coupling(3.0, SolveMode::Paper).unwrap().gprime_c);
}

#[test]
fn critical_rejects_small_k() {
    for mode in [SolveMode::Paper, SolveMode::Consistent] {
        assert!(matches!(critical_coupling(1.5, mode), Err(Error::Validity(_))));
    }
}

#[test]
fn sweep_g_table_shape() {
    let gs = [0.10, 0.12, 0.14, 0.155, 1.0];
    let rows = sweep_g(3.0, &gs, SolveMode::Paper).unwrap();
    assert_eq!(rows.iter().map(|r| r.gprime).collect::<Vec<_>>(), gs);
    assert!(rows[0].e2.unwrap() > 0.0);
    for r in &rows[..4] {
        assert!(r.e1.unwrap() < r.e2.unwrap());
        assert!((r.beta1.unwrap() - (r.alpha1.unwrap() + 0.5) / 3.0).abs() < 1e-12);
    }
    assert!(rows[4].alpha1.is_none() && rows[4].e2.is_none());

    let c = critical_coupling(3.0, SolveMode::Paper).unwrap();
    let at = sweep_g(3.0, &[c.gprime_c], SolveMode::Paper).unwrap()[0];
    assert!((at.e1.unwrap() - at.e2.unwrap()).abs() < 1e-3);
    assert!((at.alpha2.unwrap() - at.alpha1.unwrap()).abs() < 5e-3);

    assert!(sweep_g(3.0, &[], SolveMode::Paper).is_err());
    assert!(sweep_g(1.0, &[0.1], SolveMode::Paper).is_err());
}

#[test]
fn sweep_k_monotone() {
    let ks: Vec<f64> = (2..=10).map(f64::from).collect();
    let s = sweep_k(&ks, SolveMode::Paper).unwrap();
    assert!(s.gprime_c_decreasing);
    assert_eq!(s.rows.iter().map(|r| r.k).collect::<Vec<_>>(), ks);
    let rev: Vec<f64> = ks.iter().rev().copied().collect();
    assert!(!sweep_k(&rev, SolveMode::Paper).unwrap().gprime_c_decreasing);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lower_root_is_the_bound_minimum(k in 2.0f64..6.0, frac in 0.05f64..0.97) {
        let gc = critical_coupling(k, SolveMode::Paper).unwrap().gprime_c;
        let s = sys(k, frac * gc);
        let pts = stationary_points(s, SolveMode::Paper).unwrap();
        // the upper root can leave the search window at weak coupling
        prop_assert!(!pts.is_empty() && pts.len() <= 2);
        if frac > 0.4 {
            prop_assert_eq!(pts.len(), 2);
        }
        prop_assert_eq!(pts[0].classification, Classification::LocalMin);
        if pts.len() == 2 {
            prop_assert!(pts[0].energy.total < pts[1].energy.total);
        }
        for p in &pts {
            prop_assert!((p.beta - (p.alpha + 0.5) / k).abs() < 1e-10);
        }
    }

    #[test]
    fn consistent_points_are_stationary(k in 2.0f64..8.0, g in 0.0f64..0.6) {
        let pts = stationary_points(sys(k, g), SolveMode::Consistent).unwrap();
        prop_assert!(!pts.is_empty());
        for p in &pts {
            prop_assert!(p.grad_norm <= CONSISTENT_GRADIENT_LIMIT);
            prop_assert!((p.beta - (p.alpha + 0.5) / k).abs() < 1e-10);
            let e = energy_on_constraint(p.alpha, sys(k, g));
            prop_assert!((e - p.energy.total).abs() < 1e-12);
        }
    }
}
