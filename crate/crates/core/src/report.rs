//! Side-by-side comparison of the published tables and Hessian entries with
//! values recomputed from the variational energy.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnsatzParams, DimensionlessSystem};
use crate::oracle::{
    ansatz_energy_with, grid_minimize, imaginary_time_ground_state, BetaChoice,
    LambdaConvention, PdeConfig,
};
use crate::solver::{
    bracket_hessian_fd, critical_coupling, hessian_fd, stationary_points, sweep_g, Hessian2,
    SolveMode, DEFAULT_HESSIAN_STEP,
};

/// A published number and where it comes from.
#[derive(Debug, Clone, Copy)]
pub struct PaperValue {
    pub quantity: &'static str,
    pub value: f64,
}

/// Coupling-sweep table at k = 3: (g', E1, E2).
pub const SWEEP_TABLE: [(f64, f64, f64); 5] = [
    (0.10, -0.418, 0.463),
    (0.12, -0.407, 0.168),
    (0.14, -0.395, -0.029),
    (0.155, -0.37, -0.177),
    // printed as "0.17 = g'_c"; evaluated at the computed critical coupling
    (0.17, -0.31, -0.31),
];

/// Critical-coupling table: (k, g'_c, E at g'_c).
pub const CRITICAL_TABLE: [(f64, f64, f64); 4] = [
    (2.0, 0.445, -0.048),
    (3.0, 0.170, -0.310),
    (4.0, 0.095, -0.459),
    (5.0, 0.061, -0.546),
];

/// Hessian entries at the lower stationary point, k = 3, g' = 0.1.
pub const HESSIAN_LOWER: [PaperValue; 3] = [
    PaperValue { quantity: "d2E/dbeta2", value: 10.61 },
    PaperValue { quantity: "d2E/dalpha2", value: 1.66 },
    PaperValue { quantity: "d2E/dalpha dbeta", value: 1.1 },
];

/// Hessian entries at the upper stationary point, k = 3, g' = 0.1.
pub const HESSIAN_UPPER: [PaperValue; 3] = [
    PaperValue { quantity: "d2E/dbeta2", value: 0.84 },
    PaperValue { quantity: "d2E/dalpha2", value: -437.75 },
    PaperValue { quantity: "d2E/dalpha dbeta", value: -0.22 },
];

/// Published stationary points at k = 3, g' = 0.1: (alpha, beta).
pub const PUBLISHED_POINTS: [(f64, f64); 2] = [(1.2, 0.56), (6.2, 2.23)];
/// Published tangency exponent at k = 3.
pub const PUBLISHED_TANGENCY_ALPHA: f64 = 2.0;

pub const SWEEP_ENERGY_TOL: f64 = 0.1;
pub const CRITICAL_GPRIME_TOL: f64 = 0.005;
pub const CRITICAL_ENERGY_TOL: f64 = 0.1;
pub const ROOT_TOL: f64 = 0.15;
pub const TANGENCY_TOL: f64 = 0.05;
pub const BRACKET_HESSIAN_TOL: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub quantity: String,
    pub paper_value: Option<f64>,
    pub computed_value: Option<f64>,
    pub abs_diff: Option<f64>,
    /// `None` when only the sign is compared.
    pub tolerance: Option<f64>,
    pub within_tolerance: bool,
    /// A second computed value under an alternative reading, explained in `notes`.
    pub alternative_value: Option<f64>,
    pub notes: String,
}

impl ReportEntry {
    fn numeric(quantity: String, paper: f64, computed: Option<f64>, tol: f64, notes: String) -> Self {
        let abs_diff = computed.map(|c| (c - paper).abs());
        Self {
            quantity,
            paper_value: Some(paper),
            computed_value: computed,
            abs_diff,
            tolerance: Some(tol),
            within_tolerance: abs_diff.is_some_and(|d| d <= tol),
            alternative_value: None,
            notes,
        }
    }

    fn sign_only(quantity: String, paper: f64, computed: f64, notes: String) -> Self {
        Self {
            quantity,
            paper_value: Some(paper),
            computed_value: Some(computed),
            abs_diff: Some((computed - paper).abs()),
            tolerance: None,
            within_tolerance: paper.signum() == computed.signum(),
            alternative_value: None,
            notes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeCheck {
    pub k: f64,
    pub gprime: f64,
    pub convention: LambdaConvention,
    pub pde_energy: f64,
    /// Constrained variational minimum with the same quartic coefficient.
    pub variational_energy: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub k_list: Vec<f64>,
    pub entries: Vec<ReportEntry>,
    pub pde_checks: Vec<PdeCheck>,
}

impl ComparisonReport {
    pub fn entry(&self, quantity: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.quantity == quantity)
    }

    pub fn to_markdown(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
        let mut s = String::new();
        s.push_str("# Published values vs. recomputed values\n\n");
        s.push_str("| quantity | published | computed | abs diff | tolerance | ok | alternative | notes |\n");
        s.push_str("|---|---|---|---|---|---|---|---|\n");
        for e in &self.entries {
            let tol = e.tolerance.map_or_else(|| "sign".to_string(), |t| format!("{t}"));
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                e.quantity,
                fmt(e.paper_value),
                fmt(e.computed_value),
                fmt(e.abs_diff),
                tol,
                if e.within_tolerance { "pass" } else { "MISMATCH" },
                fmt(e.alternative_value),
                e.notes
            );
        }
        s.push_str("\n## Grid solver energies\n\n");
        s.push_str("| k | g' | quartic convention | grid energy | variational minimum | iterations |\n");
        s.push_str("|---|---|---|---|---|---|\n");
        for p in &self.pde_checks {
            let _ = writeln!(
                s,
                "| {} | {} | {:?} | {:.9} | {:.9} | {} |",
                p.k, p.gprime, p.convention, p.pde_energy, p.variational_energy, p.iterations
            );
        }
        s
    }
}

fn hessian_component(h: &Hessian2, quantity: &str) -> f64 {
    match quantity {
        "d2E/dbeta2" => h.d2_beta,
        "d2E/dalpha2" => h.d2_alpha,
        _ => h.d2_alpha_beta,
    }
}

/// Builds the comparison for the given well parameters (each in [2, 6]).
pub fn emit_report(k_list: &[f64]) -> Result<ComparisonReport> {
    if k_list.is_empty() {
        return Err(Error::Argument("report needs at least one k".into()));
    }
    if let Some(k) = k_list.iter().find(|k| !(2.0..=6.0).contains(*k)) {
        return Err(Error::Argument(format!("report k values must lie in [2, 6], got {k}")));
    }
    let mut entries = Vec::new();
    let k3 = 3.0;

    // stationary points and Hessians at k = 3, g' = 0.1
    let sys = DimensionlessSystem::new(k3, 0.1)?;
    let points = stationary_points(sys, SolveMode::Paper)?;
    for (i, &(alpha, beta)) in PUBLISHED_POINTS.iter().enumerate() {
        let p = points.get(i);
        entries.push(ReportEntry::numeric(
            format!("stationary alpha{} (k=3, g'=0.1)", i + 1),
            alpha,
            p.map(|p| p.alpha),
            ROOT_TOL,
            "root of f1 = g' f2".into(),
        ));
        entries.push(ReportEntry::numeric(
            format!("stationary beta{} (k=3, g'=0.1)", i + 1),
            beta,
            p.map(|p| p.beta),
            ROOT_TOL,
            "beta = (alpha + 1/2)/k".into(),
        ));
    }
    for (label, published, point, paper_values) in [
        ("Hessian lower", PUBLISHED_POINTS[0], points.first(), &HESSIAN_LOWER),
        ("Hessian upper", PUBLISHED_POINTS[1], points.get(1), &HESSIAN_UPPER),
    ] {
        let Some(point) = point else { continue };
        let at_paper = AnsatzParams::new(published.0, published.1)?;
        let bracket = bracket_hessian_fd(at_paper, k3, DEFAULT_HESSIAN_STEP)?;
        let full_at_paper = hessian_fd(at_paper, sys, DEFAULT_HESSIAN_STEP)?;
        for pv in paper_values.iter() {
            let computed = hessian_component(&point.hessian, pv.quantity);
            let mut e = ReportEntry::sign_only(
                format!("{label} {}", pv.quantity),
                pv.value,
                computed,
                format!(
                    "full energy at the refined root ({:.4}, {:.4}), classified {} (det {:.3e}); \
                     {:.4} at the published point; stationarity-condition functional gives {:.4}, \
                     classified {}; alternative = bracket without the 4/k^2 prefactor or \
                     interaction term at the published point (prefactor hypothesis); only the \
                     sign is compared",
                    point.alpha,
                    point.beta,
                    point.classification.as_str(),
                    point.hessian.determinant(),
                    hessian_component(&full_at_paper, pv.quantity),
                    hessian_component(&point.condition_hessian, pv.quantity),
                    point.condition_classification.as_str(),
                ),
            );
            e.alternative_value = Some(hessian_component(&bracket, pv.quantity));
            if label == "Hessian lower" && pv.quantity == "d2E/dbeta2" {
                let alt = e.alternative_value.unwrap_or(f64::NAN);
                e.notes.push_str(&format!(
                    "; bracket value within {BRACKET_HESSIAN_TOL}: {}",
                    (alt - pv.value).abs() <= BRACKET_HESSIAN_TOL
                ));
            }
            entries.push(e);
        }
    }

    // critical couplings
    let crit3 = critical_coupling(k3, SolveMode::Paper)?;
    entries.push(ReportEntry::numeric(
        "tangency alpha* (k=3)".into(),
        PUBLISHED_TANGENCY_ALPHA,
        Some(crit3.alpha_star),
        TANGENCY_TOL,
        "merged double root at g'_c".into(),
    ));

    // energies along the coupling sweep at k = 3
    let gs: Vec<f64> = SWEEP_TABLE
        .iter()
        .map(|&(g, _, _)| if g == 0.17 { crit3.gprime_c } else { g })
        .collect();
    let rows = sweep_g(k3, &gs, SolveMode::Paper)?;
    for (&(g, e1, e2), row) in SWEEP_TABLE.iter().zip(&rows) {
        let note = if g == 0.17 {
            format!("evaluated at computed g'_c = {:.6}", row.gprime)
        } else {
            "energy at the refined root".to_string()
        };
        let e2_computed = row.e2.or(if g == 0.17 { row.e1 } else { None });
        entries.push(ReportEntry::numeric(
            format!("sweep E1 (g'={g})"),
            e1,
            row.e1,
            SWEEP_ENERGY_TOL,
            note.clone(),
        ));
        entries.push(ReportEntry::numeric(
            format!("sweep E2 (g'={g})"),
            e2,
            e2_computed,
            SWEEP_ENERGY_TOL,
            note,
        ));
    }

    // critical couplings
    let mut ks: Vec<f64> = CRITICAL_TABLE.iter().map(|row| row.0).collect();
    for &k in k_list {
        if !ks.contains(&k) {
            ks.push(k);
        }
    }
    let crits: Vec<_> = ks
        .par_iter()
        .map(|&k| critical_coupling(k, SolveMode::Paper))
        .collect::<Result<_>>()?;
    for (&k, c) in ks.iter().zip(&crits) {
        let published = CRITICAL_TABLE.iter().find(|row| row.0 == k);
        match published {
            Some(&(_, gc, ec)) => {
                entries.push(ReportEntry::numeric(
                    format!("critical g'_c (k={k})"),
                    gc,
                    Some(c.gprime_c),
                    CRITICAL_GPRIME_TOL,
                    format!("tangency cross-check {:.6}", c.tangency_gprime.unwrap_or(f64::NAN)),
                ));
                entries.push(ReportEntry::numeric(
                    format!("critical E (k={k})"),
                    ec,
                    Some(c.energy_at_critical),
                    CRITICAL_ENERGY_TOL,
                    format!("energy at alpha* = {:.6}", c.alpha_star),
                ));
            }
            None => entries.push(ReportEntry {
                quantity: format!("g'_c (k={k})"),
                paper_value: None,
                computed_value: Some(c.gprime_c),
                abs_diff: None,
                tolerance: None,
                within_tolerance: true,
                alternative_value: Some(c.energy_at_critical),
                notes: "no published value; alternative = energy at g'_c".into(),
            }),
        }
    }

    // grid solver energies for both quartic conventions
    let cases = [(3.0, 0.1)];
    let mut jobs = Vec::new();
    for &(k, g) in &cases {
        for conv in [LambdaConvention::DerivedLambda, LambdaConvention::PaperLambda] {
            jobs.push((k, g, conv));
        }
    }
    let pde_checks = jobs
        .par_iter()
        .map(|&(k, g, conv)| -> Result<PdeCheck> {
            let sys = DimensionlessSystem::new(k, g)?;
            let pde = imaginary_time_ground_state(sys, conv, &PdeConfig::for_k(k))?;
            Ok(PdeCheck {
                k,
                gprime: g,
                convention: conv,
                pde_energy: pde.energy_over_nd,
                variational_energy: variational_minimum(sys, conv)?,
                iterations: pde.iterations,
            })
        })
        .collect::<Result<_>>()?;

    Ok(ComparisonReport {
        k_list: ks,
        entries,
        pde_checks,
    })
}

/// Minimum of the ansatz energy over the constrained line for the given
/// quartic convention.
pub fn variational_minimum(sys: DimensionlessSystem, conv: LambdaConvention) -> Result<f64> {
    match conv {
        LambdaConvention::PaperLambda => {
            let r = grid_minimize(sys, (0.02, 10.0 * sys.k()), BetaChoice::Constrained, 4000)?;
            Ok(r.refined_energy)
        }
        LambdaConvention::DerivedLambda => {
            // the beta line is still the exact beta-minimizer; scan alpha
            let k = sys.k();
            let n = 4000;
            let (lo, hi) = (0.02, 10.0 * k);
            let e = |a: f64| -> f64 {
                ansatz_energy_with(AnsatzParams { alpha: a, beta: (a + 0.5) / k }, sys, conv)
            };
            let step = (hi - lo) / (n - 1) as f64;
            let best = (0..n)
                .map(|i| lo + i as f64 * step)
                .min_by(|a, b| e(*a).total_cmp(&e(*b)))
                .unwrap_or(lo);
            // ternary refinement inside the best cell
            let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
            while b - a > 1e-12 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if e(m1) < e(m2) {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            Ok(e(0.5 * (a + b)))
        }
    }
}
