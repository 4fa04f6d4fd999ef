//! Stationary points of the variational energy, their classification, and
//! the disappearance of the bound state as the coupling grows.
//!
//! Two stationarity conditions are supported. [`SolveMode::Paper`] solves the
//! printed condition `f1(alpha) = g' f2(alpha)` on the line
//! `beta = (alpha + 1/2)/k`. [`SolveMode::Consistent`] solves
//! `dE/dalpha = 0` for the energy restricted to the same line, which is the
//! exact stationarity condition of the energy itself. The two differ for
//! `g' > 0`; Paper-mode points therefore carry a nonzero gradient, which is
//! reported but not enforced.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, check_k, constrained_beta, energy, energy_on_constraint,
    energy_on_constraint_derivative, f1, f2_paper, AnsatzParams, DimensionlessSystem,
    EnergyBreakdown,
};

pub const DEFAULT_ALPHA_MIN: f64 = 0.02;
pub const DEFAULT_ALPHA_MAX: f64 = 40.0;
pub const DEFAULT_SCAN_POINTS: usize = 2000;
/// Scan density used by the sweeps and critical-point tracing, fine enough
/// to separate a nearly tangent root pair.
pub const FINE_SCAN_POINTS: usize = 20_000;
pub const ROOT_TOLERANCE: f64 = 1e-10;
pub const ROOT_MERGE_DISTANCE: f64 = 1e-6;
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-4;
pub const GRADIENT_STEP: f64 = 1e-6;
/// `|det H| < DEGENERACY_RATIO * |H|_F^2` marks a degenerate point.
pub const DEGENERACY_RATIO: f64 = 1e-6;
/// Gradient bound enforced on Consistent-mode stationary points.
pub const CONSISTENT_GRADIENT_LIMIT: f64 = 1e-6;
/// Resolution of the bisection on g' in [`critical_coupling`].
pub const CRITICAL_RESOLUTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveMode {
    Paper,
    Consistent,
}

impl std::str::FromStr for SolveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "consistent" => Ok(Self::Consistent),
            other => Err(Error::Argument(format!("unknown mode '{other}'"))),
        }
    }
}

/// Uniform-scan window for root finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearch {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub scan_points: usize,
}

impl RootSearch {
    pub fn new(alpha_min: f64, alpha_max: f64, scan_points: usize) -> Result<Self> {
        if !(alpha_min.is_finite() && alpha_max.is_finite()) || alpha_min <= 0.0 {
            return Err(Error::Argument(format!(
                "alpha range must lie in (0, inf), got [{alpha_min}, {alpha_max}]"
            )));
        }
        if alpha_max <= alpha_min {
            return Err(Error::Argument(format!(
                "empty alpha range [{alpha_min}, {alpha_max}]"
            )));
        }
        if scan_points < 100 {
            return Err(Error::Argument(format!(
                "at least 100 scan points required, got {scan_points}"
            )));
        }
        Ok(Self {
            alpha_min,
            alpha_max,
            scan_points,
        })
    }

    /// Fine scan on `[0.02, max(40, 4k)]`; the tangency sits near `alpha = k - 1`.
    pub fn fine_for(k: f64) -> Self {
        Self {
            alpha_min: DEFAULT_ALPHA_MIN,
            alpha_max: DEFAULT_ALPHA_MAX.max(4.0 * k),
            scan_points: FINE_SCAN_POINTS,
        }
    }
}

impl Default for RootSearch {
    fn default() -> Self {
        Self {
            alpha_min: DEFAULT_ALPHA_MIN,
            alpha_max: DEFAULT_ALPHA_MAX,
            scan_points: DEFAULT_SCAN_POINTS,
        }
    }
}

/// The scalar function whose zeros are the stationary exponents.
pub fn stationarity_residual(alpha: f64, sys: DimensionlessSystem, mode: SolveMode) -> f64 {
    match mode {
        SolveMode::Paper => {
            let lhs = f1(alpha, sys.k());
            if sys.gprime() == 0.0 {
                lhs
            } else {
                lhs - sys.gprime() * f2_paper(alpha, sys.k())
            }
        }
        SolveMode::Consistent => energy_on_constraint_derivative(alpha, sys),
    }
}

/// Bisection on a sign-changing bracket until the bracket is narrower than `tol`.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Argument(format!(
            "bisection needs a sign change on [{lo}, {hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sign changes of the stationarity residual on a uniform scan, refined by
/// bisection. Roots closer than [`ROOT_MERGE_DISTANCE`] are merged; in Paper
/// mode more than two survivors are cut down to the two outermost.
pub fn find_roots(
    sys: DimensionlessSystem,
    mode: SolveMode,
    alpha_range: (f64, f64),
    scan_points: usize,
) -> Result<Vec<f64>> {
    let search = RootSearch::new(alpha_range.0, alpha_range.1, scan_points)?;
    find_roots_in(sys, mode, &search)
}

pub fn find_roots_in(
    sys: DimensionlessSystem,
    mode: SolveMode,
    search: &RootSearch,
) -> Result<Vec<f64>> {
    let f = |a: f64| stationarity_residual(a, sys, mode);
    let n = search.scan_points;
    let step = (search.alpha_max - search.alpha_min) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| search.alpha_min + i as f64 * step).collect();
    let vs: Vec<f64> = xs.iter().map(|&a| f(a)).collect();

    let mut roots = Vec::new();
    for i in 0..n {
        if vs[i] == 0.0 {
            roots.push(xs[i]);
        } else if i + 1 < n && vs[i + 1] != 0.0 && vs[i].signum() != vs[i + 1].signum() {
            roots.push(bisect(f, xs[i], xs[i + 1], ROOT_TOLERANCE)?);
        }
    }

    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last() {
            Some(&last) if r - last < ROOT_MERGE_DISTANCE => {}
            _ => merged.push(r),
        }
    }
    if mode == SolveMode::Paper && merged.len() > 2 {
        merged = vec![merged[0], merged[merged.len() - 1]];
    }
    Ok(merged)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    LocalMin,
    LocalMax,
    Saddle,
    Degenerate,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LocalMin => "LocalMin",
            Self::LocalMax => "LocalMax",
            Self::Saddle => "Saddle",
            Self::Degenerate => "Degenerate",
        }
    }
}

/// Symmetric 2x2 Hessian in `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hessian2 {
    pub d2_alpha: f64,
    pub d2_alpha_beta: f64,
    pub d2_beta: f64,
}

impl Hessian2 {
    pub fn determinant(&self) -> f64 {
        self.d2_alpha * self.d2_beta - self.d2_alpha_beta * self.d2_alpha_beta
    }

    pub fn trace(&self) -> f64 {
        self.d2_alpha + self.d2_beta
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.d2_alpha.powi(2) + 2.0 * self.d2_alpha_beta.powi(2) + self.d2_beta.powi(2)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let half_diff = 0.5 * (self.d2_alpha - self.d2_beta);
        let r = half_diff.hypot(self.d2_alpha_beta);
        (mean - r, mean + r)
    }

    pub fn classify(&self) -> Classification {
        let det = self.determinant();
        if det.abs() < DEGENERACY_RATIO * self.frobenius_sq() {
            return Classification::Degenerate;
        }
        let (lo, hi) = self.eigenvalues();
        if lo > 0.0 {
            Classification::LocalMin
        } else if hi < 0.0 {
            Classification::LocalMax
        } else {
            Classification::Saddle
        }
    }
}

fn hessian_raw(f: &impl Fn(f64, f64) -> f64, a: f64, b: f64, ha: f64, hb: f64) -> Hessian2 {
    let f0 = f(a, b);
    let d2_alpha = (f(a + ha, b) - 2.0 * f0 + f(a - ha, b)) / (ha * ha);
    let d2_beta = (f(a, b + hb) - 2.0 * f0 + f(a, b - hb)) / (hb * hb);
    let d2_alpha_beta = (f(a + ha, b + hb) - f(a + ha, b - hb) - f(a - ha, b + hb)
        + f(a - ha, b - hb))
        / (4.0 * ha * hb);
    Hessian2 {
        d2_alpha,
        d2_alpha_beta,
        d2_beta,
    }
}

/// Central-difference Hessian of `f(alpha, beta)` with one Richardson step.
/// The step shrinks near the `alpha, beta > 0` boundary.
pub fn hessian_of(f: impl Fn(f64, f64) -> f64, params: AnsatzParams, h: f64) -> Result<Hessian2> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::Argument(format!(
            "Hessian step must lie in [1e-6, 1e-2], got {h}"
        )));
    }
    let AnsatzParams { alpha, beta } = params;
    let ha = h.min(0.25 * alpha);
    let hb = h.min(0.25 * beta);
    let coarse = hessian_raw(&f, alpha, beta, ha, hb);
    let fine = hessian_raw(&f, alpha, beta, 0.5 * ha, 0.5 * hb);
    let rich = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    Ok(Hessian2 {
        d2_alpha: rich(coarse.d2_alpha, fine.d2_alpha),
        d2_alpha_beta: rich(coarse.d2_alpha_beta, fine.d2_alpha_beta),
        d2_beta: rich(coarse.d2_beta, fine.d2_beta),
    })
}

/// Hessian of the full two-parameter energy.
pub fn hessian_fd(params: AnsatzParams, sys: DimensionlessSystem, h: f64) -> Result<Hessian2> {
    hessian_of(|a, b| energy_at(a, b, sys), params, h)
}

/// Hessian of the parenthesized oscillator bracket alone, without the
/// `4/k^2` prefactor and without the interaction term.
pub fn bracket_hessian_fd(params: AnsatzParams, k: f64, h: f64) -> Result<Hessian2> {
    let bracket = |a: f64, b: f64| {
        a / 2.0 + a * a / (4.0 * b * b) + a / (8.0 * b * b) - a * k / (2.0 * b)
    };
    hessian_of(bracket, params, h)
}

/// Hessian of `oscillator(alpha, beta) + I(alpha)` with
/// `I'(alpha) = -(2 g'/k^2) f2(alpha)`: the functional that is stationary
/// exactly where `f1 = g' f2` on the beta line.
pub fn paper_condition_hessian(
    params: AnsatzParams,
    sys: DimensionlessSystem,
    h: f64,
) -> Result<Hessian2> {
    let free = sys.with_gprime(0.0)?;
    let mut hess = hessian_of(|a, b| energy_at(a, b, free), params, h)?;
    if sys.gprime() != 0.0 {
        let k = sys.k();
        let a = params.alpha;
        let step = h.min(0.25 * a);
        let df2 = (f2_paper(a + step, k) - f2_paper(a - step, k)) / (2.0 * step);
        hess.d2_alpha -= 2.0 * sys.gprime() / (k * k) * df2;
    }
    Ok(hess)
}

fn energy_at(alpha: f64, beta: f64, sys: DimensionlessSystem) -> f64 {
    energy(AnsatzParams { alpha, beta }, sys).total
}

/// `max(|dE/dalpha|, |dE/dbeta|)` by central differences.
pub fn gradient_norm(params: AnsatzParams, sys: DimensionlessSystem) -> f64 {
    let AnsatzParams { alpha, beta } = params;
    let ha = GRADIENT_STEP.min(0.25 * alpha);
    let hb = GRADIENT_STEP.min(0.25 * beta);
    let ga = (energy_at(alpha + ha, beta, sys) - energy_at(alpha - ha, beta, sys)) / (2.0 * ha);
    let gb = (energy_at(alpha, beta + hb, sys) - energy_at(alpha, beta - hb, sys)) / (2.0 * hb);
    ga.abs().max(gb.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub alpha: f64,
    pub beta: f64,
    pub energy: EnergyBreakdown,
    pub grad_norm: f64,
    /// Hessian of the variational energy itself.
    pub hessian: Hessian2,
    pub classification: Classification,
    /// Hessian of the functional whose stationarity condition the mode
    /// solves. Identical to `hessian` in Consistent mode; in Paper mode the
    /// interaction term is replaced by `I(alpha)` with
    /// `I'(alpha) = -(2 g'/k^2) f2(alpha)`.
    pub condition_hessian: Hessian2,
    pub condition_classification: Classification,
}

impl StationaryPoint {
    pub fn params(&self) -> AnsatzParams {
        AnsatzParams {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

/// Analyses one root of the stationarity residual.
pub fn stationary_point_at(
    alpha: f64,
    sys: DimensionlessSystem,
    mode: SolveMode,
) -> Result<StationaryPoint> {
    let params = AnsatzParams::on_constraint(alpha, sys.k())?;
    let grad_norm = gradient_norm(params, sys);
    if mode == SolveMode::Consistent && grad_norm > CONSISTENT_GRADIENT_LIMIT {
        return Err(Error::Convergence {
            iterations: 0,
            residual: grad_norm,
        });
    }
    let hessian = hessian_fd(params, sys, DEFAULT_HESSIAN_STEP)?;
    let condition_hessian = match mode {
        SolveMode::Consistent => hessian,
        SolveMode::Paper => paper_condition_hessian(params, sys, DEFAULT_HESSIAN_STEP)?,
    };
    Ok(StationaryPoint {
        alpha: params.alpha,
        beta: params.beta,
        energy: energy(params, sys),
        grad_norm,
        hessian,
        classification: hessian.classify(),
        condition_hessian,
        condition_classification: condition_hessian.classify(),
    })
}

/// All stationary points in the fine window for `sys.k()`, ascending in alpha.
pub fn stationary_points(sys: DimensionlessSystem, mode: SolveMode) -> Result<Vec<StationaryPoint>> {
    stationary_points_in(sys, mode, &RootSearch::fine_for(sys.k()))
}

pub fn stationary_points_in(
    sys: DimensionlessSystem,
    mode: SolveMode,
    search: &RootSearch,
) -> Result<Vec<StationaryPoint>> {
    find_roots_in(sys, mode, search)?
        .into_iter()
        .map(|a| stationary_point_at(a, sys, mode))
        .collect()
}

/// How the bound state stops existing as g' increases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Termination {
    /// The minimum merges with a second stationary point and both vanish.
    SaddleNode,
    /// The minimum survives with positive energy and vanishes later, at
    /// `minimum_vanishes_at`.
    EnergyCrossesZero { minimum_vanishes_at: f64 },
}

impl Termination {
    pub fn describe(&self) -> String {
        match self {
            Self::SaddleNode => "saddle-node".to_string(),
            Self::EnergyCrossesZero {
                minimum_vanishes_at,
            } => format!("energy-crosses-zero (minimum vanishes at g'={minimum_vanishes_at:.9})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub k: f64,
    pub gprime_c: f64,
    pub alpha_star: f64,
    pub beta_star: f64,
    pub energy_at_critical: f64,
    pub termination: Termination,
    /// Independent route: maximum of `f1/f2` over the branch where both are
    /// positive (Paper mode only).
    pub tangency_gprime: Option<f64>,
    pub tangency_alpha: Option<f64>,
}

/// Critical coupling at which the bound state disappears.
pub fn critical_coupling(k: f64, mode: SolveMode) -> Result<CriticalPoint> {
    check_k(k)?;
    match mode {
        SolveMode::Paper => paper_critical(k),
        SolveMode::Consistent => consistent_critical(k),
    }
}

fn bisect_predicate(
    pred: impl Fn(f64) -> Result<bool>,
    mut lo: f64,
    mut hi: f64,
    resolution: f64,
) -> Result<(f64, f64)> {
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn paper_critical(k: f64) -> Result<CriticalPoint> {
    let search = RootSearch::fine_for(k);
    let base = DimensionlessSystem::new(k, 0.0)?;
    let roots_at = |g: f64| find_roots_in(base.with_gprime(g)?, SolveMode::Paper, &search);
    let has_roots = |g: f64| roots_at(g).map(|r| !r.is_empty());

    let mut hi = 1.0;
    while has_roots(hi)? {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Convergence { iterations: 0, residual: hi });
        }
    }
    let mut lo = 0.5 * hi;
    while !has_roots(lo)? {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::Convergence { iterations: 0, residual: lo });
        }
    }
    let (lo, _) = bisect_predicate(has_roots, lo, hi, CRITICAL_RESOLUTION)?;
    let roots = roots_at(lo)?;
    let alpha_star = roots.iter().sum::<f64>() / roots.len() as f64;
    let sys = base.with_gprime(lo)?;
    let (tangency_alpha, tangency_gprime) = ratio_maximum(k, search.alpha_max);
    Ok(CriticalPoint {
        k,
        gprime_c: lo,
        alpha_star,
        beta_star: constrained_beta(alpha_star, k),
        energy_at_critical: energy_on_constraint(alpha_star, sys),
        termination: Termination::SaddleNode,
        tangency_gprime: Some(tangency_gprime),
        tangency_alpha: Some(tangency_alpha),
    })
}

/// Maximum of `f1(alpha)/f2(alpha)` for `alpha > (k-1)/2`, where both are
/// positive. Coarse scan followed by golden-section refinement.
pub fn ratio_maximum(k: f64, alpha_max: f64) -> (f64, f64) {
    let ratio = |a: f64| {
        let d = f2_paper(a, k);
        if d > 0.0 {
            f1(a, k) / d
        } else {
            f64::NEG_INFINITY
        }
    };
    let start = 0.5 * (k - 1.0);
    let n = 4000;
    let step = (alpha_max - start) / n as f64;
    let (best_i, _) = (1..=n)
        .map(|i| (i, ratio(start + i as f64 * step)))
        .fold((1, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut lo = start + (best_i as f64 - 1.0) * step;
    let mut hi = start + (best_i as f64 + 1.0) * step;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (ratio(c), ratio(d));
    while hi - lo > 1e-10 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = ratio(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = ratio(d);
        }
    }
    let a = 0.5 * (lo + hi);
    (a, ratio(a))
}

/// Local minima of the constrained energy along alpha.
fn constrained_minima(sys: DimensionlessSystem, search: &RootSearch) -> Result<Vec<f64>> {
    let roots = find_roots_in(sys, SolveMode::Consistent, search)?;
    Ok(roots
        .into_iter()
        .filter(|&a| {
            let d = 1e-6 * a.max(1e-3);
            energy_on_constraint_derivative(a + d, sys) > energy_on_constraint_derivative(a - d, sys)
        })
        .collect())
}

fn consistent_critical(k: f64) -> Result<CriticalPoint> {
    let search = RootSearch {
        alpha_min: 1e-4,
        alpha_max: DEFAULT_ALPHA_MAX.max(4.0 * k),
        scan_points: FINE_SCAN_POINTS,
    };
    let base = DimensionlessSystem::new(k, 0.0)?;
    let negative_min = |g: f64| -> Result<Option<f64>> {
        let sys = base.with_gprime(g)?;
        Ok(constrained_minima(sys, &search)?
            .into_iter()
            .find(|&a| energy_on_constraint(a, sys) < 0.0))
    };
    let any_min = |g: f64| -> Result<bool> {
        Ok(!constrained_minima(base.with_gprime(g)?, &search)?.is_empty())
    };

    // slope of the constrained energy at alpha -> 0+ turns positive here
    let edge = 4.0 * SQRT_2 * (k * k - 1.0) / (k * k * k);
    let mut hi = 2.0 * edge;
    while any_min(hi)? {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Convergence { iterations: 0, residual: hi });
        }
    }
    let (lo, hi_neg) =
        bisect_predicate(|g| Ok(negative_min(g)?.is_some()), 0.0, hi, CRITICAL_RESOLUTION)?;
    let alpha_star = negative_min(lo)?.ok_or(Error::Convergence {
        iterations: 0,
        residual: lo,
    })?;
    let termination = if any_min(hi_neg)? {
        let (vanish, _) = bisect_predicate(any_min, hi_neg, hi, CRITICAL_RESOLUTION)?;
        Termination::EnergyCrossesZero {
            minimum_vanishes_at: vanish,
        }
    } else {
        Termination::SaddleNode
    };
    let sys = base.with_gprime(lo)?;
    Ok(CriticalPoint {
        k,
        gprime_c: lo,
        alpha_star,
        beta_star: constrained_beta(alpha_star, k),
        energy_at_critical: energy_on_constraint(alpha_star, sys),
        termination,
        tangency_gprime: None,
        tangency_alpha: None,
    })
}

/// One row of a coupling sweep at fixed k; absent roots are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGRow {
    pub gprime: f64,
    pub alpha1: Option<f64>,
    pub beta1: Option<f64>,
    pub e1: Option<f64>,
    pub alpha2: Option<f64>,
    pub beta2: Option<f64>,
    pub e2: Option<f64>,
}

pub fn sweep_g(k: f64, gprime_list: &[f64], mode: SolveMode) -> Result<Vec<SweepGRow>> {
    check_k(k)?;
    if gprime_list.is_empty() {
        return Err(Error::Argument("empty coupling list".into()));
    }
    let search = RootSearch::fine_for(k);
    gprime_list
        .par_iter()
        .map(|&g| {
            let sys = DimensionlessSystem::new(k, g)?;
            let roots = find_roots_in(sys, mode, &search)?;
            let at = |i: usize| roots.get(i).copied();
            let beta = |a: Option<f64>| a.map(|a| constrained_beta(a, k));
            let e = |a: Option<f64>| a.map(|a| energy_on_constraint(a, sys));
            Ok(SweepGRow {
                gprime: g,
                alpha1: at(0),
                beta1: beta(at(0)),
                e1: e(at(0)),
                alpha2: at(1),
                beta2: beta(at(1)),
                e2: e(at(1)),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepK {
    pub rows: Vec<CriticalPoint>,
    /// `g'_c` strictly decreasing along the input order.
    pub gprime_c_decreasing: bool,
}

pub fn sweep_k(k_list: &[f64], mode: SolveMode) -> Result<SweepK> {
    if k_list.is_empty() {
        return Err(Error::Argument("empty k list".into()));
    }
    for &k in k_list {
        check_k(k)?;
    }
    let rows: Vec<CriticalPoint> = k_list
        .par_iter()
        .map(|&k| critical_coupling(k, mode))
        .collect::<Result<_>>()?;
    let gprime_c_decreasing = rows.windows(2).all(|w| w[1].gprime_c < w[0].gprime_c);
    Ok(SweepK {
        rows,
        gprime_c_decreasing,
    })
}

/// Convenience: the lower (bound) stationary exponent, if any.
pub fn bound_state(sys: DimensionlessSystem, mode: SolveMode) -> Result<Option<AnsatzParams>> {
    let roots = find_roots_in(sys, mode, &RootSearch::fine_for(sys.k()))?;
    roots
        .first()
        .map(|&a| AnsatzParams::on_constraint(a, sys.k()))
        .transpose()
}

/// Derivative of the Paper-mode residual; vanishes at a tangency.
pub fn residual_slope(alpha: f64, sys: DimensionlessSystem, mode: SolveMode) -> f64 {
    let h = 1e-5 * alpha.max(1.0);
    (stationarity_residual(alpha + h, sys, mode) - stationarity_residual(alpha - h, sys, mode))
        / (2.0 * h)
}

/// Curvature of [`model::energy_on_constraint`] by central differences.
pub fn constrained_curvature(alpha: f64, sys: DimensionlessSystem) -> f64 {
    let h = 1e-4 * alpha.max(1.0);
    (model::energy_on_constraint(alpha + h, sys) - 2.0 * model::energy_on_constraint(alpha, sys)
        + model::energy_on_constraint(alpha - h, sys))
        / (h * h)
}
