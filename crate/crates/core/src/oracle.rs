//! Independent checks on the variational results: exhaustive scans of the
//! variational energy, and a grid solver that minimizes the full
//! Gross-Pitaevskii energy functional by normalized gradient flow.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::analytic::noninteracting_solution;
use crate::error::{Error, Result};
use crate::model::{
    energy, energy_on_constraint, morse_potential, AnsatzParams, DimensionlessSystem,
};

pub const MIN_GRID_RESOLUTION: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BetaChoice {
    /// Scan alpha only, with `beta = (alpha + 1/2)/k`.
    Constrained,
    /// Scan the full rectangle in `(alpha, beta)`.
    Full { beta_min: f64, beta_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    /// `None` for a constrained scan.
    pub beta_range: Option<(f64, f64)>,
    pub beta_points: usize,
}

impl GridSpec {
    pub fn alpha_cell(&self) -> f64 {
        (self.alpha_max - self.alpha_min) / (self.alpha_points - 1) as f64
    }

    pub fn beta_cell(&self) -> Option<f64> {
        self.beta_range
            .map(|(lo, hi)| (hi - lo) / (self.beta_points - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best_alpha: f64,
    pub best_beta: f64,
    pub best_energy: f64,
    pub grid_spec: GridSpec,
    /// Local refinement inside the best cell.
    pub refined_alpha: f64,
    pub refined_beta: f64,
    pub refined_energy: f64,
}

fn check_range(lo: f64, hi: f64, what: &str) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "{what} range must be positive and non-degenerate, got [{lo}, {hi}]"
        )))
    }
}

/// Exhaustive scan of the variational energy followed by a golden-section
/// refinement around the best node.
pub fn grid_minimize(
    sys: DimensionlessSystem,
    alpha_range: (f64, f64),
    beta_choice: BetaChoice,
    resolution: usize,
) -> Result<GridSearchResult> {
    let (a_lo, a_hi) = alpha_range;
    check_range(a_lo, a_hi, "alpha")?;
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::Argument(format!(
            "grid resolution must be at least {MIN_GRID_RESOLUTION}, got {resolution}"
        )));
    }
    let k = sys.k();
    let da = (a_hi - a_lo) / (resolution - 1) as f64;
    let alpha_at = |i: usize| a_lo + i as f64 * da;

    match beta_choice {
        BetaChoice::Constrained => {
            let (best_i, best_energy) = (0..resolution)
                .map(|i| (i, energy_on_constraint(alpha_at(i), sys)))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            let best_alpha = alpha_at(best_i);
            let lo = (best_alpha - da).max(a_lo);
            let hi = (best_alpha + da).min(a_hi);
            let refined_alpha = golden_min(|a| energy_on_constraint(a, sys), lo, hi, 1e-12);
            let refined_energy = energy_on_constraint(refined_alpha, sys);
            Ok(GridSearchResult {
                best_alpha,
                best_beta: (best_alpha + 0.5) / k,
                best_energy,
                grid_spec: GridSpec {
                    alpha_min: a_lo,
                    alpha_max: a_hi,
                    alpha_points: resolution,
                    beta_range: None,
                    beta_points: 0,
                },
                refined_alpha,
                refined_beta: (refined_alpha + 0.5) / k,
                refined_energy,
            })
        }
        BetaChoice::Full { beta_min, beta_max } => {
            check_range(beta_min, beta_max, "beta")?;
            let db = (beta_max - beta_min) / (resolution - 1) as f64;
            let beta_at = |j: usize| beta_min + j as f64 * db;
            let e = |a: f64, b: f64| energy(AnsatzParams { alpha: a, beta: b }, sys).total;
            let mut best = (0, 0, f64::INFINITY);
            for i in 0..resolution {
                let a = alpha_at(i);
                for j in 0..resolution {
                    let v = e(a, beta_at(j));
                    if v < best.2 {
                        best = (i, j, v);
                    }
                }
            }
            let (best_alpha, best_beta) = (alpha_at(best.0), beta_at(best.1));
            let (a_box, b_box) = (
                ((best_alpha - da).max(a_lo), (best_alpha + da).min(a_hi)),
                ((best_beta - db).max(beta_min), (best_beta + db).min(beta_max)),
            );
            // cyclic coordinate golden-section search inside the best cell
            let (mut a, mut b) = (best_alpha, best_beta);
            for _ in 0..60 {
                a = golden_min(|x| e(x, b), a_box.0, a_box.1, 1e-13);
                b = golden_min(|y| e(a, y), b_box.0, b_box.1, 1e-13);
            }
            Ok(GridSearchResult {
                best_alpha,
                best_beta,
                best_energy: best.2,
                grid_spec: GridSpec {
                    alpha_min: a_lo,
                    alpha_max: a_hi,
                    alpha_points: resolution,
                    beta_range: Some((beta_min, beta_max)),
                    beta_points: resolution,
                },
                refined_alpha: a,
                refined_beta: b,
                refined_energy: e(a, b),
            })
        }
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Coefficient convention for the quartic term `(lambda/2) |phi|^4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaConvention {
    /// Direct reduction of the physical functional: `lambda = 2 sqrt2 g'/k`.
    DerivedLambda,
    /// Reproduces the interaction term of the variational energy for the
    /// ansatz: `lambda = k g' / sqrt2`.
    PaperLambda,
}

impl LambdaConvention {
    pub fn lambda(&self, sys: DimensionlessSystem) -> f64 {
        match self {
            Self::DerivedLambda => 2.0 * SQRT_2 * sys.gprime() / sys.k(),
            Self::PaperLambda => sys.k() * sys.gprime() / SQRT_2,
        }
    }
}

impl std::str::FromStr for LambdaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Self::DerivedLambda),
            "paper" => Ok(Self::PaperLambda),
            other => Err(Error::Argument(format!("unknown lambda convention '{other}'"))),
        }
    }
}

/// Variational energy of the ansatz with the quartic coefficient of the
/// given convention: oscillator part plus `(lambda/2) C(alpha)`.
pub fn ansatz_energy_with(
    params: AnsatzParams,
    sys: DimensionlessSystem,
    convention: LambdaConvention,
) -> f64 {
    let e = energy(params, sys);
    if sys.gprime() == 0.0 {
        return e.oscillator_part;
    }
    let c = e.interaction_part / sys.interaction_coefficient();
    e.oscillator_part + 0.5 * convention.lambda(sys) * c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeConfig {
    pub x_min: f64,
    pub x_max: f64,
    /// Grid nodes, both walls included.
    pub n_points: usize,
    pub dtau: f64,
    pub tol: f64,
    pub max_iterations: usize,
}

impl PdeConfig {
    pub fn for_k(k: f64) -> Self {
        Self {
            x_min: -3.0,
            x_max: 10.0 * k,
            n_points: 2048,
            dtau: 1e-3,
            tol: 1e-12,
            max_iterations: 1_000_000,
        }
    }

    fn validate(&self, k: f64) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_min <= -2.0) {
            return Err(Error::Argument(format!(
                "left wall must satisfy x_min <= -2, got {}",
                self.x_min
            )));
        }
        if !(self.x_max.is_finite() && self.x_max >= 10.0 * k) {
            return Err(Error::Argument(format!(
                "right wall must satisfy x_max >= 10 k = {}, got {}",
                10.0 * k,
                self.x_max
            )));
        }
        if self.n_points < 1024 {
            return Err(Error::Argument(format!(
                "at least 1024 grid points required, got {}",
                self.n_points
            )));
        }
        if !(self.dtau.is_finite() && self.dtau > 0.0) {
            return Err(Error::Argument(format!("dtau must be positive, got {}", self.dtau)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Argument(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeGroundState {
    pub energy_over_nd: f64,
    /// Positions in units of the Morse range, walls included.
    pub x_grid: Vec<f64>,
    pub density: Vec<f64>,
    pub iterations: usize,
    /// Energy change of the last accepted step.
    pub residual: f64,
    pub final_dtau: f64,
    pub interaction_convention: LambdaConvention,
    /// Energy after every accepted step, starting with the initial state.
    #[serde(skip)]
    pub energy_trace: Vec<f64>,
}

impl PdeGroundState {
    pub fn spacing(&self) -> f64 {
        self.x_grid[1] - self.x_grid[0]
    }

    pub fn norm(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.spacing()
    }

    /// Fraction of the norm at positions beyond `x`.
    pub fn mass_beyond(&self, x: f64) -> f64 {
        let h = self.spacing();
        self.x_grid
            .iter()
            .zip(&self.density)
            .filter(|(&xi, _)| xi > x)
            .map(|(_, &d)| d * h)
            .sum::<f64>()
            / self.norm()
    }
}

struct Discretization {
    h: f64,
    kinetic: f64,
    potential: Vec<f64>,
    lambda: f64,
}

impl Discretization {
    // phi carries only interior nodes; the walls are zero.
    fn energy(&self, phi: &[f64]) -> f64 {
        let n = phi.len();
        let mut grad = phi[0] * phi[0] + phi[n - 1] * phi[n - 1];
        for w in phi.windows(2) {
            grad += (w[1] - w[0]) * (w[1] - w[0]);
        }
        let local: f64 = phi
            .iter()
            .zip(&self.potential)
            .map(|(&p, &v)| {
                let p2 = p * p;
                v * p2 + 0.5 * self.lambda * p2 * p2
            })
            .sum();
        self.kinetic * grad / self.h + local * self.h
    }

    fn normalize(&self, phi: &mut [f64]) {
        let norm = (phi.iter().map(|p| p * p).sum::<f64>() * self.h).sqrt();
        phi.iter_mut().for_each(|p| *p /= norm);
    }

    /// Backward-Euler step `(1 + dtau H[phi]) phi_new = phi`, with the
    /// nonlinearity taken from the current state.
    fn implicit_step(&self, phi: &[f64], dtau: f64, out: &mut [f64], scratch: &mut [f64]) {
        let n = phi.len();
        let off = -dtau * self.kinetic / (self.h * self.h);
        let diag0 = 1.0 - 2.0 * off;
        // Thomas algorithm with constant off-diagonals
        let diag = |i: usize| diag0 + dtau * (self.potential[i] + self.lambda * phi[i] * phi[i]);
        let mut b = diag(0);
        scratch[0] = off / b;
        out[0] = phi[0] / b;
        for i in 1..n {
            b = diag(i) - off * scratch[i - 1];
            scratch[i] = off / b;
            out[i] = (phi[i] - off * out[i - 1]) / b;
        }
        for i in (0..n - 1).rev() {
            out[i] -= scratch[i] * out[i + 1];
        }
    }
}

/// Ground state of the discretized energy functional
/// `E/(ND) = \int (4/k^2)|phi'|^2 + V |phi|^2 + (lambda/2) |phi|^4 dx`
/// on `[x_min, x_max]` with hard walls, started from the `g' = 0` ansatz.
pub fn imaginary_time_ground_state(
    sys: DimensionlessSystem,
    convention: LambdaConvention,
    config: &PdeConfig,
) -> Result<PdeGroundState> {
    let k = sys.k();
    config.validate(k)?;
    let n = config.n_points;
    let h = (config.x_max - config.x_min) / (n - 1) as f64;
    let x_grid: Vec<f64> = (0..n).map(|i| config.x_min + i as f64 * h).collect();
    let interior = &x_grid[1..n - 1];
    let disc = Discretization {
        h,
        kinetic: 4.0 / (k * k),
        // V(bx) with bx = k x
        potential: interior.iter().map(|&x| morse_potential(k * x, k)).collect(),
        lambda: convention.lambda(sys),
    };

    let start = noninteracting_solution(k)?.params();
    let ln_norm = start.ln_norm_sq();
    let mut phi: Vec<f64> = interior
        .iter()
        .map(|&x| {
            let y = k * (-x).exp();
            (0.5 * (ln_norm + 2.0 * start.alpha * y.ln() - 2.0 * start.beta * y)).exp()
        })
        .collect();
    disc.normalize(&mut phi);

    let mut next = vec![0.0; phi.len()];
    let mut scratch = vec![0.0; phi.len()];
    let mut e = disc.energy(&phi);
    let mut energy_trace = vec![e];
    let mut dtau = config.dtau;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        disc.implicit_step(&phi, dtau, &mut next, &mut scratch);
        disc.normalize(&mut next);
        let e_next = disc.energy(&next);
        if e_next > e + 1e-13 * e.abs().max(1.0) && dtau > 1e-12 {
            dtau *= 0.5;
            continue;
        }
        residual = (e - e_next).abs();
        std::mem::swap(&mut phi, &mut next);
        e = e_next;
        energy_trace.push(e);
        if residual < config.tol {
            let mut density = Vec::with_capacity(n);
            density.push(0.0);
            density.extend(phi.iter().map(|p| p * p));
            density.push(0.0);
            return Ok(PdeGroundState {
                energy_over_nd: e,
                x_grid,
                density,
                iterations,
                residual,
                final_dtau: dtau,
                interaction_convention: convention,
                energy_trace,
            });
        }
    }
    Err(Error::Convergence {
        iterations,
        residual,
    })
}
