//! Dimensionless problem definition.
//!
//! Everything is measured in units of the well depth D (energies, per
//! particle) and of the Morse range 1/a (positions), so a problem instance is
//! fully described by the well parameter `k` and the coupling `g'`. The trial
//! state is `psi(y) ~ y^alpha exp(-beta y)` in the variable `y = k exp(-a x)`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{digamma, ln_gamma, PositiveReal};

/// Smallest well parameter for which the ansatz describes a bound state.
pub const MIN_K: f64 = 2.0;

/// Problem instance `(k, g')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessSystem {
    k: f64,
    gprime: f64,
}

impl DimensionlessSystem {
    pub fn new(k: f64, gprime: f64) -> Result<Self> {
        check_k(k)?;
        if !(gprime.is_finite() && gprime >= 0.0) {
            return Err(Error::Validity(format!(
                "coupling g' must be finite and >= 0 (repulsive), got {gprime}"
            )));
        }
        Ok(Self { k, gprime })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn gprime(&self) -> f64 {
        self.gprime
    }

    pub fn with_gprime(&self, gprime: f64) -> Result<Self> {
        Self::new(self.k, gprime)
    }

    /// Coefficient multiplying `C(alpha)` in the interaction energy.
    pub fn interaction_coefficient(&self) -> f64 {
        self.k * self.gprime / (2.0 * SQRT_2)
    }
}

/// Rejects well parameters below [`MIN_K`].
pub fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k >= MIN_K {
        Ok(())
    } else {
        Err(Error::Validity(format!(
            "well parameter k = {k} is outside the validity bound k >= {MIN_K}"
        )))
    }
}

/// Variational pair `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub alpha: f64,
    pub beta: f64,
}

impl AnsatzParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!(
                "ansatz parameters must be positive, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// The point on the `beta`-stationarity line `alpha + 1/2 = beta k`.
    pub fn on_constraint(alpha: f64, k: f64) -> Result<Self> {
        Self::new(alpha, constrained_beta(alpha, k))
    }

    /// Log of the squared normalization in `y`: `(2 beta)^{2 alpha} / Gamma(2 alpha)`.
    pub fn ln_norm_sq(&self) -> f64 {
        2.0 * self.alpha * (2.0 * self.beta).ln() - lgam(2.0 * self.alpha)
    }
}

/// `beta = (alpha + 1/2) / k`.
pub fn constrained_beta(alpha: f64, k: f64) -> f64 {
    (alpha + 0.5) / k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub oscillator_part: f64,
    pub interaction_part: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub y_values: Vec<f64>,
    pub d_values: Vec<f64>,
}

impl DensityProfile {
    /// Trapezoid estimate of the norm `\int d(y) dy / y`.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.y_values, |i| self.d_values[i] / self.y_values[i])
    }

    /// Interquartile range in `y` of the mass `d(y) dy / y`.
    pub fn interquartile_range(&self) -> f64 {
        let n = self.y_values.len();
        let mut cumulative = vec![0.0; n];
        for i in 1..n {
            let dy = self.y_values[i] - self.y_values[i - 1];
            let a = self.d_values[i - 1] / self.y_values[i - 1];
            let b = self.d_values[i] / self.y_values[i];
            cumulative[i] = cumulative[i - 1] + 0.5 * dy * (a + b);
        }
        let total = cumulative[n - 1];
        let quantile = |q: f64| -> f64 {
            let target = q * total;
            let i = cumulative.partition_point(|&c| c < target).clamp(1, n - 1);
            let (c0, c1) = (cumulative[i - 1], cumulative[i]);
            let t = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
            self.y_values[i - 1] + t * (self.y_values[i] - self.y_values[i - 1])
        };
        quantile(0.75) - quantile(0.25)
    }
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len())
        .map(|i| 0.5 * (x[i] - x[i - 1]) * (f(i - 1) + f(i)))
        .sum()
}

fn lgam(x: f64) -> f64 {
    ln_gamma(PositiveReal::new(x).expect("gamma argument must be positive"))
}

fn psi(x: f64) -> f64 {
    digamma(PositiveReal::new(x).expect("digamma argument must be positive"))
}

/// Morse potential `exp(-2u/k) - 2 exp(-u/k)` at `u = b x`, in units of D.
pub fn morse_potential(u: f64, k: f64) -> f64 {
    let e = (-u / k).exp();
    e * e - 2.0 * e
}

/// Quartic self-overlap `Gamma(4a) / (2^{4a} Gamma(2a)^2)`, evaluated in log space.
pub fn c_of_alpha(alpha: PositiveReal) -> f64 {
    let a = alpha.get();
    (lgam(4.0 * a) - 4.0 * a * LN_2 - 2.0 * lgam(2.0 * a)).exp()
}

/// `C(alpha)` through the duplication form `Gamma(2a + 1/2) / (2 sqrt(pi) Gamma(2a))`.
pub fn c_of_alpha_duplication(alpha: PositiveReal) -> f64 {
    let a = alpha.get();
    (lgam(2.0 * a + 0.5) - lgam(2.0 * a) - (2.0 * PI.sqrt()).ln()).exp()
}

pub fn try_c_of_alpha(alpha: f64) -> Result<f64> {
    PositiveReal::new(alpha).map(c_of_alpha)
}

/// `f1(alpha) = 1 - k^2 / (2 alpha + 1)^2`.
pub fn f1(alpha: f64, k: f64) -> f64 {
    let s = 2.0 * alpha + 1.0;
    1.0 - k * k / (s * s)
}

/// `f2(alpha) = (k / sqrt 2) C(alpha) [2 psi(2a) + 4 ln 2 - psi(4a)]`, the
/// interaction side of the printed stationarity condition `f1 = g' f2`.
pub fn f2_paper(alpha: f64, k: f64) -> f64 {
    let c = c_of_alpha(PositiveReal::new(alpha).expect("alpha must be positive"));
    let bracket = 2.0 * psi(2.0 * alpha) + 4.0 * LN_2 - psi(4.0 * alpha);
    k / SQRT_2 * c * bracket
}

/// `dC/dalpha = 4 C(alpha) [psi(4a) - psi(2a) - ln 2]`.
pub fn c_of_alpha_derivative(alpha: f64) -> f64 {
    let c = c_of_alpha(PositiveReal::new(alpha).expect("alpha must be positive"));
    4.0 * c * (psi(4.0 * alpha) - psi(2.0 * alpha) - LN_2)
}

/// Energy per particle in units of D.
pub fn energy(params: AnsatzParams, sys: DimensionlessSystem) -> EnergyBreakdown {
    let AnsatzParams { alpha, beta } = params;
    let k = sys.k();
    let b2 = beta * beta;
    let bracket = alpha / 2.0 + alpha * alpha / (4.0 * b2) + alpha / (8.0 * b2)
        - alpha * k / (2.0 * beta);
    let oscillator_part = 4.0 / (k * k) * bracket;
    let interaction_part = interaction_energy(alpha, sys);
    EnergyBreakdown {
        oscillator_part,
        interaction_part,
        total: oscillator_part + interaction_part,
    }
}

fn interaction_energy(alpha: f64, sys: DimensionlessSystem) -> f64 {
    if sys.gprime() == 0.0 {
        return 0.0;
    }
    let c = c_of_alpha(PositiveReal::new(alpha).expect("alpha must be positive"));
    c * sys.interaction_coefficient()
}

/// Energy restricted to `beta = (alpha + 1/2)/k`:
/// `(2a/k^2)(1 - k^2/(2a + 1)) + C(a) k g' / (2 sqrt 2)`.
pub fn energy_on_constraint(alpha: f64, sys: DimensionlessSystem) -> f64 {
    let k = sys.k();
    2.0 * alpha / (k * k) * (1.0 - k * k / (2.0 * alpha + 1.0)) + interaction_energy(alpha, sys)
}

/// Exact `d/dalpha` of [`energy_on_constraint`]: `(2/k^2) f1 + coef * C'(alpha)`.
pub fn energy_on_constraint_derivative(alpha: f64, sys: DimensionlessSystem) -> f64 {
    let k = sys.k();
    let mut d = 2.0 / (k * k) * f1(alpha, k);
    if sys.gprime() != 0.0 {
        d += sys.interaction_coefficient() * c_of_alpha_derivative(alpha);
    }
    d
}

/// Density `d(y) = (2b)^{2a} y^{2a} e^{-2by} / Gamma(2a)`, normalized under `dy/y`.
pub fn density(params: AnsatzParams, y_grid: &[f64]) -> Result<DensityProfile> {
    if y_grid.is_empty() {
        return Err(Error::Argument("density grid is empty".into()));
    }
    if y_grid.iter().any(|&y| !(y.is_finite() && y > 0.0)) {
        return Err(Error::Argument("density grid must be strictly positive".into()));
    }
    if y_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("density grid must be increasing".into()));
    }
    let ln_norm = params.ln_norm_sq();
    let two_a = 2.0 * params.alpha;
    let two_b = 2.0 * params.beta;
    let d_values = y_grid
        .iter()
        .map(|&y| (ln_norm + two_a * y.ln() - two_b * y).exp())
        .collect();
    Ok(DensityProfile {
        y_values: y_grid.to_vec(),
        d_values,
    })
}

/// Mode of `d(y)`, at `y = alpha / beta`.
pub fn peak_location(params: AnsatzParams) -> f64 {
    params.alpha / params.beta
}

/// Uniform grid `start, start + step, ...` up to and including `stop`
/// (within a half step).
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start
    {
        return Err(Error::Argument(format!(
            "invalid range {start}:{stop}:{step}"
        )));
    }
    let n = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(k: f64, g: f64) -> DimensionlessSystem {
        DimensionlessSystem::new(k, g).unwrap()
    }

    fn pr(x: f64) -> PositiveReal {
        PositiveReal::new(x).unwrap()
    }

    #[test]
    fn morse_landmarks() {
        for k in [2.0, 3.0, 7.5] {
            assert_eq!(morse_potential(0.0, k), -1.0);
        }
        let far = morse_potential(1e3, 3.0);
        assert!(far < 0.0 && far > -1e-100);
        assert!(morse_potential(-3.0 * LN_2, 3.0).abs() < 1e-14);
    }

    #[test]
    fn c_of_alpha_small_cases() {
        assert!((c_of_alpha(pr(1.0)) - 0.375).abs() < 1e-14);
        assert!((c_of_alpha(pr(2.0)) - 0.546_875).abs() < 1e-14);
        assert!((c_of_alpha(pr(0.5)) - 0.25).abs() < 1e-14);
        assert!(try_c_of_alpha(0.0).is_err());
        assert!(try_c_of_alpha(-2.0).is_err());
        // direct Gamma(4a) would overflow here
        assert!(c_of_alpha(pr(200.0)).is_finite());
    }

    #[test]
    fn f1_values() {
        for k in [2.0, 3.0, 4.5, 11.0] {
            assert_eq!(f1((k - 1.0) / 2.0, k), 0.0);
        }
        assert!((f1(2.0, 3.0) - 0.64).abs() < 1e-15);
        let big = f1(1e6, 3.0);
        assert!(big < 1.0 && big > 1.0 - 1e-11);
    }

    #[test]
    fn f2_values() {
        // high-precision reference values
        assert!((f2_paper(2.0, 3.0) - 3.792_569_110_421_65).abs() < 1e-11);
        assert!((f2_paper(1.0, 2.0) - 1.252_660_729_706_91).abs() < 1e-11);
        // small alpha: negative, approaching -3k/(4 sqrt 2)
        let small = f2_paper(1e-3, 3.0);
        assert!(small < 0.0);
        assert!((small - -1.581_951_368_552_14).abs() < 1e-10);
        let limit = -3.0 * 3.0 / (4.0 * SQRT_2);
        assert!((f2_paper(1e-7, 3.0) - limit).abs() < 1e-5);
    }

    #[test]
    fn energy_examples() {
        let e = energy(AnsatzParams::new(1.0, 0.5).unwrap(), sys(3.0, 0.0));
        assert!((e.total + 4.0 / 9.0).abs() < 1e-15);
        assert_eq!(e.interaction_part, 0.0);

        let e = energy(AnsatzParams::new(2.0, 5.0 / 6.0).unwrap(), sys(3.0, 0.1688));
        assert!((e.total - -0.257_643_363_448_131).abs() < 1e-12);
        assert_eq!(e.total, e.oscillator_part + e.interaction_part);

        let e = energy(AnsatzParams::new(1.2, 17.0 / 30.0).unwrap(), sys(3.0, 0.1));
        assert!((e.total - -0.395_199_392_953_114).abs() < 1e-12);
    }

    #[test]
    fn constrained_energy_examples() {
        assert!((energy_on_constraint(1.0, sys(3.0, 0.0)) + 4.0 / 9.0).abs() < 1e-15);
        assert!((energy_on_constraint(6.2, sys(3.0, 0.0)) - 0.452_404_643_449_42).abs() < 1e-12);
    }

    #[test]
    fn constrained_derivative_matches_central_difference() {
        let h = 1e-5;
        for (a, k, g) in [(0.3, 2.0, 0.4), (1.2, 3.0, 0.1), (6.0, 5.0, 0.05), (17.0, 9.0, 1.3)] {
            let s = sys(k, g);
            let fd = (energy_on_constraint(a + h, s) - energy_on_constraint(a - h, s)) / (2.0 * h);
            let exact = energy_on_constraint_derivative(a, s);
            assert!((fd - exact).abs() < 1e-8, "{a} {k} {g}: {fd} vs {exact}");
        }
    }

    #[test]
    fn density_landmarks() {
        let p3 = AnsatzParams::new(1.0, 0.5).unwrap();
        let p5 = AnsatzParams::new(2.0, 0.5).unwrap();
        assert_eq!(peak_location(p3), 2.0);
        assert_eq!(peak_location(p5), 4.0);
        assert_eq!(peak_location(AnsatzParams::new(3.0, 3.0).unwrap()), 1.0);

        let grid = uniform_grid(1e-4, 60.0, 1e-3).unwrap();
        let prof = density(AnsatzParams::new(1.2, 0.56).unwrap(), &grid).unwrap();
        assert!((prof.norm() - 1.0).abs() < 1e-6);

        let prof = density(p3, &grid).unwrap();
        let (imax, _) = prof
            .d_values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((prof.y_values[imax] - 2.0).abs() < 2e-3);
    }

    #[test]
    fn density_rejects_bad_grids() {
        let p = AnsatzParams::new(1.0, 0.5).unwrap();
        assert!(matches!(density(p, &[]), Err(Error::Argument(_))));
        assert!(density(p, &[0.0, 1.0]).is_err());
        assert!(density(p, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn system_validation() {
        assert!(matches!(DimensionlessSystem::new(1.5, 0.1), Err(Error::Validity(_))));
        assert!(DimensionlessSystem::new(1.0, 0.0).is_err());
        assert!(DimensionlessSystem::new(3.0, -0.1).is_err());
        assert!(DimensionlessSystem::new(2.0, 0.0).is_ok());
        assert!(AnsatzParams::new(0.0, 1.0).is_err());
        assert!(AnsatzParams::new(1.0, -1.0).is_err());
    }
}
