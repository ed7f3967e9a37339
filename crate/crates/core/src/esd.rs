//! Entanglement sudden death.
//!
//! For symmetric pure states (`z1 = z2 = z0`, `nu = 0`) in equal
//! zero-temperature baths the separation time is known in closed form. With
//! `eta = exp(2 r0)` and `zeta = exp(2 z0)`,
//!
//! ```text
//! exp(-2 gamma t_esd) = eta (1 + zeta^2 - 2 eta zeta) / (eta - zeta - eta^2 zeta + zeta^2 eta)
//! ```
//!
//! which has a solution in `(0, 1)` exactly when `1 <= eta <= cosh(2 z0)`,
//! i.e. `0 < r0 < log(cosh 2 z0) / 2`. Everything else goes through a numeric
//! scan of the Simon quantity.

use crate::channel::{ChannelParams, Evolution};
use crate::error::{Error, Result};
use crate::gaussian::{cm_from_params, simon_criterion, GaussianParams};
use crate::par::{self, Execution};
use crate::roots::bisect_predicate;

/// Absolute time tolerance of the numeric root.
pub const TIME_TOL: f64 = 1e-10;
/// Bisection budget of the numeric root.
pub const MAX_BISECTIONS: usize = 200;
/// Growth ratio of the scanning grid.
pub const GRID_RATIO: f64 = 1.25;
/// First scanning point, in units of `1 / mean(gamma)`.
pub const GRID_START: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsdKind {
    FiniteTime,
    Asymptotic,
    InitiallySeparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsdMethod {
    Analytic,
    NumericRoot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EsdOutcome {
    /// Separable from this time on.
    FiniteTime(f64),
    Asymptotic,
    InitiallySeparable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsdResult {
    pub outcome: EsdOutcome,
    pub method: EsdMethod,
    /// Last time examined by a numeric scan that found no separation.
    pub horizon: Option<f64>,
}

impl EsdResult {
    pub fn kind(&self) -> EsdKind {
        match self.outcome {
            EsdOutcome::FiniteTime(_) => EsdKind::FiniteTime,
            EsdOutcome::Asymptotic => EsdKind::Asymptotic,
            EsdOutcome::InitiallySeparable => EsdKind::InitiallySeparable,
        }
    }

    pub fn t_esd(&self) -> Option<f64> {
        match self.outcome {
            EsdOutcome::FiniteTime(t) => Some(t),
            _ => None,
        }
    }

    fn analytic(outcome: EsdOutcome) -> Self {
        EsdResult { outcome, method: EsdMethod::Analytic, horizon: None }
    }
}

/// Largest two-mode squeezing that still dies in finite time for a given
/// single-mode squeezing: `log(cosh 2 z0) / 2`.
pub fn esd_threshold_r0(z0: f64) -> f64 {
    0.5 * (2.0 * z0).cosh().ln()
}

/// Smallest single-mode squeezing that produces sudden death for a given
/// two-mode squeezing: `acosh(exp(2 r0)) / 2`.
pub fn esd_threshold_z(r0: f64) -> f64 {
    0.5 * (2.0 * r0).exp().acosh()
}

/// Whether a symmetric pure state in equal zero-temperature baths separates
/// in finite time.
pub fn esd_condition_symmetric(z0: f64, r0: f64) -> bool {
    r0 > 0.0 && r0 < esd_threshold_r0(z0)
}

/// The two closed forms for `exp(-2 gamma t_esd)` in the symmetric case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFactors {
    /// `(2 e^{r0} cosh 2z0 sinh r0 - 2 sinh^2 z0) / (e^{2 r0} (cosh 2r0 - sinh 2z0))`.
    /// Does not match the Simon root; kept as a diagnostic.
    pub hyperbolic: f64,
    /// `eta (1 + zeta^2 - 2 eta zeta) / (eta - zeta - eta^2 zeta + zeta^2 eta)`.
    pub exponential: f64,
}

impl DecayFactors {
    pub fn disagree(&self) -> bool {
        let in_unit = |r: f64| r > 0.0 && r < 1.0;
        in_unit(self.hyperbolic) != in_unit(self.exponential)
            || (self.hyperbolic - self.exponential).abs() > 1e-9 * self.exponential.abs().max(1.0)
    }
}

pub fn decay_factors(z0: f64, r0: f64) -> DecayFactors {
    let hyperbolic = (2.0 * r0.exp() * (2.0 * z0).cosh() * r0.sinh() - 2.0 * z0.sinh().powi(2))
        / ((2.0 * r0).exp() * ((2.0 * r0).cosh() - (2.0 * z0).sinh()));
    let (eta, zeta) = ((2.0 * r0).exp(), (2.0 * z0).exp());
    let exponential =
        eta * (1.0 + zeta * zeta - 2.0 * eta * zeta) / (eta - zeta - eta * eta * zeta + zeta * zeta * eta);
    DecayFactors { hyperbolic, exponential }
}

/// Closed-form sudden-death time of a symmetric pure state (`z1 = z2 = z0`)
/// in equal zero-temperature baths of rate `gamma`.
pub fn t_esd_analytic_symmetric(z0: f64, r0: f64, gamma: f64) -> Result<EsdResult> {
    if !(r0 > 0.0) || !r0.is_finite() || !z0.is_finite() {
        return Err(Error::InvalidParams(format!("need r0 > 0 and finite z0 (r0 = {r0}, z0 = {z0})")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!("need gamma > 0, got {gamma}")));
    }
    let (eta, zeta) = ((2.0 * r0).exp(), (2.0 * z0).exp());
    let upper = 0.5 * (zeta + 1.0 / zeta);
    if !(eta >= 1.0 && eta <= upper) {
        return Ok(EsdResult::analytic(EsdOutcome::Asymptotic));
    }
    let num = eta * (1.0 + zeta * zeta - 2.0 * eta * zeta);
    let den = eta - zeta - eta * eta * zeta + zeta * zeta * eta;
    let scale = eta * zeta * zeta.max(eta);
    if den.abs() <= 1e-14 * scale {
        return Err(Error::DomainError(format!("decay-factor denominator vanishes at z0 = {z0}, r0 = {r0}")));
    }
    let ratio = num / den;
    if ratio <= 0.0 {
        // on the window edge the separation time diverges
        return Ok(EsdResult::analytic(EsdOutcome::Asymptotic));
    }
    if ratio >= 1.0 {
        return Err(Error::DomainError(format!("decay factor {ratio} >= 1 at z0 = {z0}, r0 = {r0}")));
    }
    Ok(EsdResult::analytic(EsdOutcome::FiniteTime(-ratio.ln() / (2.0 * gamma))))
}

/// Geometric scanning grid: `start, start * ratio, ...`, capped at `t_max`
/// (which is always the last point).
pub fn geometric_grid(start: f64, ratio: f64, t_max: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut t = start;
    while t < t_max {
        grid.push(t);
        t *= ratio;
    }
    grid.push(t_max);
    grid
}

/// Locates the first entangled-to-separable transition of `S(t)` on
/// `[0, t_max]`.
pub fn t_esd_numeric(p0: &GaussianParams, ch: &ChannelParams, t_max: f64) -> Result<EsdResult> {
    p0.validate()?;
    ch.validate()?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidGrid(format!("t_max must be positive, got {t_max}")));
    }
    let evo = Evolution::new(p0, ch);
    let numeric = |outcome, horizon| EsdResult { outcome, method: EsdMethod::NumericRoot, horizon };
    if !evo.is_entangled_at(0.0) {
        return Ok(numeric(EsdOutcome::InitiallySeparable, None));
    }
    let start = (GRID_START / ch.mean_gamma()).min(0.5 * t_max);
    let mut prev = 0.0;
    for t in geometric_grid(start, GRID_RATIO, t_max) {
        if !evo.is_entangled_at(t) {
            let root = bisect_predicate(prev, t, TIME_TOL, MAX_BISECTIONS, |s| evo.is_entangled_at(s))?;
            return Ok(numeric(EsdOutcome::FiniteTime(root), None));
        }
        prev = t;
    }
    Ok(numeric(EsdOutcome::Asymptotic, Some(t_max)))
}

/// Two-mode squeezing above which a state with `z1 = z2 = 0` and the given
/// mixedness is entangled:
/// `acosh(((1+nu2)^2 + 2 nu1 (1+nu2)(1+4 nu2) + nu1^2 (1 + 8 nu2 (1+nu2))) / (1+nu1+nu2)^2) / 4`.
///
/// Evaluated as `acosh(1 + x)` with `x = 8 nu1 nu2 (1+nu1)(1+nu2) / (1+nu1+nu2)^2`
/// so that the threshold is exactly zero when either mode is pure.
pub fn initial_entanglement_threshold(nu1: f64, nu2: f64) -> Result<f64> {
    if !(nu1 >= 0.0 && nu2 >= 0.0) || !nu1.is_finite() || !nu2.is_finite() {
        return Err(Error::InvalidParams(format!("mixedness must be non-negative (nu1 = {nu1}, nu2 = {nu2})")));
    }
    let x = 8.0 * nu1 * nu2 * (1.0 + nu1) * (1.0 + nu2) / (1.0 + nu1 + nu2).powi(2);
    Ok(0.25 * (x + (x * (2.0 + x)).sqrt()).ln_1p())
}

/// Initial-state parameter varied along the rows of a [`SignGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridVariable {
    /// Both single-mode squeezings, `z1 = z2`.
    Z0,
    /// Two-mode squeezing.
    R0,
}

/// Sign of the Simon quantity over a `(parameter, t)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SignGrid {
    pub variable: GridVariable,
    pub values: Vec<f64>,
    pub t: Vec<f64>,
    /// `signs[i][j]` is the sign of `S` at `(values[i], t[j])`: `-1`
    /// entangled, `0` on the boundary, `+1` separable.
    pub signs: Vec<Vec<i8>>,
}

impl SignGrid {
    /// First time column at which row `i` is separable.
    pub fn first_separable(&self, i: usize) -> Option<f64> {
        self.signs[i].iter().position(|&s| s >= 0).map(|j| self.t[j])
    }
}

fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else if x > 0.0 {
        1
    } else {
        0
    }
}

fn check_axis(name: &str, axis: &[f64], increasing: bool) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} grid is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} grid has non-finite values")));
    }
    if increasing && axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("{name} grid is not strictly increasing")));
    }
    Ok(())
}

/// Sign of `S(t)` for symmetric states `z1 = z2 = z` over `z_grid x t_grid`.
pub fn esd_boundary_sweep(r0: f64, nu0: f64, ch: &ChannelParams, z_grid: &[f64], t_grid: &[f64]) -> Result<SignGrid> {
    esd_boundary_sweep_with(Execution::default(), r0, nu0, ch, z_grid, t_grid)
}

pub fn esd_boundary_sweep_with(
    exec: Execution,
    r0: f64,
    nu0: f64,
    ch: &ChannelParams,
    z_grid: &[f64],
    t_grid: &[f64],
) -> Result<SignGrid> {
    let base = GaussianParams { z1: 0.0, z2: 0.0, r: r0, nu1: nu0, nu2: nu0 };
    sign_grid_with(exec, &base, ch, GridVariable::Z0, z_grid, t_grid)
}

/// Sign of `S(t)` with one parameter of `base` replaced by each of `values`.
pub fn sign_grid_with(
    exec: Execution,
    base: &GaussianParams,
    ch: &ChannelParams,
    variable: GridVariable,
    values: &[f64],
    t_grid: &[f64],
) -> Result<SignGrid> {
    ch.validate()?;
    check_axis("parameter", values, false)?;
    check_axis("t", t_grid, true)?;
    if t_grid[0] < 0.0 {
        return Err(Error::InvalidGrid("t grid starts before 0".into()));
    }
    let signs = par::try_map(exec, values, |&v| -> Result<Vec<i8>> {
        let p = match variable {
            GridVariable::Z0 => GaussianParams { z1: v, z2: v, ..*base },
            GridVariable::R0 => GaussianParams { r: v, ..*base },
        };
        p.validate()?;
        let evo = Evolution::new(&p, ch);
        Ok(t_grid.iter().map(|&t| sign_of(evo.scaled_simon(t))).collect())
    })?;
    Ok(SignGrid { variable, values: values.to_vec(), t: t_grid.to_vec(), signs })
}

/// One cell of a mixedness sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixednessCell {
    pub nu1: f64,
    pub nu2: f64,
    /// Initial Simon quantity.
    pub simon: f64,
}

/// Initial Simon quantity over a `(nu1, nu2)` grid, other parameters from
/// `base`. Rows vary `nu1` slowest.
pub fn mixedness_sweep(base: &GaussianParams, nu1_grid: &[f64], nu2_grid: &[f64]) -> Result<Vec<MixednessCell>> {
    mixedness_sweep_with(Execution::default(), base, nu1_grid, nu2_grid)
}

pub fn mixedness_sweep_with(
    exec: Execution,
    base: &GaussianParams,
    nu1_grid: &[f64],
    nu2_grid: &[f64],
) -> Result<Vec<MixednessCell>> {
    check_axis("nu1", nu1_grid, false)?;
    check_axis("nu2", nu2_grid, false)?;
    let cells: Vec<(f64, f64)> = nu1_grid.iter().flat_map(|&a| nu2_grid.iter().map(move |&b| (a, b))).collect();
    par::try_map(exec, &cells, |&(nu1, nu2)| {
        let p = GaussianParams::new(base.z1, base.z2, base.r, nu1, nu2)?;
        Ok(MixednessCell { nu1, nu2, simon: simon_criterion(&cm_from_params(&p)) })
    })
}

/// Numeric sudden-death boundary in `z0` for symmetric pure states with
/// two-mode squeezing `r0`: the smallest `z0` in `[z_lo, z_hi]` for which
/// [`t_esd_numeric`] finds a finite separation time before `t_max`.
pub fn numeric_esd_boundary_z(r0: f64, ch: &ChannelParams, t_max: f64, z_lo: f64, z_hi: f64, tol: f64) -> Result<f64> {
    let dies = |z: f64| -> Result<bool> {
        let p = GaussianParams::symmetric(z, r0, 0.0);
        Ok(t_esd_numeric(&p, ch, t_max)?.kind() == EsdKind::FiniteTime)
    };
    if dies(z_lo)? || !dies(z_hi)? {
        return Err(Error::DomainError(format!(
            "[{z_lo}, {z_hi}] does not bracket the sudden-death boundary at r0 = {r0}"
        )));
    }
    // errors inside the predicate are impossible once both ends evaluated
    bisect_predicate(z_lo, z_hi, tol, MAX_BISECTIONS, |z| !dies(z).unwrap_or(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn condition_examples() {
        assert!(!esd_condition_symmetric(0.0, 1.0));
        assert!(esd_condition_symmetric(2.0, 1.0));
        assert_abs_diff_eq!(esd_threshold_r0(2.0), 0.5 * 4.0_f64.cosh().ln(), epsilon = 1e-15);
        assert!(esd_threshold_r0(2.0) > 1.65 && esd_threshold_r0(2.0) < 1.66);
        let z = esd_threshold_z(1.0);
        assert_abs_diff_eq!((2.0 * z).cosh(), 2.0_f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(esd_threshold_r0(z), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn analytic_time_for_strong_single_mode_squeezing() {
        let res = t_esd_analytic_symmetric(2.0, 1.0, 0.1).unwrap();
        let (eta, zeta) = (2.0_f64.exp(), 4.0_f64.exp());
        let ratio = eta * (1.0 + zeta * zeta - 2.0 * eta * zeta) / (eta - zeta - eta * eta * zeta + zeta * zeta * eta);
        assert!((ratio - 0.846).abs() < 1e-3);
        let t = res.t_esd().unwrap();
        assert_abs_diff_eq!(t, -ratio.ln() / 0.2, epsilon = 1e-14);
        assert!((t - 0.836).abs() < 1e-3);
        assert_eq!(res.method, EsdMethod::Analytic);
    }

    #[test]
    fn analytic_without_single_mode_squeezing_is_asymptotic() {
        let res = t_esd_analytic_symmetric(0.0, 1.0, 0.1).unwrap();
        assert_eq!(res.kind(), EsdKind::Asymptotic);
        assert_eq!(res.t_esd(), None);
        // outside the window the formula itself exceeds one
        let f = decay_factors(0.0, 1.0);
        let eta = 2.0_f64.exp();
        assert_abs_diff_eq!(f.exponential, 2.0 * eta / (eta - 1.0), epsilon = 1e-12);
        assert!(f.exponential > 1.0);
        assert!((f.hyperbolic - 0.2298).abs() < 1e-3);
        assert!(f.disagree());
    }

    #[test]
    fn analytic_time_diverges_at_the_window_edge() {
        let z0 = 1.2;
        let edge = esd_threshold_r0(z0);
        let mut last = 0.0;
        for delta in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
            let t = t_esd_analytic_symmetric(z0, edge - delta, 0.1).unwrap().t_esd().unwrap();
            assert!(t > last);
            last = t;
        }
        assert!(last > 60.0);
        assert_eq!(t_esd_analytic_symmetric(z0, edge + 1e-6, 0.1).unwrap().kind(), EsdKind::Asymptotic);
    }

    #[test]
    fn analytic_rejects_bad_inputs() {
        assert!(t_esd_analytic_symmetric(1.0, 0.0, 0.1).is_err());
        assert!(t_esd_analytic_symmetric(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn numeric_matches_analytic() {
        let ch = ChannelParams::symmetric(0.1, 0.0);
        let num = t_esd_numeric(&GaussianParams::symmetric(2.0, 1.0, 0.0), &ch, 100.0).unwrap();
        let ana = t_esd_analytic_symmetric(2.0, 1.0, 0.1).unwrap();
        let (tn, ta) = (num.t_esd().unwrap(), ana.t_esd().unwrap());
        assert!(((tn - ta) / ta).abs() < 1e-6, "{tn} vs {ta}");
        assert_eq!(num.method, EsdMethod::NumericRoot);
    }

    #[test]
    fn numeric_outcomes() {
        let warm = ChannelParams::symmetric(0.1, 0.2);
        let res = t_esd_numeric(&GaussianParams::tmsv(1.0), &warm, 50.0).unwrap();
        let t = res.t_esd().unwrap();
        assert!(t > 5.0 && t < 6.5, "{t}");

        let cold = ChannelParams::new(0.1, 0.5, 0.0, 0.0).unwrap();
        let res = t_esd_numeric(&GaussianParams::tmsv(1.0), &cold, 1000.0).unwrap();
        assert_eq!(res.kind(), EsdKind::Asymptotic);
        assert_eq!(res.horizon, Some(1000.0));

        let mixed = GaussianParams::new(0.0, 0.0, 0.3, 1.0, 1.0).unwrap();
        let res = t_esd_numeric(&mixed, &cold, 10.0).unwrap();
        assert_eq!(res.kind(), EsdKind::InitiallySeparable);

        assert!(matches!(t_esd_numeric(&mixed, &cold, 0.0), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn separation_time_scales_inversely_with_gamma() {
        let p = GaussianParams::symmetric(1.5, 0.6, 0.0);
        let t1 = t_esd_numeric(&p, &ChannelParams::symmetric(0.1, 0.0), 500.0).unwrap().t_esd().unwrap();
        let t2 = t_esd_numeric(&p, &ChannelParams::symmetric(0.2, 0.0), 500.0).unwrap().t_esd().unwrap();
        assert!((t1 - 2.0 * t2).abs() < 1e-9, "{t1} vs {t2}");
        let a1 = t_esd_analytic_symmetric(1.5, 0.6, 0.1).unwrap().t_esd().unwrap();
        let a2 = t_esd_analytic_symmetric(1.5, 0.6, 0.2).unwrap().t_esd().unwrap();
        assert!((a1 - 2.0 * a2).abs() < 1e-12);
    }

    #[test]
    fn separation_time_shrinks_with_single_mode_squeezing() {
        let r0 = 0.5;
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let z0 = 1.0 + 0.1 * k as f64;
            if !esd_condition_symmetric(z0, r0) {
                continue;
            }
            let t = t_esd_analytic_symmetric(z0, r0, 0.1).unwrap().t_esd().unwrap();
            assert!(t < last);
            last = t;
        }
        assert!(last.is_finite());
    }

    #[test]
    fn mixedness_threshold_values() {
        assert_eq!(initial_entanglement_threshold(0.0, 0.0).unwrap(), 0.0);
        let r = initial_entanglement_threshold(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(r, 0.25 * (41.0_f64 / 9.0).acosh(), epsilon = 1e-14);
        assert!((r - 0.5493).abs() < 1e-4);
        assert!(initial_entanglement_threshold(-1.0, 0.0).is_err());
        // one pure mode: any squeezing entangles
        assert_eq!(initial_entanglement_threshold(2.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn mixedness_threshold_separates_signs() {
        let r = initial_entanglement_threshold(1.0, 1.0).unwrap();
        let s = |r0: f64| simon_criterion(&cm_from_params(&GaussianParams::new(0.0, 0.0, r0, 1.0, 1.0).unwrap()));
        assert!(s(r + 1e-4) < 0.0);
        assert!(s(r - 1e-4) > 0.0);
    }

    #[test]
    fn mixedness_threshold_matches_expanded_ratio() {
        for (a, b) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.1), (0.0, 4.0)] {
            let num: f64 =
                (1.0 + b) * (1.0 + b) + 2.0 * a * (1.0 + b) * (1.0 + 4.0 * b) + a * a * (1.0 + 8.0 * b * (1.0 + b));
            let expected = 0.25 * (num / ((1.0 + a + b) * (1.0 + a + b))).acosh();
            assert_abs_diff_eq!(initial_entanglement_threshold(a, b).unwrap(), expected, epsilon = 1e-7);
        }
    }

    #[test]
    fn mixedness_threshold_is_monotone() {
        let grid: Vec<f64> = (0..=30).map(|k| 0.1 * k as f64).collect();
        for &a in &grid {
            let row: Vec<f64> = grid.iter().map(|&b| initial_entanglement_threshold(a, b).unwrap()).collect();
            assert!(row.windows(2).all(|w| w[1] >= w[0]));
            let col: Vec<f64> = grid.iter().map(|&b| initial_entanglement_threshold(b, a).unwrap()).collect();
            assert!(col.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn two_mode_squeezing_rows() {
        // above log(cosh 4) / 2 ~ 1.65 the z0 = 2 state only decays asymptotically
        let ch = ChannelParams::symmetric(0.1, 0.0);
        let base = GaussianParams::symmetric(2.0, 0.0, 0.0);
        let t: Vec<f64> = (0..=200).map(|k| 0.5 * k as f64).collect();
        let grid = sign_grid_with(Execution::Sequential, &base, &ch, GridVariable::R0, &[1.0, 1.8], &t).unwrap();
        assert!(grid.first_separable(0).is_some());
        assert_eq!(grid.first_separable(1), None);
        assert!(sign_grid_with(Execution::Sequential, &base, &ch, GridVariable::R0, &[f64::NAN], &t).is_err());
    }

    #[test]
    fn boundary_sweep_rows() {
        let ch = ChannelParams::symmetric(0.1, 0.0);
        let t: Vec<f64> = (0..=400).map(|k| 0.05 * k as f64).collect();
        let grid = esd_boundary_sweep(1.0, 0.0, &ch, &[0.0, 2.0], &t).unwrap();
        assert!(grid.signs[0].iter().all(|&s| s < 0));
        let first = grid.first_separable(1).unwrap();
        let predicted = t_esd_analytic_symmetric(2.0, 1.0, 0.1).unwrap().t_esd().unwrap();
        assert!(first >= predicted && first - predicted <= 0.05 + 1e-12);

        assert!(esd_boundary_sweep(1.0, 0.0, &ch, &[], &t).is_err());
        assert!(esd_boundary_sweep(1.0, 0.0, &ch, &[1.0], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn sequential_and_parallel_sweeps_agree() {
        let ch = ChannelParams::symmetric(0.1, 0.0);
        let z: Vec<f64> = (0..25).map(|k| 0.1 * k as f64).collect();
        let t: Vec<f64> = (0..50).map(|k| 0.5 * k as f64).collect();
        let a = esd_boundary_sweep_with(Execution::Sequential, 1.0, 0.0, &ch, &z, &t).unwrap();
        let b = esd_boundary_sweep_with(Execution::Parallel, 1.0, 0.0, &ch, &z, &t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn numeric_boundary_in_z() {
        let ch = ChannelParams::symmetric(0.1, 0.0);
        let z = numeric_esd_boundary_z(1.0, &ch, 1e4, 0.0, 2.5, 1e-8).unwrap();
        assert!((z - esd_threshold_z(1.0)).abs() < 1e-6, "{z}");
        assert!(numeric_esd_boundary_z(1.0, &ch, 1e4, 2.0, 2.5, 1e-8).is_err());
    }
}
