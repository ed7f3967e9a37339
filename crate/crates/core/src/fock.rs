//! Brute-force verifier in a truncated two-mode Fock basis.
//!
//! The density operator is a dense `N^2 x N^2` complex matrix in the
//! `|n1, n2>` basis (row index `n1 * N + n2`). States are built by applying
//! the squeezers to the thermal core, then evolved under the dissipator
//!
//! ```text
//! sum_i gamma_i (nb_i + 1) (2 a_i rho a_i^dag - a_i^dag a_i rho - rho a_i^dag a_i)
//!     + gamma_i nb_i (2 a_i^dag rho a_i - a_i a_i^dag rho - rho a_i a_i^dag)
//! ```
//!
//! with classical fixed-step RK4. No Hamiltonian term is included.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::{evolve, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, GaussianParams};
use crate::par::{self, Execution};

pub const MIN_CUTOFF: usize = 2;
pub const MAX_CUTOFF: usize = 32;
/// Largest population allowed in the two highest levels of either mode.
pub const TAIL_TOL: f64 = 1e-6;
/// Largest change of any moment when the step is halved.
pub const HALVING_TOL: f64 = 1e-6;
/// Extra levels per mode used while applying the squeezers.
const BUILD_PADDING: usize = 12;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;
const EIGEN_TOL: f64 = 1e-8;
const IMAG_WARN: f64 = 1e-8;
const IMAG_TOL: f64 = 1e-6;

/// Truncated two-mode density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    cutoff: usize,
    data: DMatrix<Complex64>,
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if !(MIN_CUTOFF..=MAX_CUTOFF).contains(&cutoff) {
        return Err(Error::InvalidParams(format!("cutoff must lie in [{MIN_CUTOFF}, {MAX_CUTOFF}], got {cutoff}")));
    }
    Ok(())
}

impl FockDensityMatrix {
    /// Wraps a matrix; it must be `cutoff^2` square.
    pub fn from_matrix(cutoff: usize, data: DMatrix<Complex64>) -> Result<Self> {
        check_cutoff(cutoff)?;
        let dim = cutoff * cutoff;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::InvalidParams(format!(
                "expected a {dim}x{dim} matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(FockDensityMatrix { cutoff, data })
    }

    /// `|n1, n2><n1, n2|`.
    pub fn number_state(cutoff: usize, n1: usize, n2: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        if n1 >= cutoff || n2 >= cutoff {
            return Err(Error::InvalidParams(format!("|{n1}, {n2}> outside cutoff {cutoff}")));
        }
        let dim = cutoff * cutoff;
        let mut data = DMatrix::zeros(dim, dim);
        let i = n1 * cutoff + n2;
        data[(i, i)] = Complex64::new(1.0, 0.0);
        Ok(FockDensityMatrix { cutoff, data })
    }

    pub fn vacuum(cutoff: usize) -> Result<Self> {
        FockDensityMatrix::number_state(cutoff, 0, 0)
    }

    /// Product of thermal states, renormalised after truncation.
    pub fn thermal(cutoff: usize, nb1: f64, nb2: f64) -> Result<Self> {
        check_cutoff(cutoff)?;
        let p1 = thermal_populations(nb1, cutoff);
        let p2 = thermal_populations(nb2, cutoff);
        let norm: f64 = p1.iter().sum::<f64>() * p2.iter().sum::<f64>();
        let dim = cutoff * cutoff;
        let mut data = DMatrix::zeros(dim, dim);
        for (a, x) in p1.iter().enumerate() {
            for (b, y) in p2.iter().enumerate() {
                let i = a * cutoff + b;
                data[(i, i)] = Complex64::new(x * y / norm, 0.0);
            }
        }
        Ok(FockDensityMatrix { cutoff, data })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff * self.cutoff
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diagonal().iter().sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..d {
            for i in 0..=j {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Population in levels `>= N - 2` of either mode.
    pub fn tail_population(&self) -> f64 {
        let n = self.cutoff;
        let edge = n.saturating_sub(2);
        let mut tail = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a >= edge || b >= edge {
                    tail += self.data[(a * n + b, a * n + b)].re;
                }
            }
        }
        tail
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.data.clone().symmetric_eigenvalues().min()
    }

    /// Smallest eigenvalue of the partial transpose on mode 2. Negative
    /// values certify entanglement.
    pub fn min_partial_transpose_eigenvalue(&self) -> f64 {
        let n = self.cutoff;
        let d = self.dim();
        let pt = DMatrix::from_fn(d, d, |i, j| {
            let (a, b) = (i / n, i % n);
            let (c, e) = (j / n, j % n);
            self.data[(a * n + e, c * n + b)]
        });
        pt.symmetric_eigenvalues().min()
    }

    fn check_cheap_invariants(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvariantViolated(format!("trace = {tr}")));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvariantViolated(format!("hermiticity error {herm:e}")));
        }
        let tail = self.tail_population();
        if tail > TAIL_TOL {
            return Err(Error::CutoffInsufficient { cutoff: self.cutoff, tail });
        }
        Ok(())
    }

    /// Trace, Hermiticity, tail population and positivity.
    pub fn check_invariants(&self) -> Result<()> {
        self.check_cheap_invariants()?;
        let min = self.min_eigenvalue();
        if min < -EIGEN_TOL {
            return Err(Error::InvariantViolated(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

fn thermal_populations(nu: f64, levels: usize) -> Vec<f64> {
    let q = nu / (nu + 1.0);
    let mut p = Vec::with_capacity(levels);
    let mut cur = 1.0 / (nu + 1.0);
    for _ in 0..levels {
        p.push(cur);
        cur *= q;
    }
    p
}

/// `exp(z/2 (a^dag^2 - a^2))` on `levels` Fock states.
fn single_mode_squeezer(z: f64, levels: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(levels, levels);
    for n in 0..levels.saturating_sub(2) {
        let c = ((n + 1) as f64 * (n + 2) as f64).sqrt();
        g[(n + 2, n)] = 0.5 * z * c;
        g[(n, n + 2)] = -0.5 * z * c;
    }
    g.exp()
}

/// Conjugates a block-diagonal-in-`n1 - n2` state by `exp(r (a1^dag a2^dag - a1 a2))`,
/// starting from the diagonal `sigma`. Returns a dense matrix on `levels^2` states.
fn two_mode_squeezed(r: f64, levels: usize, sigma: &[f64]) -> DMatrix<f64> {
    let dim = levels * levels;
    let mut out = DMatrix::zeros(dim, dim);
    let l = levels as isize;
    for k in -(l - 1)..l {
        // states |n2 + k, n2> inside the padded box
        let n2_start = (-k).max(0) as usize;
        let n2_end = (l - k.max(0)) as usize;
        let states: Vec<(usize, usize)> = (n2_start..n2_end).map(|n2| ((n2 as isize + k) as usize, n2)).collect();
        let len = states.len();
        let mut g = DMatrix::zeros(len, len);
        for s in 0..len.saturating_sub(1) {
            let (n1, n2) = states[s];
            let c = r * (((n1 + 1) * (n2 + 1)) as f64).sqrt();
            g[(s + 1, s)] = c;
            g[(s, s + 1)] = -c;
        }
        let u = g.exp();
        let weights: Vec<f64> = states.iter().map(|&(a, b)| sigma[a * levels + b]).collect();
        for (x, &(a1, b1)) in states.iter().enumerate() {
            for (y, &(a2, b2)) in states.iter().enumerate() {
                let v: f64 = (0..len).map(|s| u[(x, s)] * weights[s] * u[(y, s)]).sum();
                out[(a1 * levels + b1, a2 * levels + b2)] = v;
            }
        }
    }
    out
}

/// `(A (x) B) X` for `X` on `levels^2` states.
fn apply_local_left(a: &DMatrix<f64>, b: &DMatrix<f64>, x: &DMatrix<f64>, levels: usize) -> DMatrix<f64> {
    let dim = levels * levels;
    let mut out = DMatrix::zeros(dim, dim);
    let bt = b.transpose();
    for col in 0..dim {
        let v = DMatrix::from_fn(levels, levels, |n1, n2| x[(n1 * levels + n2, col)]);
        let w = a * v * &bt;
        for n1 in 0..levels {
            for n2 in 0..levels {
                out[(n1 * levels + n2, col)] = w[(n1, n2)];
            }
        }
    }
    out
}

/// Builds `S1(z1, z2) S2(r) sigma(nu1, nu2) S2^dag S1^dag` truncated to
/// `cutoff` levels per mode.
pub fn build_initial_state(p: &GaussianParams, cutoff: usize) -> Result<FockDensityMatrix> {
    p.validate()?;
    check_cutoff(cutoff)?;
    let levels = cutoff + BUILD_PADDING;
    let p1 = thermal_populations(p.nu1, levels);
    let p2 = thermal_populations(p.nu2, levels);
    let sigma: Vec<f64> = p1.iter().flat_map(|x| p2.iter().map(move |y| x * y)).collect();

    let after_two_mode = two_mode_squeezed(p.r, levels, &sigma);
    let s1 = single_mode_squeezer(p.z1, levels);
    let s2 = single_mode_squeezer(p.z2, levels);
    let half = apply_local_left(&s1, &s2, &after_two_mode, levels);
    let full = apply_local_left(&s1, &s2, &half.transpose(), levels);

    let dim = cutoff * cutoff;
    let keep = |i: usize| (i / cutoff) * levels + (i % cutoff);
    let mut data = DMatrix::from_fn(dim, dim, |i, j| {
        let (a, b) = (keep(i), keep(j));
        Complex64::new(0.5 * (full[(a, b)] + full[(b, a)]), 0.0)
    });
    let kept: f64 = data.diagonal().iter().map(|c| c.re).sum();
    let lost = 1.0 - kept;
    if lost > TAIL_TOL {
        return Err(Error::CutoffInsufficient { cutoff, tail: lost });
    }
    data /= Complex64::new(kept, 0.0);
    let rho = FockDensityMatrix { cutoff, data };
    rho.check_invariants()?;
    Ok(rho)
}

/// Per-mode coefficients of the dissipator.
struct Rates {
    cutoff: usize,
    /// diagonal decay of `rho[(n1,n2),(k1,k2)]`, indexed `[mode][n][k]`
    diag: [Vec<f64>; 2],
    /// `2 gamma (nb + 1) sqrt((n+1)(k+1))`
    down: [Vec<f64>; 2],
    /// `2 gamma nb sqrt(n k)`
    up: [Vec<f64>; 2],
}

impl Rates {
    fn new(ch: &ChannelParams, cutoff: usize) -> Self {
        let n = cutoff;
        let build = |gamma: f64, nb: f64| {
            let number = |k: usize| k as f64;
            // a a^dag in the truncated space: k + 1 below the top level, 0 on it
            let anti = |k: usize| if k + 1 < n { (k + 1) as f64 } else { 0.0 };
            let mut diag = vec![0.0; n * n];
            let mut down = vec![0.0; n * n];
            let mut up = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    diag[a * n + b] = gamma * (nb + 1.0) * (number(a) + number(b)) + gamma * nb * (anti(a) + anti(b));
                    down[a * n + b] = 2.0 * gamma * (nb + 1.0) * (((a + 1) * (b + 1)) as f64).sqrt();
                    up[a * n + b] = 2.0 * gamma * nb * ((a * b) as f64).sqrt();
                }
            }
            (diag, down, up)
        };
        let (d1, dn1, u1) = build(ch.gamma1, ch.nb1);
        let (d2, dn2, u2) = build(ch.gamma2, ch.nb2);
        Rates { cutoff, diag: [d1, d2], down: [dn1, dn2], up: [u1, u2] }
    }

    /// `out = L(rho)` on column-major storage.
    fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.cutoff;
        let dim = n * n;
        for j in 0..dim {
            let (k1, k2) = (j / n, j % n);
            let col = j * dim;
            for i in 0..dim {
                let (n1, n2) = (i / n, i % n);
                let d = self.diag[0][n1 * n + k1] + self.diag[1][n2 * n + k2];
                let mut v = rho[col + i] * (-d);
                // mode 1 shifts the row and column index by n, mode 2 by 1
                if n1 + 1 < n && k1 + 1 < n {
                    v += rho[col + n * dim + i + n] * self.down[0][n1 * n + k1];
                }
                if n2 + 1 < n && k2 + 1 < n {
                    v += rho[col + dim + i + 1] * self.down[1][n2 * n + k2];
                }
                if n1 > 0 && k1 > 0 {
                    v += rho[col - n * dim + i - n] * self.up[0][n1 * n + k1];
                }
                if n2 > 0 && k2 > 0 {
                    v += rho[col - dim + i - 1] * self.up[1][n2 * n + k2];
                }
                out[col + i] = v;
            }
        }
    }
}

/// Time derivative of `rho` under the two thermal dissipators.
pub fn lindblad_rhs(rho: &FockDensityMatrix, ch: &ChannelParams) -> DMatrix<Complex64> {
    let rates = Rates::new(ch, rho.cutoff);
    let dim = rho.dim();
    let mut out = DMatrix::zeros(dim, dim);
    rates.apply(rho.data.as_slice(), out.as_mut_slice());
    out
}

fn rk4_run(rho0: &FockDensityMatrix, rates: &Rates, h: f64, steps: usize) -> Result<FockDensityMatrix> {
    let mut rho = rho0.clone();
    let len = rho.data.len();
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
    let mut tmp = vec![zero; len];
    for _ in 0..steps {
        let y = rho.data.as_mut_slice();
        rates.apply(y, &mut k1);
        for i in 0..len {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        rates.apply(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        rates.apply(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = y[i] + k3[i] * h;
        }
        rates.apply(&tmp, &mut k4);
        for i in 0..len {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        rho.check_cheap_invariants()?;
    }
    Ok(rho)
}

/// Integrates the master equation for a time `t` with steps of at most `dt`.
///
/// The run is repeated with half the step; if any moment moves by more than
/// [`HALVING_TOL`] the step is rejected. The finer result is returned.
pub fn integrate(rho0: &FockDensityMatrix, ch: &ChannelParams, t: f64, dt: f64) -> Result<FockDensityMatrix> {
    ch.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParams(format!("integration time must be >= 0, got {t}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParams(format!("step must be positive, got {dt}")));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let rates = Rates::new(ch, rho0.cutoff);
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let coarse = rk4_run(rho0, &rates, h, steps);
    let fine = rk4_run(rho0, &rates, 0.5 * h, 2 * steps)?;
    // a coarse run that breaks an invariant the fine run keeps is a step problem
    let change = match coarse {
        Ok(coarse) => moments(&coarse)?.max_abs_diff(&moments(&fine)?),
        Err(_) => f64::INFINITY,
    };
    if !(change < HALVING_TOL) {
        return Err(Error::StepTooLarge { dt: h, change });
    }
    fine.check_invariants()?;
    Ok(fine)
}

/// The six second moments of `rho`, computed against the truncated ladder
/// operators.
pub fn moments(rho: &FockDensityMatrix) -> Result<CovarianceMatrix> {
    let n = rho.cutoff;
    let r = |a1: usize, a2: usize, b1: usize, b2: usize| rho.data[(a1 * n + a2, b1 * n + b2)];
    let zero = Complex64::new(0.0, 0.0);
    let (mut n1, mut n2, mut a1a1, mut a2a2, mut a1a2, mut a1a2d) = (zero, zero, zero, zero, zero, zero);
    for x in 0..n {
        for y in 0..n {
            n1 += r(x, y, x, y) * x as f64;
            n2 += r(x, y, x, y) * y as f64;
            if x + 2 < n {
                a1a1 += r(x + 2, y, x, y) * (((x + 1) * (x + 2)) as f64).sqrt();
            }
            if y + 2 < n {
                a2a2 += r(x, y + 2, x, y) * (((y + 1) * (y + 2)) as f64).sqrt();
            }
            if x + 1 < n && y + 1 < n {
                a1a2 += r(x + 1, y + 1, x, y) * (((x + 1) * (y + 1)) as f64).sqrt();
            }
            if x + 1 < n && y > 0 {
                a1a2d += r(x + 1, y - 1, x, y) * (((x + 1) * y) as f64).sqrt();
            }
        }
    }
    let values = [n1, n2, -a1a1, -a2a2, -a1a2d, a1a2];
    let imag = values.iter().fold(0.0_f64, |acc, v| acc.max(v.im.abs()));
    if imag > IMAG_TOL {
        return Err(Error::NonNegligibleImaginaryPart(imag));
    }
    if imag > IMAG_WARN {
        log::warn!("discarding imaginary parts up to {imag:e} in Fock moments");
    }
    Ok(CovarianceMatrix::from_array(values.map(|v| v.re)))
}

/// Parameter box on which the oracle is claimed accurate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedDomain {
    pub max_r: f64,
    pub max_abs_z: f64,
    pub max_nu: f64,
    pub max_nb: f64,
    pub max_gamma_t: f64,
    pub min_cutoff: usize,
}

pub const CERTIFIED: CertifiedDomain =
    CertifiedDomain { max_r: 0.6, max_abs_z: 0.4, max_nu: 0.3, max_nb: 0.5, max_gamma_t: 2.0, min_cutoff: 20 };

impl CertifiedDomain {
    /// Human-readable list of the bounds a run exceeds; empty if inside.
    pub fn violations(&self, p: &GaussianParams, ch: &ChannelParams, t_end: f64, cutoff: usize) -> Vec<String> {
        let eps = 1e-12;
        let mut out = Vec::new();
        if p.r.abs() > self.max_r + eps {
            out.push(format!("|r| = {} > {}", p.r.abs(), self.max_r));
        }
        for (name, z) in [("z1", p.z1), ("z2", p.z2)] {
            if z.abs() > self.max_abs_z + eps {
                out.push(format!("|{name}| = {} > {}", z.abs(), self.max_abs_z));
            }
        }
        for (name, nu) in [("nu1", p.nu1), ("nu2", p.nu2)] {
            if nu > self.max_nu + eps {
                out.push(format!("{name} = {nu} > {}", self.max_nu));
            }
        }
        for (name, nb) in [("nb1", ch.nb1), ("nb2", ch.nb2)] {
            if nb > self.max_nb + eps {
                out.push(format!("{name} = {nb} > {}", self.max_nb));
            }
        }
        let gt = ch.gamma1.max(ch.gamma2) * t_end;
        if gt > self.max_gamma_t + eps {
            out.push(format!("gamma t = {gt} > {}", self.max_gamma_t));
        }
        if cutoff < self.min_cutoff {
            out.push(format!("cutoff {cutoff} < {}", self.min_cutoff));
        }
        out
    }
}

/// Oracle and closed-form moments at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub time: f64,
    pub oracle: CovarianceMatrix,
    pub closed_form: CovarianceMatrix,
}

impl Checkpoint {
    /// `|oracle - closed form|` per moment, in `(n1, n2, m1, m2, ms, mc)` order.
    pub fn deviation(&self) -> [f64; 6] {
        let a = self.oracle.as_array();
        let b = self.closed_form.as_array();
        std::array::from_fn(|k| (a[k] - b[k]).abs())
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviation().iter().fold(0.0, |acc, &d| acc.max(d))
    }
}

/// Integrates the Fock state of `p` through ascending `times` and compares
/// against the closed-form evolution at each.
pub fn compare_with_closed_form(
    p: &GaussianParams,
    ch: &ChannelParams,
    times: &[f64],
    cutoff: usize,
    dt: f64,
) -> Result<Vec<Checkpoint>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidGrid("checkpoints must be non-negative and ascending".into()));
    }
    let mut rho = build_initial_state(p, cutoff)?;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        rho = integrate(&rho, ch, t - now, dt)?;
        now = t;
        out.push(Checkpoint { time: t, oracle: moments(&rho)?, closed_form: evolve(p, ch, t) });
    }
    Ok(out)
}

/// One case of the certified-domain suite.
#[derive(Debug)]
pub struct SuiteCase {
    pub params: GaussianParams,
    pub channel: ChannelParams,
    pub outcome: Result<Vec<Checkpoint>>,
}

impl SuiteCase {
    /// Largest deviation over all checkpoints, `None` if the run failed.
    pub fn max_deviation(&self) -> Option<f64> {
        let points = self.outcome.as_ref().ok()?;
        Some(points.iter().fold(0.0, |acc, c| acc.max(c.max_deviation())))
    }
}

/// The 3 x 3 x 3 grid `r0 in {0.2, 0.4, 0.6}`, `z1 = z2 in {0, 0.2, 0.4}`,
/// `nb1 = nb2 in {0, 0.25, 0.5}` with `gamma = 1` and pure thermal cores.
pub fn certified_grid() -> Vec<(GaussianParams, ChannelParams)> {
    let mut cases = Vec::with_capacity(27);
    for r in [0.2, 0.4, 0.6] {
        for z in [0.0, 0.2, 0.4] {
            for nb in [0.0, 0.25, 0.5] {
                cases.push((GaussianParams::symmetric(z, r, 0.0), ChannelParams::symmetric(1.0, nb)));
            }
        }
    }
    cases
}

/// Runs [`compare_with_closed_form`] on every case, one independent
/// integration per case. A failing case does not stop the others.
pub fn run_suite(
    exec: Execution,
    cases: &[(GaussianParams, ChannelParams)],
    times: &[f64],
    cutoff: usize,
    dt: f64,
) -> Vec<SuiteCase> {
    par::map(exec, cases, |(p, ch)| SuiteCase {
        params: *p,
        channel: *ch,
        outcome: compare_with_closed_form(p, ch, times, cutoff, dt),
    })
}
