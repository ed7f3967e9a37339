//! Zero-mean two-mode Gaussian states.
//!
//! A state is described either by its five generating parameters
//! ([`GaussianParams`]: single-mode squeezings `z1`, `z2`, two-mode squeezing
//! `r`, thermal occupations `nu1`, `nu2`) or by its six independent second
//! moments ([`CovarianceMatrix`]). The state is
//!
//! ```text
//! rho = S1(z1, z2) S2(r) sigma(nu1, nu2) S2(r)^dag S1(z1, z2)^dag
//! ```
//!
//! and the 4x4 covariance matrix is kept in the `(a1, a1^dag, a2, a2^dag)`
//! ordering:
//!
//! ```text
//! | n1+1/2  m1      ms      mc     |
//! | m1      n1+1/2  mc      ms     |
//! | ms      mc      n2+1/2  m2     |
//! | mc      ms      m2      n2+1/2 |
//! ```
//!
//! with `n_i = <a_i^dag a_i>`, `m_i = -<a_i^2>`, `ms = -<a1 a2^dag>` and
//! `mc = <a1 a2>`. Only real squeezing is supported, so every entry is real.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance for clamping `atanh`/`acosh` arguments that land just outside
/// their domain through rounding.
pub const CLAMP_TOL: f64 = 1e-9;

/// Below this `|z1 + z2|` the correlation ratio `ms / sinh(z1 + z2)` is
/// ill-conditioned and `r` is recovered from `mc` instead.
const SUM_SQUEEZE_SWITCH: f64 = 1e-3;

const PSD_TOL: f64 = 1e-12;

/// Generating parameters of a zero-mean two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianParams {
    /// Single-mode squeezing of mode 1.
    pub z1: f64,
    /// Single-mode squeezing of mode 2.
    pub z2: f64,
    /// Two-mode squeezing.
    pub r: f64,
    /// Thermal photons of mode 1 before squeezing.
    pub nu1: f64,
    /// Thermal photons of mode 2 before squeezing.
    pub nu2: f64,
}

impl GaussianParams {
    pub fn new(z1: f64, z2: f64, r: f64, nu1: f64, nu2: f64) -> Result<Self> {
        let p = GaussianParams { z1, z2, r, nu1, nu2 };
        p.validate()?;
        Ok(p)
    }

    pub fn vacuum() -> Self {
        GaussianParams::default()
    }

    /// Two-mode squeezed vacuum.
    pub fn tmsv(r: f64) -> Self {
        GaussianParams { r, ..Default::default() }
    }

    /// Equal single-mode squeezing and mixedness on both modes.
    pub fn symmetric(z0: f64, r0: f64, nu0: f64) -> Self {
        GaussianParams { z1: z0, z2: z0, r: r0, nu1: nu0, nu2: nu0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.z1, self.z2, self.r, self.nu1, self.nu2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite parameter in {self:?}")));
        }
        if self.nu1 < 0.0 || self.nu2 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "mixedness must be non-negative (nu1 = {}, nu2 = {})",
                self.nu1, self.nu2
            )));
        }
        Ok(())
    }

    /// Largest absolute difference between two parameter sets.
    pub fn max_abs_diff(&self, other: &GaussianParams) -> f64 {
        [self.z1 - other.z1, self.z2 - other.z2, self.r - other.r, self.nu1 - other.nu1, self.nu2 - other.nu2]
            .iter()
            .fold(0.0, |acc, d| acc.max(d.abs()))
    }
}

/// The six independent second moments of a two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CovarianceMatrix {
    pub n1: f64,
    pub n2: f64,
    pub m1: f64,
    pub m2: f64,
    pub ms: f64,
    pub mc: f64,
}

/// Which mode a local operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

impl CovarianceMatrix {
    pub fn new(n1: f64, n2: f64, m1: f64, m2: f64, ms: f64, mc: f64) -> Self {
        CovarianceMatrix { n1, n2, m1, m2, ms, mc }
    }

    pub fn vacuum() -> Self {
        CovarianceMatrix::default()
    }

    /// Product of thermal states with the given occupations.
    pub fn thermal(n1: f64, n2: f64) -> Self {
        CovarianceMatrix { n1, n2, ..Default::default() }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.n1, self.n2, self.m1, self.m2, self.ms, self.mc]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        CovarianceMatrix::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    /// Largest absolute difference over the six moments.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        self.as_array().iter().zip(other.as_array()).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Local block of mode 1.
    pub fn v1(&self) -> Matrix2<f64> {
        Matrix2::new(self.n1 + 0.5, self.m1, self.m1, self.n1 + 0.5)
    }

    /// Local block of mode 2.
    pub fn v2(&self) -> Matrix2<f64> {
        Matrix2::new(self.n2 + 0.5, self.m2, self.m2, self.n2 + 0.5)
    }

    /// Correlation block between the modes.
    pub fn c(&self) -> Matrix2<f64> {
        Matrix2::new(self.ms, self.mc, self.mc, self.ms)
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let v1 = self.v1();
        let v2 = self.v2();
        let c = self.c();
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&v1);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&v2);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
        m
    }

    fn from_blocks(v1: &Matrix2<f64>, v2: &Matrix2<f64>, c: &Matrix2<f64>) -> Self {
        CovarianceMatrix {
            n1: v1[(0, 0)] - 0.5,
            n2: v2[(0, 0)] - 0.5,
            m1: v1[(0, 1)],
            m2: v2[(0, 1)],
            ms: c[(0, 0)],
            mc: c[(0, 1)],
        }
    }

    /// `det V1 = (n1 + 1/2)^2 - m1^2`.
    pub fn det_v1(&self) -> f64 {
        (self.n1 + 0.5).powi(2) - self.m1 * self.m1
    }

    /// `det V2 = (n2 + 1/2)^2 - m2^2`.
    pub fn det_v2(&self) -> f64 {
        (self.n2 + 0.5).powi(2) - self.m2 * self.m2
    }

    /// Smallest eigenvalue of the assembled 4x4 matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.to_matrix()).eigenvalues.min()
    }

    /// Checks occupations, local determinants and positive semidefiniteness.
    pub fn check_physical(&self) -> Result<()> {
        let a = self.as_array();
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonPhysicalCm(format!("non-finite moment in {self:?}")));
        }
        let scale = a.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let tol = PSD_TOL * scale * scale;
        if self.n1 < -PSD_TOL * scale || self.n2 < -PSD_TOL * scale {
            return Err(Error::NonPhysicalCm(format!("negative occupation (n1 = {}, n2 = {})", self.n1, self.n2)));
        }
        for (label, det) in [("det V1", self.det_v1()), ("det V2", self.det_v2())] {
            if det < 0.25 - tol {
                return Err(Error::NonPhysicalCm(format!("{label} = {det} < 1/4")));
            }
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -PSD_TOL * scale {
            return Err(Error::NonPhysicalCm(format!("covariance matrix has negative eigenvalue {min_eig}")));
        }
        Ok(())
    }

    pub fn is_physical(&self) -> bool {
        self.check_physical().is_ok()
    }

    /// Applies a further single-mode squeeze `s` (same axis as `z_i`) to one
    /// mode. Squeezes compose additively: squeezing the state of `z1` by `s`
    /// gives the state of `z1 + s`.
    pub fn squeeze_locally(&self, mode: Mode, s: f64) -> Self {
        let (c, sh) = (s.cosh(), s.sinh());
        let t = Matrix2::new(c, -sh, -sh, c);
        let id = Matrix2::identity();
        let (t1, t2) = match mode {
            Mode::One => (t, id),
            Mode::Two => (id, t),
        };
        let v1 = t1 * self.v1() * t1.transpose();
        let v2 = t2 * self.v2() * t2.transpose();
        let c = t1 * self.c() * t2.transpose();
        CovarianceMatrix::from_blocks(&v1, &v2, &c)
    }

    /// Applies the phase rotation `a_i -> -a_i` to either mode (both choices
    /// act identically on the moments).
    pub fn flip_phase(&self) -> Self {
        CovarianceMatrix { ms: -self.ms, mc: -self.mc, ..*self }
    }
}

/// Local-unitary invariants of a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticInvariants {
    /// `det V1`
    pub i1: f64,
    /// `det V2`
    pub i2: f64,
    /// `det C`
    pub i3: f64,
    /// `tr[V1 Z C Z V2 Z C^dag Z]`, `Z = diag(1, -1)`
    pub i4: f64,
    /// `det V`
    pub iv: f64,
}

impl SymplecticInvariants {
    /// Simon quantity evaluated term by term from the invariants.
    ///
    /// The constant parts of `I1 I2`, `(1/4 - |I3|)^2` and `(I1 + I2) / 4`
    /// cancel, so for weakly excited states this loses precision; prefer
    /// [`simon_criterion`] for sign decisions.
    pub fn simon(&self) -> f64 {
        self.i1 * self.i2 + (0.25 - self.i3.abs()).powi(2) - self.i4 - 0.25 * (self.i1 + self.i2)
    }
}

fn z_matrix() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// `tr[V1 Z C Z V2 Z C^T Z]`, evaluated literally.
fn fourth_invariant(v1: &Matrix2<f64>, v2: &Matrix2<f64>, c: &Matrix2<f64>) -> f64 {
    let z = z_matrix();
    (v1 * z * c * z * v2 * z * c.transpose() * z).trace()
}

pub fn invariants(cm: &CovarianceMatrix) -> SymplecticInvariants {
    let c = cm.c();
    SymplecticInvariants {
        i1: cm.det_v1(),
        i2: cm.det_v2(),
        i3: cm.ms * cm.ms - cm.mc * cm.mc,
        i4: fourth_invariant(&cm.v1(), &cm.v2(), &c),
        iv: cm.to_matrix().determinant(),
    }
}

/// Simon separability quantity `S = I1 I2 + (1/4 - |I3|)^2 - I4 - (I1 + I2)/4`.
///
/// `S >= 0` means separable, `S < 0` entangled. Writing `I_i = 1/4 + d_i`
/// with `d_i = n_i (1 + n_i) - m_i^2`, the constants cancel exactly and
///
/// ```text
/// S = d1 d2 + I3^2 - |I3| / 2 - I4
/// ```
///
/// which is what is evaluated here. Every term is at least quadratic in the
/// moments, so the sign stays reliable as the state approaches the vacuum.
pub fn simon_criterion(cm: &CovarianceMatrix) -> f64 {
    let d1 = cm.n1 * (1.0 + cm.n1) - cm.m1 * cm.m1;
    let d2 = cm.n2 * (1.0 + cm.n2) - cm.m2 * cm.m2;
    let i3 = cm.ms * cm.ms - cm.mc * cm.mc;
    let i4 = fourth_invariant(&cm.v1(), &cm.v2(), &cm.c());
    d1 * d2 + i3 * i3 - 0.5 * i3.abs() - i4
}

/// Separable iff `S >= 0`.
pub fn is_separable(cm: &CovarianceMatrix) -> bool {
    simon_criterion(cm) >= 0.0
}

/// Second moments of the state generated by `p`.
pub fn cm_from_params(p: &GaussianParams) -> CovarianceMatrix {
    debug_assert!(p.nu1 >= 0.0 && p.nu2 >= 0.0, "negative mixedness in {p:?}");
    let GaussianParams { z1, z2, r, nu1, nu2 } = *p;
    let ch2 = r.cosh().powi(2);
    let sh2 = r.sinh().powi(2);
    let total = 1.0 + nu1 + nu2;
    CovarianceMatrix {
        n1: (2.0 * z1).cosh() * (nu1 * ch2 + (1.0 + nu2) * sh2) + z1.sinh().powi(2),
        n2: (2.0 * z2).cosh() * (nu2 * ch2 + (1.0 + nu1) * sh2) + z2.sinh().powi(2),
        m1: -(nu1 - nu2 + total * (2.0 * r).cosh()) * z1.cosh() * z1.sinh(),
        m2: -(nu2 - nu1 + total * (2.0 * r).cosh()) * z2.cosh() * z2.sinh(),
        mc: 0.5 * total * (z1 + z2).cosh() * (2.0 * r).sinh(),
        ms: -0.5 * total * (2.0 * r).sinh() * (z1 + z2).sinh(),
    }
}

/// Which closed form to use when recovering parameters from moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extraction {
    /// Local symplectic eigenvalues `sqrt(det V_i)` with the sign of the
    /// squeezing fixed by `m_i = -<a_i^2>`. Inverts [`cm_from_params`].
    #[default]
    Corrected,
    /// The historical closed form built from `det V_i` directly and
    /// `z_i = +atanh(m_i / (n_i + 1/2)) / 2`. It only round-trips when
    /// `z1 = z2 = 0` and `r = 0`, and is kept for comparison.
    Printed,
}

fn clamped_atanh(x: f64, what: &str) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::ExtractionOutOfDomain(format!("{what}: argument {x}")));
    }
    if x.abs() < 1.0 {
        return Ok(x.atanh());
    }
    if x.abs() - 1.0 <= CLAMP_TOL {
        let edge = 1.0 - f64::EPSILON;
        return Ok((x.signum() * edge).atanh());
    }
    Err(Error::ExtractionOutOfDomain(format!("{what}: atanh argument {x} outside (-1, 1)")))
}

fn clamp_mixedness(nu: f64, what: &str) -> Result<f64> {
    if nu >= 0.0 {
        Ok(nu)
    } else if nu >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::ExtractionOutOfDomain(format!("{what} = {nu} is negative")))
    }
}

/// Recovers the generating parameters of a covariance matrix.
pub fn params_from_cm(cm: &CovarianceMatrix) -> Result<GaussianParams> {
    params_from_cm_with(cm, Extraction::Corrected)
}

pub fn params_from_cm_with(cm: &CovarianceMatrix, method: Extraction) -> Result<GaussianParams> {
    cm.check_physical()?;
    let ratio1 = cm.m1 / (cm.n1 + 0.5);
    let ratio2 = cm.m2 / (cm.n2 + 0.5);
    let sign = match method {
        Extraction::Corrected => -1.0,
        Extraction::Printed => 1.0,
    };
    let z1 = sign * 0.5 * clamped_atanh(ratio1, "z1")?;
    let z2 = sign * 0.5 * clamped_atanh(ratio2, "z2")?;

    let det1 = cm.det_v1();
    let det2 = cm.det_v2();
    let (sym1, sym2) = (det1.sqrt(), det2.sqrt());
    let sum = z1 + z2;

    // x = tanh(2r)
    let x = if sum.abs() > SUM_SQUEEZE_SWITCH {
        2.0 * sign * cm.ms / ((sym1 + sym2) * sum.sinh())
    } else {
        2.0 * cm.mc / ((sym1 + sym2) * sum.cosh())
    };
    let r = 0.5 * clamped_atanh(x, "r")?;
    let sech = (1.0 - x * x).max(0.0).sqrt();

    let (nu1, nu2) = match method {
        Extraction::Corrected => (
            0.5 * (sym1 - sym2) + 0.5 * sech * (sym1 + sym2) - 0.5,
            0.5 * (sym2 - sym1) + 0.5 * sech * (sym1 + sym2) - 0.5,
        ),
        Extraction::Printed => (
            0.5 * (det1 - det2) + 0.5 * sech * (det1 + det2) - 0.5,
            0.5 * (det2 - det1) + 0.5 * sech * (det1 + det2) - 0.5,
        ),
    };
    Ok(GaussianParams { z1, z2, r, nu1: clamp_mixedness(nu1, "nu1")?, nu2: clamp_mixedness(nu2, "nu2")? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_moments_vanish() {
        let cm = cm_from_params(&GaussianParams::vacuum());
        assert_eq!(cm, CovarianceMatrix::vacuum());
    }

    #[test]
    fn tmsv_moments() {
        let r0 = 0.7_f64;
        let cm = cm_from_params(&GaussianParams::tmsv(r0));
        assert_abs_diff_eq!(cm.n1, r0.sinh().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(cm.n2, r0.sinh().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(cm.mc, 0.5 * (2.0 * r0).sinh(), epsilon = 1e-15);
        assert_eq!((cm.m1, cm.m2, cm.ms), (0.0, 0.0, 0.0));
    }

    #[test]
    fn vacuum_invariants() {
        let inv = invariants(&CovarianceMatrix::vacuum());
        assert_abs_diff_eq!(inv.i1, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(inv.i2, 0.25, epsilon = 1e-15);
        assert_eq!(inv.i3, 0.0);
        assert_eq!(inv.i4, 0.0);
        assert_abs_diff_eq!(inv.iv, 1.0 / 16.0, epsilon = 1e-15);
        assert_eq!(simon_criterion(&CovarianceMatrix::vacuum()), 0.0);
        assert_abs_diff_eq!(inv.simon(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tmsv_invariants_by_hand() {
        let n = 1.0_f64.sinh().powi(2);
        let m = 0.5 * 2.0_f64.sinh();
        let inv = invariants(&cm_from_params(&GaussianParams::tmsv(1.0)));
        let a2 = (n + 0.5).powi(2);
        assert_abs_diff_eq!(inv.i1, a2, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i2, a2, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i3, -m * m, epsilon = 1e-12);
        assert_abs_diff_eq!(inv.i4, 2.0 * a2 * m * m, epsilon = 1e-12);
    }

    #[test]
    fn tmsv_simon_value() {
        let cm = cm_from_params(&GaussianParams::tmsv(1.0));
        let (n, m) = (cm.n1, cm.mc);
        let factored = (m + n) * (m + n + 1.0) * (m - n) * (m - n - 1.0);
        let s = simon_criterion(&cm);
        assert_abs_diff_eq!(s, factored, epsilon = 1e-12);
        assert_abs_diff_eq!(s, invariants(&cm).simon(), epsilon = 1e-12);
        assert_abs_diff_eq!(s, -3.288529104502, epsilon = 1e-11);
    }

    #[test]
    fn thermal_product_is_separable() {
        let cm = cm_from_params(&GaussianParams::new(0.0, 0.0, 0.0, 1.0, 1.0).unwrap());
        let expected = (9.0_f64 / 4.0).powi(2) + 1.0 / 16.0 - 9.0 / 8.0;
        assert_abs_diff_eq!(invariants(&cm).simon(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(simon_criterion(&cm), expected, epsilon = 1e-12);
        assert!(is_separable(&cm));
    }

    #[test]
    fn extraction_of_known_states() {
        let p = params_from_cm(&CovarianceMatrix::vacuum()).unwrap();
        assert_eq!(p, GaussianParams::vacuum());

        let cm =
            CovarianceMatrix::new(1.0_f64.sinh().powi(2), 1.0_f64.sinh().powi(2), 0.0, 0.0, 0.0, 0.5 * 2.0_f64.sinh());
        let p = params_from_cm(&cm).unwrap();
        assert!(p.max_abs_diff(&GaussianParams::tmsv(1.0)) < 1e-12, "{p:?}");
    }

    #[test]
    fn round_trip_when_squeezings_cancel() {
        let p = GaussianParams::new(0.8, -0.8, 0.6, 0.2, 1.1).unwrap();
        let back = params_from_cm(&cm_from_params(&p)).unwrap();
        assert!(back.max_abs_diff(&p) < 1e-10, "{back:?}");
    }

    #[test]
    fn printed_extraction_flips_squeezing() {
        let p = GaussianParams::new(0.5, 0.3, 0.4, 1.5, 1.5).unwrap();
        let cm = cm_from_params(&p);
        let back = params_from_cm_with(&cm, Extraction::Printed).unwrap();
        assert_abs_diff_eq!(back.z1, -p.z1, epsilon = 1e-12);
        assert_abs_diff_eq!(back.z2, -p.z2, epsilon = 1e-12);
        assert!((back.nu1 - p.nu1).abs() > 0.1);
        assert!(params_from_cm_with(&cm, Extraction::Corrected).unwrap().max_abs_diff(&p) < 1e-12);

        let pure = cm_from_params(&GaussianParams::new(0.5, 0.3, 0.4, 0.0, 0.0).unwrap());
        assert!(matches!(params_from_cm_with(&pure, Extraction::Printed), Err(Error::ExtractionOutOfDomain(_))));
    }

    #[test]
    fn non_physical_matrix_is_rejected() {
        let cm = CovarianceMatrix::new(0.1, 0.1, 0.5, 0.0, 0.0, 0.0);
        assert!(matches!(params_from_cm(&cm), Err(Error::NonPhysicalCm(_))));
        let cm = CovarianceMatrix::new(0.1, 0.1, 0.0, 0.0, 0.0, 2.0);
        assert!(matches!(cm.check_physical(), Err(Error::NonPhysicalCm(_))));
    }

    #[test]
    fn negative_mixedness_is_invalid() {
        assert!(matches!(GaussianParams::new(0.0, 0.0, 0.1, -0.5, 0.0), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn clamping_near_domain_edges() {
        assert!(clamped_atanh(1.0 + 1e-12, "x").unwrap().is_finite());
        assert!(clamped_atanh(1.0 + 1e-6, "x").is_err());
    }

    #[test]
    fn local_squeeze_composes_with_generating_squeeze() {
        let p = GaussianParams::new(0.3, -0.2, 0.7, 0.4, 0.1).unwrap();
        let cm = cm_from_params(&p);
        let squeezed = cm.squeeze_locally(Mode::One, 0.25).squeeze_locally(Mode::Two, -0.1);
        let direct = cm_from_params(&GaussianParams { z1: 0.55, z2: -0.3, ..p });
        assert!(squeezed.max_abs_diff(&direct) < 1e-12, "{squeezed:?} vs {direct:?}");
    }
}
