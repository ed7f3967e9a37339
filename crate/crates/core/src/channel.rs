//! Closed-form evolution of the second moments under independent thermal
//! reservoirs.
//!
//! Mode `i` is damped at rate `gamma_i` towards a thermal state with `nb_i`
//! photons. Occupations and single-mode moments relax as `exp(-2 gamma_i t)`,
//! the cross moments as `exp(-(gamma1 + gamma2) t)`.

use crate::error::{Error, Result};
use crate::gaussian::{cm_from_params, simon_criterion, CovarianceMatrix, GaussianParams};
use crate::par::{self, Execution};

/// Reservoir couplings and thermal occupations of the two baths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub nb1: f64,
    pub nb2: f64,
}

impl ChannelParams {
    pub fn new(gamma1: f64, gamma2: f64, nb1: f64, nb2: f64) -> Result<Self> {
        let ch = ChannelParams { gamma1, gamma2, nb1, nb2 };
        ch.validate()?;
        Ok(ch)
    }

    /// Identical baths on both modes.
    pub fn symmetric(gamma: f64, nb: f64) -> Self {
        ChannelParams { gamma1: gamma, gamma2: gamma, nb1: nb, nb2: nb }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1 > 0.0 && self.gamma2 > 0.0) || !self.gamma1.is_finite() || !self.gamma2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "dissipation rates must be positive and finite (gamma1 = {}, gamma2 = {})",
                self.gamma1, self.gamma2
            )));
        }
        if !(self.nb1 >= 0.0 && self.nb2 >= 0.0) || !self.nb1.is_finite() || !self.nb2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "bath occupations must be non-negative (nb1 = {}, nb2 = {})",
                self.nb1, self.nb2
            )));
        }
        Ok(())
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.nb1 == 0.0 && self.nb2 == 0.0
    }

    pub fn mean_gamma(&self) -> f64 {
        0.5 * (self.gamma1 + self.gamma2)
    }

    /// The stationary state of the channel.
    pub fn thermal_cm(&self) -> CovarianceMatrix {
        CovarianceMatrix::thermal(self.nb1, self.nb2)
    }
}

/// Propagates arbitrary second moments through the channel for a time `t`.
pub fn evolve_cm(cm: &CovarianceMatrix, ch: &ChannelParams, t: f64) -> CovarianceMatrix {
    let u1 = (-2.0 * ch.gamma1 * t).exp();
    let u2 = (-2.0 * ch.gamma2 * t).exp();
    let cross = (-(ch.gamma1 + ch.gamma2) * t).exp();
    // e^{-2 g t} ((e^{2 g t} - 1) nb + n0), rearranged to stay finite for large t
    CovarianceMatrix {
        n1: -(-2.0 * ch.gamma1 * t).exp_m1() * ch.nb1 + u1 * cm.n1,
        n2: -(-2.0 * ch.gamma2 * t).exp_m1() * ch.nb2 + u2 * cm.n2,
        m1: u1 * cm.m1,
        m2: u2 * cm.m2,
        ms: cross * cm.ms,
        mc: cross * cm.mc,
    }
}

/// Covariance matrix at time `t` of the state generated by `p0`.
pub fn evolve(p0: &GaussianParams, ch: &ChannelParams, t: f64) -> CovarianceMatrix {
    debug_assert!(t >= 0.0, "negative time {t}");
    evolve_cm(&cm_from_params(p0), ch, t)
}

/// Initial `(n0, m0)` of a symmetric state with `z = 0` and mixedness `nu0`
/// on both modes: `n0 = ((2 nu0 + 1) cosh 2r0 - 1) / 2`,
/// `m0 = (2 nu0 + 1) sinh 2r0 / 2`.
pub fn symmetric_initial_moments(nu0: f64, r0: f64) -> (f64, f64) {
    let k = 2.0 * nu0 + 1.0;
    (0.5 * (k * (2.0 * r0).cosh() - 1.0), 0.5 * k * (2.0 * r0).sinh())
}

/// Symmetric zero-temperature evolution of `n = n1 = n2` and `m = mc`.
pub fn evolve_symmetric(n0: f64, m0: f64, gamma: f64, t: f64) -> (f64, f64) {
    let decay = (-2.0 * gamma * t).exp();
    (n0 * decay, m0 * decay)
}

/// A fixed initial state under a fixed channel.
///
/// Besides the moments themselves this evaluates the Simon quantity rescaled
/// by the decay factors of the zero-temperature modes, which keeps its sign
/// exact long after the unscaled value has underflowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    initial: CovarianceMatrix,
    channel: ChannelParams,
}

impl Evolution {
    pub fn new(p0: &GaussianParams, channel: &ChannelParams) -> Self {
        Evolution::from_cm(cm_from_params(p0), channel)
    }

    pub fn from_cm(initial: CovarianceMatrix, channel: &ChannelParams) -> Self {
        Evolution { initial, channel: *channel }
    }

    pub fn initial(&self) -> &CovarianceMatrix {
        &self.initial
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    pub fn cm_at(&self, t: f64) -> CovarianceMatrix {
        evolve_cm(&self.initial, &self.channel, t)
    }

    pub fn simon_at(&self, t: f64) -> f64 {
        simon_criterion(&self.cm_at(t))
    }

    /// A positive multiple of `S(t)`.
    ///
    /// Equals `S(t) / (w1 w2)` with `w_i = exp(-2 gamma_i t)` for a
    /// zero-temperature bath and `w_i = 1` otherwise. The cross block carries
    /// `sqrt(u1 u2)` so every term divides out analytically.
    pub fn scaled_simon(&self, t: f64) -> f64 {
        let ch = &self.channel;
        let c0 = &self.initial;
        let u = [(-2.0 * ch.gamma1 * t).exp(), (-2.0 * ch.gamma2 * t).exp()];
        let cold = [ch.nb1 == 0.0, ch.nb2 == 0.0];
        let now = self.cm_at(t);

        let local = |i: usize, n0: f64, m0: f64, n: f64, m: f64| {
            if cold[i] {
                n0 + u[i] * (n0 * n0 - m0 * m0)
            } else {
                n * (1.0 + n) - m * m
            }
        };
        let e1 = local(0, c0.n1, c0.m1, now.n1, now.m1);
        let e2 = local(1, c0.n2, c0.m2, now.n2, now.m2);

        // product of u_i over the hot modes
        let hot = (0..2).filter(|&i| !cold[i]).fold(1.0, |acc, i| acc * u[i]);
        let i3 = c0.ms * c0.ms - c0.mc * c0.mc;
        let z = nalgebra::Matrix2::new(1.0, 0.0, 0.0, -1.0);
        let c = c0.c();
        let j = (now.v1() * z * c * z * now.v2() * z * c.transpose() * z).trace();

        e1 * e2 + hot * (u[0] * u[1]) * i3 * i3 - 0.5 * hot * i3.abs() - hot * j
    }

    /// `S(t) < 0`, decided from [`Evolution::scaled_simon`].
    pub fn is_entangled_at(&self, t: f64) -> bool {
        self.scaled_simon(t) < 0.0
    }
}

/// A sampled solution curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
    /// `S(t)` at each sample.
    pub simon: Vec<f64>,
    /// Entanglement at each sample, decided from the rescaled Simon quantity
    /// so it stays correct where `simon` has underflowed to zero.
    pub entangled: Vec<bool>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of transitions between entangled and separable samples.
    pub fn sign_changes(&self) -> usize {
        self.entangled.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// First sample time at which the state is separable.
    pub fn first_separable_time(&self) -> Option<f64> {
        self.entangled.iter().position(|e| !e).map(|k| self.times[k])
    }
}

/// `n` evenly spaced points from `lo` to `hi`, both included.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::InvalidGrid(format!("degenerate range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|k| if k == n - 1 { hi } else { lo + step * k as f64 }).collect())
}

/// Samples the evolution and the Simon quantity on `[0, t_max]`.
pub fn sample_trajectory(p0: &GaussianParams, ch: &ChannelParams, t_max: f64, n_points: usize) -> Result<Trajectory> {
    sample_trajectory_with(Execution::default(), p0, ch, t_max, n_points)
}

pub fn sample_trajectory_with(
    exec: Execution,
    p0: &GaussianParams,
    ch: &ChannelParams,
    t_max: f64,
    n_points: usize,
) -> Result<Trajectory> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidGrid(format!("t_max must be positive, got {t_max}")));
    }
    let times = uniform_grid(0.0, t_max, n_points)?;
    let evo = Evolution::new(p0, ch);
    let samples = par::map(exec, &times, |&t| {
        let cm = evo.cm_at(t);
        (cm, simon_criterion(&cm), evo.is_entangled_at(t))
    });
    let mut traj = Trajectory {
        times,
        states: Vec::with_capacity(n_points),
        simon: Vec::with_capacity(n_points),
        entangled: Vec::with_capacity(n_points),
    };
    for (cm, s, e) in samples {
        traj.states.push(cm);
        traj.simon.push(s);
        traj.entangled.push(e);
    }
    Ok(traj)
}
