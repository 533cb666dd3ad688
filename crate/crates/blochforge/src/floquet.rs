//! Floquet analysis of the two-segment periodically switched drive with
//! balanced gain/loss (±iδγ diagonal, real κ coupling).
//!
//! Within each period of length `T` the generator switches between
//!
//! ```text
//! H1 = 2π [ +iδγ  κ ]        H2 = 2π [ −iδγ  κ ]
//!         [ κ   −iδγ ]                [ κ   +iδγ ]
//! ```
//!
//! for durations `αT` and `(1−α)T`. The one-period (monodromy) operator
//! `U(T) = U2·U1` has unit determinant; its eigenvalues `e^{−iεT}` define
//! the quasi-energies `ε`. Below the exceptional-point threshold both ε are
//! real; above it they acquire an imaginary pair, one eigenvalue grows and
//! the drive amplifies.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::dyncore::{hamiltonian_from_params, DriveParams, DynError, Operator2, StateVector};
use crate::propagator::{
    evolve, segment_propagator, PeriodicBlock, PropError, Schedule, ScheduleItem, Segment,
    Trajectory, DEFAULT_SAMPLE_DT,
};
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FloquetError {
    #[error("modulation period must be > 0, got {0}")]
    NonPositivePeriod(f64),
    #[error("duty cycle must lie strictly inside (0, 1), got {0}")]
    InvalidDutyCycle(f64),
    #[error("coupling strength kappa must be >= 0, got {0}")]
    NegativeKappa(f64),
    #[error("parameter `{0}` must be finite, got {1}")]
    NonFinite(&'static str, f64),
    #[error("operator is singular; quasi-energies are undefined")]
    SingularOperator,
    #[error("axis `{0}` must be non-empty and strictly increasing")]
    BadAxis(&'static str),
    #[error("number of periods must be >= 1")]
    ZeroPeriods,
    #[error(transparent)]
    Prop(#[from] PropError),
    #[error(transparent)]
    Dyn(#[from] DynError),
}

/// Parameters of the two-segment Floquet drive.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FloquetParams {
    /// Coupling strength κ in Hz.
    pub kappa: f64,
    /// Half-difference of loss rates δγ = (γ1 − γ2)/2 magnitude, in Hz.
    pub dgamma: f64,
    /// Mean loss rate γ in Hz (passive, factors out of the PT part).
    pub gamma: f64,
    /// Modulation period T in seconds.
    pub period: f64,
    /// Duty cycle α of the first segment, strictly inside (0, 1).
    pub alpha: f64,
}

impl FloquetParams {
    pub fn new(
        kappa: f64,
        dgamma: f64,
        gamma: f64,
        period: f64,
        alpha: f64,
    ) -> Result<Self, FloquetError> {
        for (name, v) in [
            ("kappa", kappa),
            ("dgamma", dgamma),
            ("gamma", gamma),
            ("period", period),
            ("alpha", alpha),
        ] {
            if !v.is_finite() {
                return Err(FloquetError::NonFinite(name, v));
            }
        }
        if kappa < 0.0 {
            return Err(FloquetError::NegativeKappa(kappa));
        }
        if period <= 0.0 {
            return Err(FloquetError::NonPositivePeriod(period));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(FloquetError::InvalidDutyCycle(alpha));
        }
        Ok(Self {
            kappa,
            dgamma,
            gamma,
            period,
            alpha,
        })
    }

    /// Drive parameters of the first segment (gain on mode `|0⟩`),
    /// including the mean loss `γ`: `γ1 = γ − δγ`, `γ2 = γ + δγ`.
    pub fn segment1_params(&self) -> Result<DriveParams, DynError> {
        DriveParams::new(0.0, self.kappa, self.gamma - self.dgamma, self.gamma + self.dgamma)
    }

    /// Drive parameters of the second segment (loss rates swapped).
    pub fn segment2_params(&self) -> Result<DriveParams, DynError> {
        DriveParams::new(0.0, self.kappa, self.gamma + self.dgamma, self.gamma - self.dgamma)
    }

    /// One period of the drive as a schedule body.
    pub fn period_body(&self) -> Result<Vec<Segment>, FloquetError> {
        Ok(vec![
            Segment::new(self.segment1_params()?, self.alpha * self.period)?,
            Segment::new(self.segment2_params()?, (1.0 - self.alpha) * self.period)?,
        ])
    }
}

/// Quasi-energy pair `ε` with real parts wrapped to `(−π/T, π/T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiEnergyPair {
    pub eps1: C64,
    pub eps2: C64,
}

impl QuasiEnergyPair {
    /// Largest imaginary magnitude; the instability rate in 1/s.
    pub fn max_im_abs(&self) -> f64 {
        self.eps1.im.abs().max(self.eps2.im.abs())
    }
}

/// Phase-diagram values `max|Im ε|` over a (δγ, T) grid; zero in the
/// stable region.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagramGrid {
    pub dgamma_axis: Vec<f64>,
    pub period_axis: Vec<f64>,
    /// `values[i][j]` belongs to `(dgamma_axis[i], period_axis[j])`.
    pub values: Vec<Vec<f64>>,
}

/// One-period time-evolution operator of the balanced gain/loss part
/// (mean loss omitted): `U = U2·U1` with `U1` acting first.
pub fn monodromy(p: &FloquetParams) -> Result<Operator2, FloquetError> {
    let pt = FloquetParams { gamma: 0.0, ..*p };
    let h1 = hamiltonian_from_params(&pt.segment1_params()?)?;
    let h2 = hamiltonian_from_params(&pt.segment2_params()?)?;
    let u1 = segment_propagator(&h1, p.alpha * p.period)?;
    let u2 = segment_propagator(&h2, (1.0 - p.alpha) * p.period)?;
    Ok(u2 * u1)
}

/// `sin(z·t)/z` with a series branch near `z·t = 0`.
fn sinc_scaled(z: C64, t: f64) -> C64 {
    let x = z * t;
    if x.norm() < 1e-6 {
        let x2 = x * x;
        (C64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0) * t
    } else {
        x.sin() / z
    }
}

/// Half-trace `tr(U)/2` of the monodromy from the analytically multiplied
/// product:
///
/// ```text
/// tr(U)/2 = cos(Ω t1)·cos(Ω t2) − sin(Ω t1)·sin(Ω t2)·(k² + g²)/Ω²
/// ```
///
/// with `k = 2πκ`, `g = 2πδγ`, `Ω = √(k² − g²)` (imaginary for δγ > κ,
/// where the even functions continue to hyperbolics), `t1 = αT`,
/// `t2 = (1−α)T`. Always real by the balanced gain/loss symmetry.
pub fn half_trace(kappa: f64, dgamma: f64, period: f64, alpha: f64) -> f64 {
    let k = 2.0 * PI * kappa;
    let g = 2.0 * PI * dgamma;
    let omega = C64::new(k * k - g * g, 0.0).sqrt();
    let t1 = alpha * period;
    let t2 = (1.0 - alpha) * period;
    let c = (omega * t1).cos() * (omega * t2).cos();
    let s = sinc_scaled(omega, t1) * sinc_scaled(omega, t2) * (k * k + g * g);
    (c - s).re
}

fn wrap_to_band(re: f64, period: f64) -> f64 {
    let band = PI / period;
    let mut x = re;
    while x > band {
        x -= 2.0 * band;
    }
    while x <= -band {
        x += 2.0 * band;
    }
    x
}

/// Quasi-energies `ε = i·ln(λ)/T` of a one-period operator, principal log,
/// real parts wrapped to `(−π/T, π/T]`.
pub fn quasi_energies(u: &Operator2, period: f64) -> Result<QuasiEnergyPair, FloquetError> {
    if period <= 0.0 {
        return Err(FloquetError::NonPositivePeriod(period));
    }
    let det = u.det();
    if det.norm() < 1e-300 {
        return Err(FloquetError::SingularOperator);
    }
    let mean = u.trace() * 0.5;
    let disc = (mean * mean - det).sqrt();
    let lambda1 = mean + disc;
    let lambda2 = mean - disc;
    if lambda1.norm() == 0.0 || lambda2.norm() == 0.0 {
        return Err(FloquetError::SingularOperator);
    }
    let to_eps = |lambda: C64| {
        let ln = lambda.ln(); // principal branch
        let eps = C64::i() * ln / period;
        C64::new(wrap_to_band(eps.re, period), eps.im)
    };
    Ok(QuasiEnergyPair {
        eps1: to_eps(lambda1),
        eps2: to_eps(lambda2),
    })
}

/// Result of an exceptional-point threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpThreshold {
    /// Smallest δγ in (0, κ) where the quasi-energies coalesce.
    Found(f64),
    /// No coalescence below δγ = κ at this period: the drive is stable for
    /// every δγ < κ. A valid outcome, not a failure.
    StableBelowKappa,
}

impl EpThreshold {
    pub fn value(&self) -> Option<f64> {
        match self {
            EpThreshold::Found(v) => Some(*v),
            EpThreshold::StableBelowKappa => None,
        }
    }
}

/// Exceptional-point threshold of the static (unmodulated) drive: δγ = κ.
pub fn ep_threshold_static(kappa: f64) -> f64 {
    kappa
}

const EP_SCAN_STEPS: usize = 2000;

/// Smallest δγ in (0, κ) where `|tr(U)/2|` reaches 1 (eigenvalue
/// coalescence at λ = ±1), found by a scan with step κ/2000 followed by
/// bisection. Duty cycles of exactly 0 or 1 denote the unmodulated drive
/// and return the static threshold δγ = κ.
pub fn ep_threshold(kappa: f64, period: f64, alpha: f64) -> Result<EpThreshold, FloquetError> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(FloquetError::NegativeKappa(kappa));
    }
    if !period.is_finite() || period <= 0.0 {
        return Err(FloquetError::NonPositivePeriod(period));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(EpThreshold::Found(ep_threshold_static(kappa)));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FloquetError::InvalidDutyCycle(alpha));
    }

    let f = |g: f64| half_trace(kappa, g, period, alpha).abs() - 1.0;
    let step = kappa / EP_SCAN_STEPS as f64;
    let mut lo = 0.0;
    // At δγ = 0 the drive is Hermitian, so |tr/2| ≤ 1 exactly; rounding can
    // land a band-edge case (2πκT = mπ) a few ulps above 1.
    let mut f_lo = f(0.0).min(0.0);
    let mut bracket = None;
    for i in 1..EP_SCAN_STEPS {
        let hi = i as f64 * step;
        let f_hi = f(hi);
        // Strict on the right so band-edge tangencies (which are stable,
        // U = ±I there) do not register as thresholds.
        if f_lo <= 0.0 && f_hi > 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => return Ok(EpThreshold::StableBelowKappa),
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EpThreshold::Found(0.5 * (lo + hi)))
}

/// Instability rate `max|Im ε|` at one grid point, from the analytic
/// half-trace: with det(U) = 1 the eigenvalues are `c ± √(c² − 1)`, so the
/// rate is `ln(|c| + √(c² − 1))/T` for `|c| > 1` and exactly 0 otherwise.
pub fn instability_rate(kappa: f64, dgamma: f64, period: f64, alpha: f64) -> f64 {
    let c = half_trace(kappa, dgamma, period, alpha).abs();
    if c <= 1.0 {
        return 0.0;
    }
    let rate = (c + (c * c - 1.0).sqrt()).ln() / period;
    if rate < 1e-9 {
        0.0
    } else {
        rate
    }
}

/// Map `max|Im ε|` over a (δγ, T) grid. Grid points are independent and
/// evaluated in parallel; the output layout is deterministic regardless of
/// worker count.
pub fn phase_diagram(
    kappa: f64,
    dgamma_axis: &[f64],
    period_axis: &[f64],
    alpha: f64,
) -> Result<PhaseDiagramGrid, FloquetError> {
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(FloquetError::NegativeKappa(kappa));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FloquetError::InvalidDutyCycle(alpha));
    }
    check_axis("dgamma", dgamma_axis)?;
    check_axis("period", period_axis)?;
    if period_axis[0] <= 0.0 {
        return Err(FloquetError::NonPositivePeriod(period_axis[0]));
    }
    let values: Vec<Vec<f64>> = dgamma_axis
        .par_iter()
        .map(|&g| {
            period_axis
                .iter()
                .map(|&t| instability_rate(kappa, g, t, alpha))
                .collect()
        })
        .collect();
    Ok(PhaseDiagramGrid {
        dgamma_axis: dgamma_axis.to_vec(),
        period_axis: period_axis.to_vec(),
        values,
    })
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<(), FloquetError> {
    if axis.is_empty() || axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FloquetError::BadAxis(name));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(FloquetError::BadAxis(name));
    }
    Ok(())
}

/// Evolve through `n_periods` of the full drive (mean loss included) and
/// record the trajectory at the default sampling interval.
pub fn floquet_evolve(
    p: &FloquetParams,
    n_periods: u32,
    psi0: &StateVector,
) -> Result<Trajectory, FloquetError> {
    floquet_evolve_sampled(p, n_periods, psi0, DEFAULT_SAMPLE_DT)
}

/// [`floquet_evolve`] with an explicit sampling interval.
pub fn floquet_evolve_sampled(
    p: &FloquetParams,
    n_periods: u32,
    psi0: &StateVector,
    sample_dt: f64,
) -> Result<Trajectory, FloquetError> {
    if n_periods == 0 {
        return Err(FloquetError::ZeroPeriods);
    }
    let block = PeriodicBlock::new(p.period_body()?, n_periods)?;
    let schedule = Schedule::new(vec![ScheduleItem::Periodic(block)])?;
    Ok(evolve(&schedule, psi0, sample_dt)?)
}

/// Stroboscopic powers `P(nT)` for `n = 0..=n_periods`, read off the
/// trajectory samples nearest to each period boundary.
pub fn stroboscopic_powers(traj: &Trajectory, period: f64, n_periods: u32) -> Vec<f64> {
    (0..=n_periods)
        .map(|n| traj.nearest(n as f64 * period).power)
        .collect()
}
