//! Exact propagation of piecewise-constant schedules.
//!
//! Each segment's propagator is the closed-form exponential of a 2×2
//! (possibly non-Hermitian) generator; trajectories are sampled exactly at
//! grid times inside each segment, so there is no step-size error anywhere
//! in the main path. [`reference_integrate`] provides an independent
//! fixed-step RK4 oracle for cross-checking.

use std::f64::consts::PI;

use crate::dyncore::{
    bloch_from_state, hamiltonian_from_params, pauli_decompose, BlochPoint, DriveParams, DynError,
    Operator2, StateVector,
};
use crate::C64;

/// Default trajectory sampling interval in seconds (≥250 points per Rabi
/// period at κ = 10 Hz).
pub const DEFAULT_SAMPLE_DT: f64 = 1e-4;

/// Below this phase magnitude `|μ·dt|` the propagator switches to a Taylor
/// series to avoid cancellation near degenerate points.
const SMALL_ANGLE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropError {
    #[error("schedule must contain at least one item")]
    EmptySchedule,
    #[error("segment duration must be >= 0, got {0}")]
    NegativeDuration(f64),
    #[error("periodic block must repeat at least once")]
    ZeroRepeats,
    #[error("periodic block body must not be empty")]
    EmptyPeriodicBody,
    #[error("sample interval must be > 0, got {0}")]
    NonPositiveSampleDt(f64),
    #[error("integrator step too large: |H|·dt = {0:.3e}, require < 0.1")]
    StepTooLarge(f64),
    #[error(transparent)]
    Dyn(#[from] DynError),
}

/// One piecewise-constant drive interval.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Segment {
    pub params: DriveParams,
    pub duration: f64,
}

impl Segment {
    pub fn new(params: DriveParams, duration: f64) -> Result<Self, PropError> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(PropError::NegativeDuration(duration));
        }
        Ok(Self { params, duration })
    }
}

/// Body of segments repeated a fixed number of times; the body durations
/// sum to the modulation period `T`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PeriodicBlock {
    pub body: Vec<Segment>,
    pub repeats: u32,
}

impl PeriodicBlock {
    pub fn new(body: Vec<Segment>, repeats: u32) -> Result<Self, PropError> {
        if body.is_empty() {
            return Err(PropError::EmptyPeriodicBody);
        }
        if repeats == 0 {
            return Err(PropError::ZeroRepeats);
        }
        Ok(Self { body, repeats })
    }

    /// Modulation period: total duration of one body pass.
    pub fn period(&self) -> f64 {
        self.body.iter().map(|s| s.duration).sum()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ScheduleItem {
    Segment(Segment),
    Periodic(PeriodicBlock),
}

/// Ordered drive program: segments and periodic blocks.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Schedule {
    items: Vec<ScheduleItem>,
}

impl Schedule {
    pub fn new(items: Vec<ScheduleItem>) -> Result<Self, PropError> {
        if items.is_empty() {
            return Err(PropError::EmptySchedule);
        }
        Ok(Self { items })
    }

    /// Schedule consisting of plain segments only.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self, PropError> {
        Self::new(segments.into_iter().map(ScheduleItem::Segment).collect())
    }

    pub fn items(&self) -> &[ScheduleItem] {
        &self.items
    }

    /// Total duration with periodic bodies counted `repeats` times.
    pub fn total_duration(&self) -> f64 {
        self.flattened().map(|s| s.duration).sum()
    }

    /// Concatenate two schedules.
    pub fn concat(&self, other: &Schedule) -> Schedule {
        let mut items = self.items.clone();
        items.extend(other.items.iter().cloned());
        Schedule { items }
    }

    /// Iterate over segments in execution order, expanding periodic blocks.
    pub fn flattened(&self) -> impl Iterator<Item = &Segment> + '_ {
        self.items.iter().flat_map(|item| match item {
            ScheduleItem::Segment(s) => ExpandIter::Once(std::iter::once(s)),
            ScheduleItem::Periodic(b) => {
                ExpandIter::Cycle(std::iter::repeat(&b.body).take(b.repeats as usize).flatten())
            }
        })
    }
}

enum ExpandIter<'a> {
    Once(std::iter::Once<&'a Segment>),
    Cycle(
        std::iter::Flatten<std::iter::Take<std::iter::Repeat<&'a Vec<Segment>>>>,
    ),
}

impl<'a> Iterator for ExpandIter<'a> {
    type Item = &'a Segment;

    fn next(&mut self) -> Option<&'a Segment> {
        match self {
            ExpandIter::Once(it) => it.next(),
            ExpandIter::Cycle(it) => it.next(),
        }
    }
}

/// One trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: StateVector,
    pub bloch: BlochPoint,
    pub power: f64,
}

/// Time-stamped evolution record; strictly increasing in `t`, starting at
/// the initial state and ending at the total schedule duration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn initial(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory is never empty")
    }

    /// Sample closest to time `t`.
    pub fn nearest(&self, t: f64) -> &TrajectorySample {
        self.samples
            .iter()
            .min_by(|a, b| {
                (a.t - t)
                    .abs()
                    .partial_cmp(&(b.t - t).abs())
                    .expect("sample times are finite")
            })
            .expect("trajectory is never empty")
    }
}

/// Complex square root on the principal branch: non-negative real part,
/// positive imaginary part when the real part is zero.
fn principal_sqrt(z: C64) -> C64 {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// Closed-form propagator `U = exp(−i·h·dt)`.
///
/// With `h = a0·I + b·σ` and `μ = sqrt(bx² + by² + bz²)` (complex for
/// non-Hermitian `h`):
///
/// ```text
/// U = e^{−i·a0·dt} [ cos(μ·dt)·I − i·(sin(μ·dt)/μ)·(b·σ) ]
/// ```
///
/// The formula is even in `μ`, so the branch choice only standardizes
/// intermediates. Near `μ·dt = 0` a Taylor series replaces cos and
/// sin(μ·dt)/μ to avoid cancellation.
pub fn segment_propagator(h: &Operator2, dt: f64) -> Result<Operator2, PropError> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(PropError::NegativeDuration(dt));
    }
    let (a0, bx, by, bz) = pauli_decompose(h);
    let mu = principal_sqrt(bx * bx + by * by + bz * bz);
    let phase = mu * dt;
    let (cos_term, sin_over_mu) = if phase.norm() < SMALL_ANGLE {
        // 4-term series in x = μ·dt for cos(x) and dt·sinc(x).
        let x2 = phase * phase;
        let cos_term = C64::new(1.0, 0.0) - x2 / 2.0 + x2 * x2 / 24.0 - x2 * x2 * x2 / 720.0;
        let sinc =
            C64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
        (cos_term, sinc * dt)
    } else {
        (phase.cos(), phase.sin() / mu)
    };
    let global = (-C64::i() * a0 * dt).exp();
    let pauli_part = Operator2::from_pauli(
        cos_term,
        -C64::i() * sin_over_mu * bx,
        -C64::i() * sin_over_mu * by,
        -C64::i() * sin_over_mu * bz,
    );
    Ok(pauli_part.scale(global))
}

/// Propagator of one drive segment.
pub fn propagator_for(segment: &Segment) -> Result<Operator2, PropError> {
    let h = hamiltonian_from_params(&segment.params)?;
    segment_propagator(&h, segment.duration)
}

/// Final state after the whole schedule, without trajectory sampling.
pub fn final_state(schedule: &Schedule, psi0: &StateVector) -> Result<StateVector, PropError> {
    if !(psi0.power() > 0.0) {
        return Err(PropError::Dyn(DynError::ZeroPower));
    }
    let mut psi = *psi0;
    for segment in schedule.flattened() {
        let u = propagator_for(segment)?;
        psi = u.apply(&psi);
    }
    Ok(psi)
}

fn push_sample(samples: &mut Vec<TrajectorySample>, t: f64, state: StateVector) -> Result<(), PropError> {
    let bloch = bloch_from_state(&state)?;
    samples.push(TrajectorySample {
        t,
        state,
        bloch,
        power: state.power(),
    });
    Ok(())
}

/// Evolve `psi0` through the schedule, sampling every `sample_dt` within
/// each segment plus at every segment boundary (duplicates dropped).
///
/// States at interior samples are computed from the segment's own
/// propagator at the elapsed offset, so every recorded sample is exact.
pub fn evolve(
    schedule: &Schedule,
    psi0: &StateVector,
    sample_dt: f64,
) -> Result<Trajectory, PropError> {
    if !(sample_dt > 0.0) || !sample_dt.is_finite() {
        return Err(PropError::NonPositiveSampleDt(sample_dt));
    }
    if !(psi0.power() > 0.0) {
        return Err(PropError::Dyn(DynError::ZeroPower));
    }

    let mut samples = Vec::new();
    push_sample(&mut samples, 0.0, *psi0)?;

    let mut t0 = 0.0_f64;
    let mut psi = *psi0;
    for segment in schedule.flattened() {
        if segment.duration < 0.0 {
            return Err(PropError::NegativeDuration(segment.duration));
        }
        if segment.duration == 0.0 {
            continue; // identity; boundary sample would duplicate the previous time
        }
        let h = hamiltonian_from_params(&segment.params)?;
        // Interior grid points strictly before the boundary; a grid point
        // within sample_dt/2^30 of the boundary counts as the boundary.
        let eps = sample_dt * 2f64.powi(-30);
        let mut k = 1u64;
        loop {
            let offset = k as f64 * sample_dt;
            if offset >= segment.duration - eps {
                break;
            }
            let u = segment_propagator(&h, offset)?;
            push_sample(&mut samples, t0 + offset, u.apply(&psi))?;
            k += 1;
        }
        let u_full = segment_propagator(&h, segment.duration)?;
        psi = u_full.apply(&psi);
        t0 += segment.duration;
        push_sample(&mut samples, t0, psi)?;
    }

    // Zero-total-duration schedules keep only the initial sample.
    Ok(Trajectory { samples })
}

/// Independent fixed-step RK4 integration of `i dψ/dt = H ψ`, used as an
/// oracle against the closed-form path. Each segment is subdivided into
/// equal steps no longer than `dt`; requires `|H|·dt < 0.1`.
pub fn reference_integrate(
    schedule: &Schedule,
    psi0: &StateVector,
    dt: f64,
) -> Result<StateVector, PropError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(PropError::NonPositiveSampleDt(dt));
    }
    if !(psi0.power() > 0.0) {
        return Err(PropError::Dyn(DynError::ZeroPower));
    }
    let mut psi = *psi0;
    for segment in schedule.flattened() {
        let h = hamiltonian_from_params(&segment.params)?;
        let h_norm = h.frobenius_norm();
        if h_norm * dt >= 0.1 {
            return Err(PropError::StepTooLarge(h_norm * dt));
        }
        if segment.duration == 0.0 {
            continue;
        }
        let steps = (segment.duration / dt).ceil().max(1.0) as u64;
        let step = segment.duration / steps as f64;
        let rhs = |s: &StateVector| {
            let hs = h.apply(s);
            StateVector::new(-C64::i() * hs.c0, -C64::i() * hs.c1)
        };
        for _ in 0..steps {
            let k1 = rhs(&psi);
            let k2 = rhs(&StateVector::new(
                psi.c0 + 0.5 * step * k1.c0,
                psi.c1 + 0.5 * step * k1.c1,
            ));
            let k3 = rhs(&StateVector::new(
                psi.c0 + 0.5 * step * k2.c0,
                psi.c1 + 0.5 * step * k2.c1,
            ));
            let k4 = rhs(&StateVector::new(
                psi.c0 + step * k3.c0,
                psi.c1 + step * k3.c1,
            ));
            psi = StateVector::new(
                psi.c0 + step / 6.0 * (k1.c0 + 2.0 * k2.c0 + 2.0 * k3.c0 + k4.c0),
                psi.c1 + step / 6.0 * (k1.c1 + 2.0 * k2.c1 + 2.0 * k3.c1 + k4.c1),
            );
        }
    }
    Ok(psi)
}

/// Closed-form Rabi population of `|0⟩` under constant `(Δ, κ)` drive from
/// `|0⟩`:
///
/// ```text
/// P0(t) = 1 − [(2πκ)² / ((πΔ)² + (2πκ)²)] · sin²(√((πΔ)² + (2πκ)²) · t)
/// ```
pub fn rabi_population(delta: f64, kappa: f64, t: f64) -> f64 {
    let bz = PI * delta;
    let bx = 2.0 * PI * kappa;
    let mu2 = bz * bz + bx * bx;
    if mu2 == 0.0 {
        return 1.0;
    }
    let mu = mu2.sqrt();
    let s = (mu * t).sin();
    (1.0 - (bx * bx / mu2) * s * s).clamp(0.0, 1.0)
}

/// Relative distance between two states, `‖a − b‖ / ‖b‖`.
pub fn relative_state_error(a: &StateVector, b: &StateVector) -> f64 {
    let diff = ((a.c0 - b.c0).norm_sqr() + (a.c1 - b.c1).norm_sqr()).sqrt();
    diff / b.power().sqrt()
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_params() -> impl Strategy<Value = DriveParams> {
        (-20.0f64..20.0, 0.0f64..10.0, -2.0f64..2.0, -2.0f64..2.0)
            .prop_map(|(d, k, g1, g2)| DriveParams::new(d, k, g1, g2).unwrap())
    }

    proptest! {
        // Hermitian-only schedules conserve power.
        #[test]
        fn hermitian_power_conserved(
            delta in -20.0f64..20.0,
            kappa in 0.0f64..10.0,
            duration in 0.0f64..0.5,
        ) {
            let schedule = Schedule::from_segments(vec![
                Segment::new(DriveParams::drive(delta, kappa).unwrap(), duration).unwrap(),
            ]).unwrap();
            let traj = evolve(&schedule, &StateVector::ket0(), 1e-3).unwrap();
            for s in &traj.samples {
                prop_assert!((s.power - 1.0).abs() < 1e-9);
            }
        }

        // Closed form agrees with the RK4 oracle on random two-segment schedules.
        #[test]
        fn oracle_agreement_two_segments(
            p1 in arb_params(),
            p2 in arb_params(),
            d1 in 0.0f64..0.25,
            d2 in 0.0f64..0.25,
        ) {
            let schedule = Schedule::from_segments(vec![
                Segment::new(p1, d1).unwrap(),
                Segment::new(p2, d2).unwrap(),
            ]).unwrap();
            let exact = final_state(&schedule, &StateVector::ket0()).unwrap();
            let rk4 = reference_integrate(&schedule, &StateVector::ket0(), 2e-5).unwrap();
            prop_assert!(relative_state_error(&rk4, &exact) < 1e-7);
        }
    }
}
