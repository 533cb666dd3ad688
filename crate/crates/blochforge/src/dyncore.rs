//! Domain types and Pauli-basis algebra for the two-level system.
//!
//! All user-facing rates (detuning Δ, coupling κ, loss γ) are plain `f64`
//! values in Hz. Operators built from them carry the 2π factor and live in
//! rad/s, so a Hamiltonian entry of `x` Hz appears as `2π·x` in the matrix.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::C64;

/// Errors from domain-type construction and the Bloch map.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynError {
    #[error("parameter `{0}` must be finite, got {1}")]
    NonFinite(&'static str, f64),
    #[error("coupling strength kappa must be >= 0, got {0}")]
    NegativeKappa(f64),
    #[error("state has zero power; Bloch direction is undefined")]
    ZeroPower,
}

/// Complex amplitude pair `(c0, c1)` of the two-level wavefunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub c0: C64,
    pub c1: C64,
}

impl StateVector {
    pub fn new(c0: C64, c1: C64) -> Self {
        Self { c0, c1 }
    }

    /// Basis state `|0⟩ = (1, 0)`.
    pub fn ket0() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Basis state `|1⟩ = (0, 1)`.
    pub fn ket1() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    /// Total power `|c0|² + |c1|²`. Conserved under Hermitian evolution;
    /// decays or grows under non-Hermitian drives.
    pub fn power(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    /// Normalized population of `|0⟩`: `|c0|² / power`.
    pub fn population0(&self) -> Result<f64, DynError> {
        let p = self.power();
        if p <= 0.0 || !p.is_finite() {
            return Err(DynError::ZeroPower);
        }
        Ok(self.c0.norm_sqr() / p)
    }

    /// Rescale to unit power.
    pub fn normalized(&self) -> Result<Self, DynError> {
        let p = self.power();
        if p <= 0.0 || !p.is_finite() {
            return Err(DynError::ZeroPower);
        }
        let s = 1.0 / p.sqrt();
        Ok(Self::new(self.c0 * s, self.c1 * s))
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c0, self.c1)
    }
}

/// Physical drive parameters of one piecewise-constant Hamiltonian segment.
///
/// `delta` is the mode detuning, `kappa` the inter-mode coupling, and
/// `gamma1`/`gamma2` the loss rates of modes `|0⟩`/`|1⟩`, all in Hz.
/// Negative loss rates mean gain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DriveParams {
    pub delta: f64,
    pub kappa: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl DriveParams {
    pub fn new(delta: f64, kappa: f64, gamma1: f64, gamma2: f64) -> Result<Self, DynError> {
        for (name, v) in [
            ("delta", delta),
            ("kappa", kappa),
            ("gamma1", gamma1),
            ("gamma2", gamma2),
        ] {
            if !v.is_finite() {
                return Err(DynError::NonFinite(name, v));
            }
        }
        if kappa < 0.0 {
            return Err(DynError::NegativeKappa(kappa));
        }
        Ok(Self {
            delta,
            kappa,
            gamma1,
            gamma2,
        })
    }

    /// Lossless drive `(Δ, κ)`.
    pub fn drive(delta: f64, kappa: f64) -> Result<Self, DynError> {
        Self::new(delta, kappa, 0.0, 0.0)
    }

    /// Free precession under detuning alone.
    pub fn free_precession(delta: f64) -> Result<Self, DynError> {
        Self::new(delta, 0.0, 0.0, 0.0)
    }

    /// Mean loss rate `(γ1 + γ2) / 2` in Hz.
    pub fn gamma_mean(&self) -> f64 {
        0.5 * (self.gamma1 + self.gamma2)
    }

    /// Half-difference of loss rates `(γ1 − γ2) / 2` in Hz.
    pub fn gamma_half_diff(&self) -> f64 {
        0.5 * (self.gamma1 - self.gamma2)
    }
}

/// Dense complex 2×2 operator.
///
/// Entries are in rad/s when the operator is a Hamiltonian and dimensionless
/// when it is a propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    pub m00: C64,
    pub m01: C64,
    pub m10: C64,
    pub m11: C64,
}

impl Operator2 {
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Self { m00, m01, m10, m11 }
    }

    pub fn zero() -> Self {
        Self::from_rows([[0.0, 0.0], [0.0, 0.0]])
    }

    pub fn identity() -> Self {
        Self::from_rows([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn sigma_x() -> Self {
        Self::from_rows([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn sigma_y() -> Self {
        Self::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        )
    }

    pub fn sigma_z() -> Self {
        Self::from_rows([[1.0, 0.0], [0.0, -1.0]])
    }

    fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Self::new(
            C64::new(rows[0][0], 0.0),
            C64::new(rows[0][1], 0.0),
            C64::new(rows[1][0], 0.0),
            C64::new(rows[1][1], 0.0),
        )
    }

    /// Rebuild an operator from Pauli coefficients: `a0·I + ax·σx + ay·σy + az·σz`.
    pub fn from_pauli(a0: C64, ax: C64, ay: C64, az: C64) -> Self {
        let i = C64::i();
        Self::new(a0 + az, ax - i * ay, ax + i * ay, a0 - az)
    }

    pub fn trace(&self) -> C64 {
        self.m00 + self.m11
    }

    pub fn det(&self) -> C64 {
        self.m00 * self.m11 - self.m01 * self.m10
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.m00 * s, self.m01 * s, self.m10 * s, self.m11 * s)
    }

    /// Apply to a state: `ψ' = M ψ`.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector::new(
            self.m00 * psi.c0 + self.m01 * psi.c1,
            self.m10 * psi.c0 + self.m11 * psi.c1,
        )
    }

    /// Frobenius norm; an upper bound on the spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        (self.m00.norm_sqr() + self.m01.norm_sqr() + self.m10.norm_sqr() + self.m11.norm_sqr())
            .sqrt()
    }

    /// Largest entry-wise distance to another operator.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.m00 - other.m00).norm(),
            (self.m01 - other.m01).norm(),
            (self.m10 - other.m10).norm(),
            (self.m11 - other.m11).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.m01 - self.m10.conj()).norm() <= tol
            && self.m00.im.abs() <= tol
            && self.m11.im.abs() <= tol
    }
}

impl Mul for Operator2 {
    type Output = Operator2;

    fn mul(self, rhs: Operator2) -> Operator2 {
        Operator2::new(
            self.m00 * rhs.m00 + self.m01 * rhs.m10,
            self.m00 * rhs.m01 + self.m01 * rhs.m11,
            self.m10 * rhs.m00 + self.m11 * rhs.m10,
            self.m10 * rhs.m01 + self.m11 * rhs.m11,
        )
    }
}

impl Add for Operator2 {
    type Output = Operator2;

    fn add(self, rhs: Operator2) -> Operator2 {
        Operator2::new(
            self.m00 + rhs.m00,
            self.m01 + rhs.m01,
            self.m10 + rhs.m10,
            self.m11 + rhs.m11,
        )
    }
}

impl Sub for Operator2 {
    type Output = Operator2;

    fn sub(self, rhs: Operator2) -> Operator2 {
        Operator2::new(
            self.m00 - rhs.m00,
            self.m01 - rhs.m01,
            self.m10 - rhs.m10,
            self.m11 - rhs.m11,
        )
    }
}

/// Point on (or mapped onto) the unit Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    /// Build from raw components, renormalizing to unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, DynError> {
        let n = (x * x + y * y + z * z).sqrt();
        if n <= 0.0 || !n.is_finite() {
            return Err(DynError::ZeroPower);
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// Polar angle `θ = arccos(z) ∈ [0, π]`.
    pub fn theta(&self) -> f64 {
        self.z.clamp(-1.0, 1.0).acos()
    }

    /// Azimuth `φ = atan2(y, x) ∈ (−π, π]`, with `φ = 0` at the poles.
    pub fn phi(&self) -> f64 {
        if self.x == 0.0 && self.y == 0.0 {
            return 0.0;
        }
        let phi = self.y.atan2(self.x);
        if phi == -PI {
            PI
        } else {
            phi
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Hamiltonian of one drive segment, with entries in rad/s:
///
/// ```text
/// H = 2π · [ Δ/2 − iγ1    κ        ]
///          [ κ            −Δ/2 − iγ2 ]
/// ```
///
/// With `γ1 = γ2 = 0` this is the Hermitian drive `2π(Δ/2·σz + κ·σx)`.
pub fn hamiltonian_from_params(p: &DriveParams) -> Result<Operator2, DynError> {
    // DriveParams::new validates, but programmatic construction can bypass it.
    let checked = DriveParams::new(p.delta, p.kappa, p.gamma1, p.gamma2)?;
    let tau = 2.0 * PI;
    Ok(Operator2::new(
        C64::new(tau * checked.delta / 2.0, -tau * checked.gamma1),
        C64::new(tau * checked.kappa, 0.0),
        C64::new(tau * checked.kappa, 0.0),
        C64::new(-tau * checked.delta / 2.0, -tau * checked.gamma2),
    ))
}

/// Coefficients of `h` in the basis `{I, σx, σy, σz}`, so that
/// `a0·I + ax·σx + ay·σy + az·σz` reconstructs `h` exactly.
pub fn pauli_decompose(h: &Operator2) -> (C64, C64, C64, C64) {
    let half = C64::new(0.5, 0.0);
    let a0 = (h.m00 + h.m11) * half;
    let ax = (h.m01 + h.m10) * half;
    let ay = C64::i() * (h.m01 - h.m10) * half;
    let az = (h.m00 - h.m11) * half;
    (a0, ax, ay, az)
}

/// Map a state onto the Bloch sphere via normalized Pauli expectations:
/// `x = 2Re(c0*·c1)/P`, `y = 2Im(c0*·c1)/P`, `z = (|c0|²−|c1|²)/P`.
///
/// Invariant under global phase and global rescaling; always renormalized,
/// so it stays on the unit sphere even for non-Hermitian evolution.
pub fn bloch_from_state(psi: &StateVector) -> Result<BlochPoint, DynError> {
    let p = psi.power();
    if p <= 0.0 || !p.is_finite() {
        return Err(DynError::ZeroPower);
    }
    let cross = psi.c0.conj() * psi.c1;
    BlochPoint::new(
        2.0 * cross.re / p,
        2.0 * cross.im / p,
        (psi.c0.norm_sqr() - psi.c1.norm_sqr()) / p,
    )
}

/// Unit-power state at spherical angles `(θ, φ)`:
/// `c0 = cos(θ/2)`, `c1 = e^{iφ} sin(θ/2)`.
pub fn state_from_angles(theta: f64, phi: f64) -> StateVector {
    let half = 0.5 * theta;
    StateVector::new(
        C64::new(half.cos(), 0.0),
        C64::from_polar(half.sin(), phi),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hamiltonian_pure_sigma_x() {
        let h = hamiltonian_from_params(&DriveParams::drive(0.0, 10.0).unwrap()).unwrap();
        let want = Operator2::sigma_x().scale(c(TAU * 10.0, 0.0));
        assert_eq!(h.max_abs_diff(&want), 0.0);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn hamiltonian_pure_sigma_z() {
        // Δ=20, κ=0: H = πΔσz, entries ±2π·10.
        let h = hamiltonian_from_params(&DriveParams::drive(20.0, 0.0).unwrap()).unwrap();
        let want = Operator2::sigma_z().scale(c(TAU * 10.0, 0.0));
        assert_eq!(h.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn hamiltonian_zero_params_is_zero() {
        let h = hamiltonian_from_params(&DriveParams::new(0.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(h.max_abs_diff(&Operator2::zero()), 0.0);
    }

    #[test]
    fn hamiltonian_lossless_matches_pauli_form() {
        let h = hamiltonian_from_params(&DriveParams::drive(7.5, 3.25).unwrap()).unwrap();
        let want = Operator2::sigma_z().scale(c(TAU * 7.5 / 2.0, 0.0))
            + Operator2::sigma_x().scale(c(TAU * 3.25, 0.0));
        assert_eq!(h.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn hamiltonian_rejects_bad_params() {
        assert!(matches!(
            DriveParams::new(f64::NAN, 1.0, 0.0, 0.0),
            Err(DynError::NonFinite("delta", _))
        ));
        assert!(matches!(
            DriveParams::new(0.0, -1.0, 0.0, 0.0),
            Err(DynError::NegativeKappa(_))
        ));
        let bad = DriveParams {
            delta: f64::INFINITY,
            kappa: 1.0,
            gamma1: 0.0,
            gamma2: 0.0,
        };
        assert!(hamiltonian_from_params(&bad).is_err());
    }

    #[test]
    fn pauli_decompose_basis_element() {
        let h = Operator2::sigma_x().scale(c(TAU * 10.0, 0.0));
        let (a0, ax, ay, az) = pauli_decompose(&h);
        assert_eq!(a0, c(0.0, 0.0));
        assert_eq!(ax, c(TAU * 10.0, 0.0));
        assert_eq!(ay, c(0.0, 0.0));
        assert_eq!(az, c(0.0, 0.0));
    }

    #[test]
    fn pauli_decompose_identity() {
        let (a0, ax, ay, az) = pauli_decompose(&Operator2::identity());
        assert_eq!((a0, ax, ay, az), (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn pauli_decompose_lossy_hamiltonian() {
        // Δ=20, κ=10, γ1=γ2=γ: coefficients (−i2πγ, 2π·10, 0, 2π·10).
        // Oracle: solved the 4 linear equations for the coefficients by hand.
        let gamma = 0.7;
        let h =
            hamiltonian_from_params(&DriveParams::new(20.0, 10.0, gamma, gamma).unwrap()).unwrap();
        let (a0, ax, ay, az) = pauli_decompose(&h);
        assert!((a0 - c(0.0, -TAU * gamma)).norm() < 1e-14);
        assert!((ax - c(TAU * 10.0, 0.0)).norm() < 1e-14);
        assert!(ay.norm() < 1e-14);
        assert!((az - c(TAU * 10.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bloch_basis_states() {
        let b0 = bloch_from_state(&StateVector::ket0()).unwrap();
        assert_eq!((b0.x, b0.y, b0.z), (0.0, 0.0, 1.0));
        let b1 = bloch_from_state(&StateVector::ket1()).unwrap();
        assert_eq!((b1.x, b1.y, b1.z), (0.0, 0.0, -1.0));
    }

    #[test]
    fn bloch_quarter_pulse_output() {
        // (1, −i)/√2 lies on the −y axis; evaluated via the Pauli expectations.
        let s = 0.5_f64.sqrt();
        let psi = StateVector::new(c(s, 0.0), c(0.0, -s));
        let b = bloch_from_state(&psi).unwrap();
        assert!(b.x.abs() < 1e-15);
        assert!((b.y + 1.0).abs() < 1e-15);
        assert!(b.z.abs() < 1e-15);
    }

    #[test]
    fn bloch_zero_power_rejected() {
        let zero = StateVector::new(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(bloch_from_state(&zero), Err(DynError::ZeroPower));
    }

    #[test]
    fn angles_at_poles() {
        let top = state_from_angles(0.0, 1.234);
        assert_eq!((top.c0, top.c1.norm()), (c(1.0, 0.0), 0.0));
        let bottom = state_from_angles(PI, 0.0);
        assert!(bottom.c0.norm() < 1e-16);
        assert!((bottom.c1 - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn angles_equator_minus_y() {
        let psi = state_from_angles(PI / 2.0, -PI / 2.0);
        let b = bloch_from_state(&psi).unwrap();
        assert!(b.x.abs() < 1e-12);
        assert!((b.y + 1.0).abs() < 1e-12);
        assert!(b.z.abs() < 1e-12);
    }

    #[test]
    fn phi_convention_at_poles_and_branch() {
        let b = bloch_from_state(&StateVector::ket0()).unwrap();
        assert_eq!(b.phi(), 0.0);
        assert_eq!(b.theta(), 0.0);
        // −x axis maps to φ = +π under the (−π, π] convention.
        let minus_x = BlochPoint::new(-1.0, 0.0, 0.0).unwrap();
        assert_eq!(minus_x.phi(), PI);
        let minus_x_negzero = BlochPoint::new(-1.0, -0.0, 0.0).unwrap();
        assert_eq!(minus_x_negzero.phi(), PI);
    }
}
