use blochforge::floquet::*;
use blochforge::{StateVector, C64};

fn main() {
    // Criterion 1: threshold
    let th = ep_threshold(8.5, 0.06, 0.5).unwrap();
    println!("dgamma* = {:?}", th.value());

    // Criterion 3 quantities at (8.5, 0.4, 0, 0.06, 0.5)
    let p = FloquetParams::new(8.5, 0.4, 0.0, 0.06, 0.5).unwrap();
    let u = monodromy(&p).unwrap();
    let qe = quasi_energies(&u, p.period).unwrap();
    let growth = (2.0 * qe.max_im_abs() * p.period).exp();
    println!("|lambda_max|^2 = {growth:.12}");

    let n = 45u32;
    let traj = floquet_evolve(&p, n, &StateVector::ket0()).unwrap();
    let pw = stroboscopic_powers(&traj, p.period, n);
    for k in [19usize, 20, 21, 30, 35, 38, 39, 40] {
        let raw = pw[k + 1] / pw[k];
        let diff = (pw[k + 1] - pw[k]) / (pw[k] - pw[k - 1]);
        println!(
            "n={k:2}  raw={raw:.8}  rel_err={:+.3e}   diffratio={diff:.8}  rel_err={:+.3e}",
            raw / growth - 1.0,
            diff / growth - 1.0
        );
    }

    // delta-gamma = 0.1: boundedness + spectral projector bound
    let p2 = FloquetParams::new(8.5, 0.1, 0.0, 0.06, 0.5).unwrap();
    let u2 = monodromy(&p2).unwrap();
    let qe2 = quasi_energies(&u2, p2.period).unwrap();
    println!("dg=0.1: max|Im eps| = {:.3e}", qe2.max_im_abs());
    // spectral projectors P± = (U − λ∓ I)/(λ± − λ∓), 2-norm bounded by Frobenius
    let mean = u2.trace() * 0.5;
    let disc = (mean * mean - u2.det()).sqrt();
    let (l1, l2) = (mean + disc, mean - disc);
    let id = blochforge::Operator2::identity();
    let p_plus = (u2 - id.scale(l2)).scale(C64::new(1.0, 0.0) / (l1 - l2));
    let p_minus = (u2 - id.scale(l1)).scale(C64::new(1.0, 0.0) / (l2 - l1));
    let bound = (p_plus.frobenius_norm() + p_minus.frobenius_norm()).powi(2);
    println!("projector bound on P(nT)/P(0) = {bound:.6}");
    let n2 = 200u32;
    let traj2 = floquet_evolve_sampled(&p2, n2, &StateVector::ket0(), 1e-3).unwrap();
    let pw2 = stroboscopic_powers(&traj2, p2.period, n2);
    let max_ratio = pw2.iter().fold(0.0f64, |m, &x| m.max(x / pw2[0]));
    println!("max_n P(nT)/P(0) over 200 periods = {max_ratio:.6}");
}
