//! Reference implementations that share no code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_d07b;

/// Cyclic Jacobi on a real symmetric matrix; eigenvalues ascending.
pub fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut a = a.clone();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() < 1e-15 * a.norm().max(1.0) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = 0.5 * (2.0 * a[(p, q)]).atan2(a[(q, q)] - a[(p, p)]);
                let (s, c) = theta.sin_cos();
                let mut g = DMatrix::<f64>::identity(n, n);
                g[(p, p)] = c;
                g[(q, q)] = c;
                g[(p, q)] = s;
                g[(q, p)] = -s;
                a = g.transpose() * a * &g;
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix through its real 2d×2d embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is the original one doubled.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let d = h.nrows();
    let m = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let z = h[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    jacobi_eigenvalues(&m).into_iter().step_by(2).collect()
}

/// `e^{−iHt}ψ` by a Taylor series over steps with `‖H‖·dt ≤ 1/2`.
pub fn taylor_evolve(h: &DMatrix<Complex64>, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
    let norm = h.iter().map(|z| z.norm()).fold(0.0, f64::max) * h.nrows() as f64;
    let steps = ((norm * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mi = Complex64::new(0.0, -dt);
    let mut out = psi.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..60 {
            term = (h * &term) * (mi / k as f64);
            acc += &term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        out = acc;
    }
    out
}

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// `|⟨N|e^{−iHt}|1⟩|²` on a chain with couplings `c√(i(N−i))`: the chain is
/// `2cJ_x` for spin `(N−1)/2`, so the end-to-end amplitude is
/// `(−i sin ct)^{N−1}`.
pub fn spin_rotation_transfer(n: usize, c: f64, t: f64) -> f64 {
    (c * t).sin().powi(2 * (n as i32 - 1))
}

pub fn max_diff(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
