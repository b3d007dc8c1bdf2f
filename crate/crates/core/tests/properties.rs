mod common;

use common::*;
use dotbus::propagator::{eigendecompose, evolve, StateVector};
use dotbus::HermitianMatrix;
use rand::Rng;

const INSTANCES: usize = 100;
const TOL: f64 = 1e-10;

struct Instance {
    decomp: dotbus::propagator::SpectralDecomposition,
    psi: StateVector,
    t1: f64,
    t2: f64,
}

fn instances() -> Vec<Instance> {
    let mut rng = rng();
    (0..INSTANCES)
        .map(|_| {
            let d = rng.gen_range(2..17);
            let h = random_hermitian(&mut rng, d) * num_complex::Complex64::new(rng.gen_range(0.1..5.0), 0.0);
            Instance {
                decomp: eigendecompose(&HermitianMatrix::new(h).unwrap()).unwrap(),
                psi: StateVector::new(random_state(&mut rng, d)).unwrap(),
                t1: rng.gen_range(-10.0..10.0),
                t2: rng.gen_range(-10.0..10.0),
            }
        })
        .collect()
}

#[test]
fn unitarity() {
    for inst in instances() {
        let out = evolve(&inst.decomp, &inst.psi, inst.t1).unwrap();
        assert!((out.norm() - 1.0).abs() < TOL);
    }
}

#[test]
fn composition() {
    for inst in instances() {
        let joint = evolve(&inst.decomp, &inst.psi, inst.t1 + inst.t2).unwrap();
        let mid = evolve(&inst.decomp, &inst.psi, inst.t1).unwrap();
        let split = evolve(&inst.decomp, &mid, inst.t2).unwrap();
        assert!(max_diff(joint.amplitudes(), split.amplitudes()) < TOL);
    }
}

#[test]
fn reversibility() {
    for inst in instances() {
        let fwd = evolve(&inst.decomp, &inst.psi, inst.t1).unwrap();
        let back = evolve(&inst.decomp, &fwd, -inst.t1).unwrap();
        assert!(max_diff(back.amplitudes(), inst.psi.amplitudes()) < TOL);
    }
}

#[test]
fn decompositions_reconstruct() {
    for inst in instances() {
        assert!(inst.decomp.orthonormality_defect() < TOL);
    }
}
