use swtorus_demo::{ConvergenceCurve, MomentProbe, ReducedFlow};

#[test]
fn probe_matches_oracle_and_hamiltonian_identity() {
    let p = MomentProbe::new(&[0.3, -1.2, 0.7, 2.0], &[1.0, 0.5, -0.25, 0.8], 1.7).unwrap();
    for (a, b) in p.mu().iter().zip(p.oracle()) {
        assert!((a - b).abs() < 1e-13);
    }
    assert!(p.pairing().abs() > 0.1);
    assert!(p.defect().abs() < 1e-12);

    // μ(1) = (½, 0, 0)
    let one = MomentProbe::new(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4], 1.0).unwrap();
    assert_eq!(one.mu(), vec![0.5, 0.0, 0.0]);
    assert!(MomentProbe::new(&[1.0, 2.0], &[0.0; 4], 1.0).is_err());
}

#[test]
fn flow_lowers_the_energy() {
    let mut f = ReducedFlow::new(8, 3, 0.1, 0.5, 0.35).unwrap();
    let e0 = f.energy();
    let e1 = f.step(50).unwrap();
    let e2 = f.step(50).unwrap();
    assert!(e1 < e0 && e2 <= e1, "{e0} {e1} {e2}");
    assert_eq!(f.steps(), 100);
    assert_eq!(f.energies().len(), 3);
    assert_eq!(f.spinor_density().len(), 64);
    assert_eq!(f.curvature_density().len(), 64);
    assert!(f.residual().is_finite());
    assert_eq!(f.step(0).unwrap(), e2);
    assert!(ReducedFlow::new(2, 0, 0.1, 0.0, 0.0).is_err());
}

#[test]
fn flow_is_deterministic_in_the_seed() {
    let run = |seed| {
        let mut f = ReducedFlow::new(6, seed, 0.2, 0.5, 0.35).unwrap();
        f.step(20).unwrap();
        f.spinor_density()
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));
}

#[test]
fn convergence_curve_orders() {
    let c = ConvergenceCurve::new("dirac_central", 16).unwrap();
    assert_eq!(c.h(), vec![0.25, 0.125, 0.0625]);
    assert!((c.order() - c.nominal_order()).abs() < 0.2);
    let l = ConvergenceCurve::new("dirac_link", 8).unwrap();
    assert_eq!(l.errors().len(), 2);
    assert!(ConvergenceCurve::new("laplacian", 8).is_err());
    assert!(ConvergenceCurve::new("fhat", 64).is_err());
}
