use proptest::prelude::*;
use qcovert::fock::*;
use qcovert::linalg::{c, trace_norm};
use qcovert::C64;

fn coh(alpha: f64, cut: usize) -> DensityOperator {
    coherent_state(c(alpha), &FockSpace::single(cut)).unwrap().to_density()
}

fn thermal(nb: f64, cut: usize) -> DensityOperator {
    thermal_state(nb, &FockSpace::single(cut)).unwrap()
}

#[test]
fn coherent_examples() {
    let vac = coherent_state(c(0.0), &FockSpace::single(10)).unwrap();
    assert!((vac.amplitudes[0].norm() - 1.0).abs() < 1e-15);
    // mean photons by direct summation of Poisson weights
    let psi = coherent_state(c(1.0), &FockSpace::single(20)).unwrap();
    let direct: f64 = psi.amplitudes.iter().enumerate().map(|(k, a)| k as f64 * a.norm_sqr()).sum();
    assert!((direct - 1.0).abs() < 1e-9);
    assert!((psi.mean_photons(0).unwrap() - 1.0).abs() < 1e-9);
    let sp = FockSpace::single(20);
    let plus = coherent_state(c(0.1), &sp).unwrap();
    let minus = coherent_state(c(-0.1), &sp).unwrap();
    assert!((plus.fidelity(&minus) - (-0.04f64).exp()).abs() < 1e-12);
}

#[test]
fn coherent_overflow_is_an_error() {
    assert!(coherent_state(c(4.0), &FockSpace::single(5)).is_err());
}

#[test]
fn thermal_examples() {
    let t = thermal(0.0, 5);
    assert!((t.matrix[(0, 0)].re - 1.0).abs() < 1e-15);
    assert!((thermal(1.0, 60).mean_photons(0).unwrap() - 1.0).abs() < 1e-9);
    let t = thermal(0.5, 60);
    assert!((t.matrix[(0, 0)].re - 2.0 / 3.0).abs() < 1e-12);
    assert!((t.matrix[(1, 1)].re - 2.0 / 9.0).abs() < 1e-12);
    assert!(thermal_state(30.0, &FockSpace::single(10)).is_err());
}

#[test]
fn gaussian_unitary_examples() {
    let rho = coh(0.7, 25);
    let same = rho.apply_gaussian(&GaussianUnitary::Beamsplitter { transmissivity: 1.0, modes: (0, 1) });
    assert!(same.is_err(), "single-mode space has no second mode");

    let psi = coherent_state(c(0.7), &FockSpace::single(25)).unwrap();
    let flipped = psi.apply_gaussian(&GaussianUnitary::Phase { theta: std::f64::consts::PI, mode: 0 }).unwrap();
    let target = coherent_state(c(-0.7), &FockSpace::single(25)).unwrap();
    assert!(flipped.fidelity(&target) > 1.0 - 1e-10);

    let sp = FockSpace::new(25, 2).unwrap();
    let vac = fock_state(0, &FockSpace::single(25)).unwrap();
    let input = psi.tensor(&vac);
    assert_eq!(input.space, sp);
    let id = input.apply_gaussian(&GaussianUnitary::Beamsplitter { transmissivity: 1.0, modes: (0, 1) }).unwrap();
    assert!(id.fidelity(&input) > 1.0 - 1e-12);

    let eta: f64 = 0.36;
    let out = input.apply_gaussian(&GaussianUnitary::Beamsplitter { transmissivity: eta, modes: (0, 1) }).unwrap();
    let a = coherent_state(c(eta.sqrt() * 0.7), &FockSpace::single(25)).unwrap();
    let best = [1.0, -1.0]
        .iter()
        .map(|s| out.fidelity(&a.tensor(&coherent_state(c(s * (1.0 - eta).sqrt() * 0.7), &FockSpace::single(25)).unwrap())))
        .fold(0.0, f64::max);
    assert!(best > 1.0 - 1e-10);
    let total = out.mean_photons(0).unwrap() + out.mean_photons(1).unwrap();
    assert!((total - 0.49).abs() < 1e-9);
}

#[test]
fn partial_trace_examples() {
    let sp = FockSpace::new(1, 2).unwrap();
    let mut v = qcovert::linalg::CVec::zeros(4);
    v[0] = c(0.5f64.sqrt());
    v[3] = c(0.5f64.sqrt());
    let bell = PureState::new(sp, v).unwrap().to_density();
    let r = bell.partial_trace(&[0]).unwrap();
    assert!((r.matrix[(0, 0)].re - 0.5).abs() < 1e-15 && r.matrix[(0, 1)].norm() < 1e-15);
    assert!(bell.partial_trace(&[]).is_err());
    let all = bell.partial_trace(&[0, 1]).unwrap();
    assert!((all.matrix.clone() - bell.matrix.clone()).norm() < 1e-15);

    let ns = 0.3;
    let tmsv = tmsv_state(ns, &FockSpace::new(40, 2).unwrap()).unwrap().to_density();
    let idler = tmsv.partial_trace(&[1]).unwrap();
    let th = thermal(ns, 40);
    assert!((idler.matrix - th.matrix).norm() < 1e-9);
}

#[test]
fn chernoff_examples() {
    let rho = thermal(0.5, 30);
    assert!(chernoff_exponent(&rho, &rho).unwrap().exponent.abs() < 1e-12);
    let c1 = chernoff_exponent(&coh(0.0, 30), &coh(1.0, 30)).unwrap();
    assert!((c1.exponent - 1.0).abs() < 1e-8, "{}", c1.exponent);
}

#[test]
fn helstrom_examples() {
    let rho = coh(0.4, 20);
    assert!((helstrom_error(&rho, &rho).unwrap() - 0.5).abs() < 1e-12);
    let sp = FockSpace::single(3);
    let f0 = fock_state(0, &sp).unwrap().to_density();
    let f1 = fock_state(1, &sp).unwrap().to_density();
    assert!(helstrom_error(&f0, &f1).unwrap().abs() < 1e-12);
    let want = 0.5 * (1.0 - (1.0 - (-0.25f64).exp()).sqrt());
    assert!((helstrom_error(&coh(0.0, 20), &coh(0.5, 20)).unwrap() - want).abs() < 1e-10);
}

#[test]
fn qfi_examples() {
    let fixed = thermal(0.5, 20);
    let f = qfi_numeric(|_| Ok(fixed.clone()), QFI_STEP).unwrap();
    assert!(f.fisher.abs() < 1e-10);
    let disp = qfi_numeric(|k| Ok(coh(k, 20)), QFI_STEP).unwrap();
    assert!((disp.fisher - 4.0).abs() < 1e-6);
}

#[test]
fn qubit_operator_examples() {
    let sz = qubit_fock_operator("sz@I", 3).unwrap();
    for i in 0..6 {
        assert_eq!(sz[(i, i)].re, if i < 3 { -1.0 } else { 1.0 });
    }
    let a = annihilation(3);
    assert!((a[(0, 1)].re - 1.0).abs() < 1e-15 && (a[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
    let op = qubit_fock_operator("0.99*sm@a + 0.01*sm@ad + 0.99*sp@ad + 0.01*sp@a", 6).unwrap();
    assert!((op.clone() - op.adjoint()).norm() < 1e-15);
    assert!((0..12).all(|i| op[(i, i)] == C64::new(0.0, 0.0)));
    assert!(qubit_fock_operator("zz@a", 3).is_err());
    assert!(qubit_fock_operator("sm a", 3).is_err());
}

#[test]
fn tiny_amplitudes_diagonalise() {
    // entries down to ~1e-138 used to break the eigensolver
    let r = coh(0.005, 30);
    assert!(r.min_eigenvalue().abs() < 1e-15);
    let env = thermal_cutoff(0.05, 1e-12, 256).unwrap();
    let l = ThermalLoss::new(0.8, 0.05).unwrap().with_env_cutoff(env.max(30), 1e-12);
    let ch = chernoff_exponent(&l.apply(&coh(0.0, 30), 0).unwrap(), &l.apply(&coh(0.0087, 30), 0).unwrap()).unwrap();
    assert!(ch.exponent > 0.0 && ch.exponent < 1e-4);
}

fn valid(rho: &DensityOperator) -> bool {
    (rho.trace() - 1.0).abs() < 1e-9 && rho.min_eigenvalue() >= -1e-10
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructed_states_are_valid(alpha in 0.0f64..1.5, nb in 0.0f64..2.0, ns in 0.0f64..0.5) {
        prop_assert!(valid(&coh(alpha, 30)));
        prop_assert!(valid(&thermal(nb, 60)));
        prop_assert!(valid(&tmsv_state(ns, &FockSpace::new(30, 2).unwrap()).unwrap().to_density()));
    }

    #[test]
    fn beamsplitter_conserves_photons(a in 0.0f64..1.2, b in 0.0f64..1.2, t in 0.0f64..1.0) {
        let sp = FockSpace::single(24);
        let input = coherent_state(c(a), &sp).unwrap().tensor(&coherent_state(C64::new(0.0, b), &sp).unwrap());
        let out = input.apply_gaussian(&GaussianUnitary::Beamsplitter { transmissivity: t, modes: (0, 1) }).unwrap();
        let before = input.mean_photons(0).unwrap() + input.mean_photons(1).unwrap();
        let after = out.mean_photons(0).unwrap() + out.mean_photons(1).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn chernoff_symmetric_and_bounds(a in 0.0f64..1.0, b in 0.0f64..1.0, nb in 0.05f64..1.0) {
        let cut = 30;
        let env = thermal_cutoff(nb, 1e-12, 256).unwrap();
        let noisy = |alpha: f64| {
            let l = ThermalLoss::new(0.8, nb).unwrap().with_env_cutoff(env.max(cut), 1e-12);
            l.apply(&coh(alpha, cut), 0).unwrap()
        };
        let (r0, r1) = (noisy(a), noisy(b));
        let c01 = chernoff_exponent(&r0, &r1).unwrap().exponent;
        let c10 = chernoff_exponent(&r1, &r0).unwrap().exponent;
        prop_assert!((c01 - c10).abs() < 1e-9);
        let pe = helstrom_error(&r0, &r1).unwrap();
        prop_assert!(0.5 * (-c01).exp() >= pe - 1e-9);
        // Pinsker, natural log
        let d = relative_entropy(&r0, &r1).unwrap();
        let half_norm = 0.5 * trace_norm(&(r0.matrix.clone() - r1.matrix.clone()));
        prop_assert!(half_norm <= (d / 2.0).sqrt() + 1e-9);
    }
}
