use proptest::prelude::*;
use qcovert::fock::{relative_entropy, thermal_state, FockSpace};
use qcovert::gaussian::*;

fn eve(eta: f64, nb: f64, ns: f64, phase: f64) -> GaussianState {
    eve_covariance(&EveChannelInputs { eta, nb, ns, phase }).unwrap()
}

#[test]
fn eve_covariance_examples() {
    // N_S = N_B decouples the pair
    let g = eve(0.3, 2.0, 2.0, 0.4);
    for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        assert!(g.covariance[(i, j)].abs() < 1e-15);
    }
    // substitution: A = 1, B = 0.5/sqrt(2), C = 1.25 at eta=0.5, N_B=1, N_S=0
    let g = eve(0.5, 1.0, 0.0, 0.0);
    assert!((g.covariance[(0, 0)] - 2.0).abs() < 1e-15);
    assert!((g.covariance[(0, 2)] + 2.0 * 0.5 * 0.5f64.sqrt()).abs() < 1e-15);
    assert!((g.covariance[(2, 2)] - 2.5).abs() < 1e-15);
    g.check_uncertainty().unwrap();
    let base = eve(0.4, 3.0, 0.2, 0.0).symplectic_eigenvalues().unwrap();
    for phase in [0.3, 1.7, 3.0] {
        let s = eve(0.4, 3.0, 0.2, phase).symplectic_eigenvalues().unwrap();
        for (a, b) in base.iter().zip(&s) {
            assert!((a - b).abs() < 1e-10);
        }
    }
    assert!(eve_covariance(&EveChannelInputs { eta: 1.0, nb: 1.0, ns: 0.1, phase: 0.0 }).is_err());
}

#[test]
fn relative_entropy_examples() {
    let g = eve(0.5, 1.0, 0.1, 0.0);
    assert!(gaussian_relative_entropy(&g, &g).unwrap().abs() < 1e-10);

    // thermal pair against a Fock-space oracle
    let (n0, n1) = (1.0, 2.0);
    let d = gaussian_relative_entropy(&GaussianState::thermal(n0).unwrap(), &GaussianState::thermal(n1).unwrap()).unwrap();
    let sp = FockSpace::single(80);
    let fock = relative_entropy(&thermal_state(n0, &sp).unwrap(), &thermal_state(n1, &sp).unwrap()).unwrap();
    assert!((d - fock).abs() < 1e-6, "{d} vs {fock}");
    assert!((thermal_relative_entropy(n0, n1).unwrap() - fock).abs() < 1e-6);

    let on = eve(0.5, 1.0, 0.1, 0.0);
    let off = eve(0.5, 1.0, 0.0, 0.0);
    let d = gaussian_relative_entropy(&on, &off).unwrap();
    assert!((d - closed_form_eve_relent(0.5, 1.0, 0.1).unwrap()).abs() < 1e-8);

    // the vacuum is not faithful
    assert!(gaussian_relative_entropy(&GaussianState::thermal(1.0).unwrap(), &GaussianState::vacuum(1)).is_err());
}

#[test]
fn closed_form_examples() {
    assert_eq!(closed_form_eve_relent(0.5, 1.0, 0.0).unwrap(), 0.0);
    let r = closed_form_eve_relent(0.5, 1.0, 1e-4).unwrap() / relent_leading_order(0.5, 1.0, 1e-4).unwrap();
    assert!((r - 1.0).abs() < 0.01);
    assert!(closed_form_eve_relent(0.0, 1.0, 0.1).is_err());
    assert!(closed_form_eve_relent(1.0, 1.0, 0.1).is_err());
    let lead = relent_leading_order(0.5, 1.0, 0.01).unwrap();
    assert!((lead - 0.5625e-4 / 0.625).abs() < 1e-18);
    assert_eq!(relent_leading_order(0.5, 1.0, 0.0).unwrap(), 0.0);
}

#[test]
fn leading_order_convergence_is_geometric() {
    for &(eta, nb) in &[(0.5, 1.0), (0.3, 10.0), (0.8, 0.5)] {
        let dev: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&ns| (closed_form_eve_relent(eta, nb, ns).unwrap() / relent_leading_order(eta, nb, ns).unwrap() - 1.0).abs())
            .collect();
        assert!(dev[1] < dev[0] / 8.0 && dev[2] < dev[1] / 8.0, "{dev:?}");
    }
    // band check where the third-order coefficient is moderate
    for (ns, band) in [(1e-3, 0.03), (1e-4, 0.003), (1e-5, 0.0003)] {
        let r = closed_form_eve_relent(0.5, 1.0, ns).unwrap() / relent_leading_order(0.5, 1.0, ns).unwrap();
        assert!((r - 1.0).abs() < band, "{ns}: {r}");
    }
}

#[test]
fn loss_channel_examples() {
    let g = GaussianState::tmsv(0.4).unwrap();
    assert_eq!(gaussian_loss_channel(&g, 1.0, 3.0, 1).unwrap(), g);
    let v = gaussian_loss_channel(&GaussianState::vacuum(1), 0.0, 2.0, 0).unwrap();
    assert!((v.covariance[(0, 0)] - 5.0).abs() < 1e-15 && v.covariance[(0, 1)].abs() < 1e-15);
    let eta: f64 = 0.6;
    let once = gaussian_loss_channel(&g, eta * eta, 1.5, 1).unwrap();
    let twice = gaussian_loss_channel(&gaussian_loss_channel(&g, eta, 1.5, 1).unwrap(), eta, 1.5, 1).unwrap();
    assert!((once.covariance - twice.covariance).abs().max() < 1e-12);
    assert!(gaussian_loss_channel(&g, 1.2, 0.0, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relent_nonnegative_and_closed_form_below_leading(eta in 0.05f64..0.95, nb in 0.1f64..20.0, ns in 0.0f64..0.1) {
        let d = gaussian_relative_entropy(&eve(eta, nb, ns, 0.3), &eve(eta, nb, 0.0, 0.3)).unwrap();
        prop_assert!(d >= -1e-10);
        let cf = closed_form_eve_relent(eta, nb, ns).unwrap();
        prop_assert!(cf <= relent_leading_order(eta, nb, ns).unwrap() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn data_processing(eta in 0.1f64..0.9, nb in 0.2f64..5.0, ns in 0.001f64..0.5, t in 0.0f64..1.0, nenv in 0.0f64..3.0, mode in 0usize..2) {
        let (on, off) = (eve(eta, nb, ns, 0.0), eve(eta, nb, 0.0, 0.0));
        let before = gaussian_relative_entropy(&on, &off).unwrap();
        let on2 = gaussian_loss_channel(&on, t, nenv, mode).unwrap();
        let off2 = gaussian_loss_channel(&off, t, nenv, mode).unwrap();
        let after = gaussian_relative_entropy(&on2, &off2).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn matches_fock_relative_entropy(n0 in 0.05f64..5.0, n1 in 0.05f64..5.0) {
        // the Fock oracle clamps eigenvalues at 1e-14; skip pairs where rho
        // has visible weight on the clamped tail of sigma
        let (c0, c1) = (n0 / (1.0 + n0), n1 / (1.0 + n1));
        let k_floor = (1e-14 * (1.0 + n1)).ln() / c1.ln();
        prop_assume!(c0.powf(k_floor) < 1e-13);
        let d = gaussian_relative_entropy(&GaussianState::thermal(n0).unwrap(), &GaussianState::thermal(n1).unwrap()).unwrap();
        let sp = FockSpace::single(200);
        let fock = relative_entropy(&thermal_state(n0, &sp).unwrap(), &thermal_state(n1, &sp).unwrap()).unwrap();
        prop_assert!((d - fock).abs() < 1e-6);
    }
}
