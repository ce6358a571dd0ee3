use proptest::prelude::*;
use qcovert::covertness::*;
use qcovert::gaussian::closed_form_eve_relent;

#[test]
fn constant_examples() {
    let a = a_const(0.1, 1000.0).unwrap();
    assert!((a - 4.0 * 110f64.sqrt() / 0.99).abs() < 1e-12);
    assert!((a - 42.38).abs() < 0.01);
    assert!(a_const(0.1, 1e-12).unwrap() < 1e-4);
    assert!(a_const(1.0, 1.0).is_err());
    // the two-way constant is the one-way one at eta^2
    let one_way = |t: f64, nb: f64| 4.0 * (t * nb * (1.0 + t * nb)).sqrt() / (1.0 - t);
    assert!((a_const(0.3, 7.0).unwrap() - one_way(0.09, 7.0)).abs() < 1e-12);
}

#[test]
fn budget_examples() {
    let b1 = covert_photon_budget(0.1, 1000.0, 0.05, 1e6).unwrap();
    let b4 = covert_photon_budget(0.1, 1000.0, 0.05, 4e6).unwrap();
    assert!((b1.ns_max / b4.ns_max - 2.0).abs() < 1e-12);
    assert!((b1.ns_max - 42.376 * 0.05 / 1000.0).abs() < 1e-5);
    assert!(b1.verified);
    assert!(b1.total_relent_leading <= 8.0 * 0.05 * 0.05 * 1.05);
    assert!(covert_photon_budget(0.1, 1000.0, 0.5, 1e6).is_err());
    assert!(covert_photon_budget(0.1, 1000.0, 0.05, 0.5).is_err());
}

#[test]
fn eve_bound_examples() {
    assert_eq!(eve_error_lower_bound(0.0), 0.5);
    assert!((eve_error_lower_bound(8.0 * 0.05 * 0.05) - 0.45).abs() < 1e-15);
    assert_eq!(eve_error_lower_bound(2.0), 0.0);
}

#[test]
fn fraction_examples() {
    let b = covert_photon_budget(0.1, 1000.0, 0.05, 1e6).unwrap();
    assert!((covert_fraction(0.1, 1000.0, 0.05, 1e6, b.ns_max).unwrap() - 1.0).abs() < 1e-12);
    assert!((covert_fraction(0.1, 1000.0, 0.05, 1e6, 10.0 * b.ns_max).unwrap() - 0.1).abs() < 1e-12);
    assert!((covert_fraction(0.1, 1000.0, 0.05, 1e6, 0.01).unwrap() - 0.2119).abs() < 1e-3);
    assert!(covert_fraction(0.1, 1000.0, 0.05, 1e6, 0.0).is_err());
}

#[test]
fn bit_examples() {
    let eps_free = |n: f64| sqrt_law_bits(0.9, 10.0, 0.05, 0.5, n, 1).unwrap().m_bar as f64;
    assert!((eps_free(4e8) / eps_free(1e8) - 2.0).abs() < 0.01);
    let one = sqrt_law_bits(0.5, 1000.0, 0.05, 0.01, 1e8, 1).unwrap();
    let four = sqrt_law_bits(0.5, 1000.0, 0.05, 0.01, 1e8, 4).unwrap();
    assert!((four.leading / one.leading - 4.0).abs() < 1e-14);
    assert!(four.m_bar > 0 && (four.m_bar as f64) < 1e4);
    let want = 4.0 * 8.0 / (std::f64::consts::PI * std::f64::consts::LN_2) * (1000.0 / 1001.0) * 0.0625 * 0.05 * 1e4 + 0.01f64.log2();
    assert_eq!(four.m_bar, want.floor() as u64);
    assert!(sqrt_law_bits(0.5, 1000.0, 0.05, 0.01, 1e8, 3).is_err());
    assert_eq!(sqrt_law_bits(0.1, 0.1, 0.01, 1e-9, 10.0, 1).unwrap().m_bar, 0);
}

#[test]
fn bits_per_root_n_converge() {
    let target = beta_cov(0.7, 5.0) * 0.05;
    let dev: Vec<f64> = [1e6, 1e8, 1e10]
        .iter()
        .map(|&n| (sqrt_law_bits(0.7, 5.0, 0.05, 1e-3, n, 1).unwrap().m_bar as f64 / n.sqrt() - target).abs())
        .collect();
    assert!(dev[1] < dev[0] && dev[2] < dev[1] && dev[2] < 1e-2 * target);
}

#[test]
fn key_cost_examples() {
    let k = key_cost(1024, false, None, 2).unwrap();
    assert_eq!((k.phase_bits, k.selection_bits, k.total), (1024, 0, 1024));
    let k = key_cost(1024, true, None, 2).unwrap();
    assert_eq!(k.selection_bits, 320);
    let k = key_cost(1024, false, Some(1024), 2).unwrap();
    assert_eq!(k.frame_bits, 1024);
    assert!(key_cost(0, false, None, 2).is_err());
}

#[test]
fn plan_warns_outside_small_signal_regime() {
    let ok = plan_protocol(0.5, 100.0, 0.05, 0.01, 100_000, 10, 2).unwrap();
    assert_eq!(ok.n, 1_000_000);
    assert!(ok.warnings.is_empty(), "{:?}", ok.warnings);
    let loud = plan_protocol(0.5, 100.0, 0.05, 0.01, 1, 100_000, 2).unwrap();
    assert!(loud.warnings.iter().any(|w| w.contains("M*N_S")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn budget_is_achievable(eta in 0.05f64..0.95, nb in 0.1f64..100.0, delta in 0.001f64..0.2, logn in 3.0f64..12.0) {
        let n = 10f64.powf(logn);
        let b = covert_photon_budget(eta, nb, delta, n).unwrap();
        prop_assert!(b.total_relent <= 8.0 * delta * delta * 1.05);
        prop_assert!(eve_error_lower_bound(b.total_relent) >= 0.5 - delta - 1e-9);
    }

    #[test]
    fn budget_is_tight(eta in 0.05f64..0.95, nb in 0.1f64..100.0, logn in 6.0f64..12.0) {
        let (delta, n) = (0.01, 10f64.powf(logn));
        let b = covert_photon_budget(eta, nb, delta, n).unwrap();
        let doubled = n * closed_form_eve_relent(eta, nb, 2.0 * b.ns_max).unwrap();
        prop_assert!(doubled > 8.0 * delta * delta);
    }

    #[test]
    fn bits_depend_only_on_cb_eta4(eta1 in 0.2f64..0.9, nb1 in 0.1f64..50.0, eta2 in 0.2f64..0.9) {
        let cb1 = nb1 / (1.0 + nb1);
        let cb2 = cb1 * (eta1 / eta2).powi(4);
        prop_assume!(cb2 < 0.999);
        let nb2 = cb2 / (1.0 - cb2);
        let a = sqrt_law_bits(eta1, nb1, 0.05, 1e-3, 1e9, 2).unwrap();
        let b = sqrt_law_bits(eta2, nb2, 0.05, 1e-3, 1e9, 2).unwrap();
        prop_assert!((a.leading - b.leading).abs() <= 1e-12 * a.leading);
        prop_assert!(a.m_bar.abs_diff(b.m_bar) <= 1);
    }
}
