use serde_json::json;
use std::path::Path;

use super::output::{out_dir, write_document, write_table, Format, Provenance, Table};
use super::*;
use crate::covertness::{covert_photon_budget, eve_error_lower_bound, sqrt_law_bits};
use crate::metrics::{
    beta_col, beta_loc, coherent_closed_forms, error_probability, gain_db, homodyne_exponent, link_budget,
    max_collective_gain, max_local_gain, receiver_report, sc_closed_forms, thermal_occupation, time_bandwidth,
    tmsv_closed_forms, ultimate_bounds,
};
use crate::montecarlo::{exponent_from_error, simulate_coherent_homodyne, simulate_tmsv_local, tmsv_shot_moments, SlotConfig};
use crate::transmitters::{coherent_schmidt, sc_schmidt, tmsv_schmidt, SchmidtData};

type Outcome = std::result::Result<i32, CliError>;

pub(super) fn dispatch(cli: &Cli) -> Outcome {
    let dir = out_dir(cli.out.as_deref());
    let fmt = cli.format;
    match &cli.command {
        Command::Metrics(a) => metrics(a, &dir, fmt.unwrap_or(Format::Csv)),
        Command::Bounds(a) => bounds(a, &dir, fmt.unwrap_or(Format::Csv)),
        Command::Figure3(a) => figure3(a, &dir, fmt.unwrap_or(Format::Csv)),
        Command::Covert(a) => covert(a, &dir),
        Command::Simulate(a) => simulate(a, &dir, fmt.unwrap_or(Format::Csv)),
        Command::Screceiver(a) => screceiver(a, &dir, fmt.unwrap_or(Format::Csv)),
        Command::Linkbudget(a) => linkbudget(a, &dir),
        Command::Selftest(a) => selftest(a),
    }
}

fn report(paths: Vec<std::path::PathBuf>) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn schmidt(t: Transmitter, ns: f64) -> crate::Result<SchmidtData> {
    match t {
        Transmitter::Coherent => coherent_schmidt(ns),
        Transmitter::Tmsv => tmsv_schmidt(ns, None),
        Transmitter::Sc => sc_schmidt(ns),
    }
}

fn check_nb(nb: f64) -> std::result::Result<(), CliError> {
    if !(nb >= 0.0 && nb.is_finite()) {
        return Err(config("--NB must be a finite number >= 0"));
    }
    Ok(())
}

fn metrics(a: &MetricsArgs, dir: &Path, fmt: Format) -> Outcome {
    check_nb(a.nb)?;
    let mut t = Table::new(
        "metrics",
        vec![
            ("NS", "mean signal photons per mode"),
            ("NB", "mean thermal photons per mode"),
            ("beta_col", "collective exponent per eta^2 (BPSK)"),
            ("beta_loc", "local exponent per eta^2 (BPSK)"),
            ("bound_col", "ultimate collective bound per eta^2"),
            ("bound_loc", "ultimate local bound per eta^2"),
            ("gain_col_db", "10 log10(beta_col / coherent beta_col) [dB]"),
            ("gain_loc_db", "10 log10(beta_loc / coherent beta_loc) [dB]"),
        ],
    );
    for ns in a.ns.values() {
        let s = schmidt(a.transmitter, ns)?;
        let r = receiver_report(&s, a.nb);
        t.push(vec![ns, a.nb, r.beta_col, r.beta_loc, r.bound_col, r.bound_loc, r.gain_col_db, r.gain_loc_db]);
    }
    let prov = Provenance::new("metrics", a, None);
    report(write_table(dir, &t, &prov, fmt)?);
    Ok(EXIT_OK)
}

fn bounds(a: &BoundsArgs, dir: &Path, fmt: Format) -> Outcome {
    check_nb(a.nb)?;
    let mut t = Table::new(
        "bounds",
        vec![
            ("NS", "mean signal photons per mode"),
            ("bound_col", "ultimate collective bound per eta^2"),
            ("bound_loc", "ultimate local bound per eta^2"),
            ("coherent_col", "coherent-state collective exponent per eta^2"),
            ("coherent_loc", "coherent-state local exponent per eta^2"),
            ("gain_col", "bound_col / coherent_col (ratio)"),
            ("gain_loc", "bound_loc / coherent_loc (ratio)"),
        ],
    );
    for ns in a.ns.values() {
        if ns < 0.0 {
            return Err(config("--NS must be >= 0"));
        }
        let (uc, ul) = ultimate_bounds(ns, a.nb);
        let (cc, cl) = coherent_closed_forms(ns, a.nb);
        t.push(vec![ns, uc, ul, cc, cl, uc / cc, ul / cl]);
    }
    let prov = Provenance::new("bounds", a, None);
    report(write_table(dir, &t, &prov, fmt)?);
    Ok(EXIT_OK)
}

/// Gain curves at fixed N_B (ratios over the coherent transmitter).
pub fn figure3_gains(nb: f64, ns_values: &[f64]) -> Table {
    let mut t = Table::new(
        "figure3_gain_vs_NS",
        vec![
            ("NS", "mean signal photons per mode"),
            ("g_col_tmsv", "TMSV / coherent collective exponent (ratio)"),
            ("g_loc_tmsv", "TMSV / coherent local exponent (ratio)"),
            ("g_col_sc", "cat / coherent collective exponent (ratio)"),
            ("g_loc_sc", "cat / coherent local exponent (ratio)"),
        ],
    );
    for &ns in ns_values {
        let (cc, cl) = coherent_closed_forms(ns, nb);
        let (tc, tl) = tmsv_closed_forms(ns, nb);
        let (sc, sl) = sc_closed_forms(ns, nb);
        t.push(vec![ns, tc / cc, tl / cl, sc / cc, sl / cl]);
    }
    t
}

pub fn figure3_max_gain(nb_values: &[f64]) -> Table {
    let mut t = Table::new(
        "figure3_max_gain_vs_NB",
        vec![
            ("NB", "mean thermal photons per mode"),
            ("max_gain_col", "(1+sqrt(c_B))^2 (ratio)"),
            ("max_gain_loc", "1+c_B (ratio)"),
            ("max_gain_col_db", "collective maximal gain [dB]"),
            ("max_gain_loc_db", "local maximal gain [dB]"),
        ],
    );
    for &nb in nb_values {
        let (gc, gl) = (max_collective_gain(nb), max_local_gain(nb));
        t.push(vec![nb, gc, gl, gain_db(gc), gain_db(gl)]);
    }
    t
}

fn figure3(a: &Figure3Args, dir: &Path, fmt: Format) -> Outcome {
    check_nb(a.nb)?;
    let ns = a.ns_grid.values();
    if ns.iter().any(|&x| x <= 0.0) {
        return Err(config("--NS-grid values must be > 0"));
    }
    let nbs = a.nb_grid.values();
    if nbs.iter().any(|&x| x < 0.0) {
        return Err(config("--NB-grid values must be >= 0"));
    }
    let prov = Provenance::new("figure3", a, None);
    report(write_table(dir, &figure3_gains(a.nb, &ns), &prov, fmt)?);
    report(write_table(dir, &figure3_max_gain(&nbs), &prov, fmt)?);
    Ok(EXIT_OK)
}

/// Covert budget and bit counts as a JSON value.
pub fn covert_result(a: &CovertArgs) -> crate::Result<serde_json::Value> {
    let b = covert_photon_budget(a.eta, a.nb, a.delta, a.n)?;
    let mut bits = serde_json::Map::new();
    for bd in [1u8, 2, 4] {
        let r = sqrt_law_bits(a.eta, a.nb, a.delta, a.epsilon, a.n, bd)?;
        bits.insert(bd.to_string(), json!({ "m_bar": r.m_bar, "leading": r.leading, "log2_epsilon": r.log2_epsilon }));
    }
    Ok(json!({
        "A": b.a_const,
        "N_S_max": b.ns_max,
        "total_relative_entropy": b.total_relent,
        "total_relative_entropy_leading": b.total_relent_leading,
        "budget_verified": b.verified,
        "eve_error_lower_bound": eve_error_lower_bound(b.total_relent),
        "m_bar_by_beta_det": bits,
    }))
}

fn covert(a: &CovertArgs, dir: &Path) -> Outcome {
    let v = covert_result(a)?;
    let prov = Provenance::new("covert", a, None);
    report(vec![write_document(dir, "covert", &prov, &v)?]);
    Ok(EXIT_OK)
}

fn simulate(a: &SimulateArgs, dir: &Path, fmt: Format) -> Outcome {
    if a.trials < 100 {
        return Err(config("--trials must be >= 100"));
    }
    let mut t = Table::new(
        "simulate",
        vec![
            ("M", "shots per symbol"),
            ("p_err", "empirical bit error rate"),
            ("ci_low", "95% Wilson lower bound"),
            ("ci_high", "95% Wilson upper bound"),
            ("sigma", "binomial standard error"),
            ("p_analytic", "Gaussian-threshold prediction 0.5 erfc(sqrt(x))"),
            ("exponent_est", "per-shot exponent from probit inversion"),
            ("exponent_pred", "predicted per-shot exponent (eta^2 beta)"),
        ],
    );
    for mv in a.m.values() {
        if !(mv >= 1.0) {
            return Err(config("--M values must be >= 1"));
        }
        let m = mv.round() as u64;
        let mut cfg = SlotConfig::new(a.eta, a.ns, a.nb, m, a.seed)?;
        cfg.pad = !a.no_pad;
        let (est, beta) = match a.receiver {
            Receiver::Homodyne => (simulate_coherent_homodyne(&cfg, a.trials)?, homodyne_exponent(a.eta, a.ns, a.nb)),
            Receiver::Tmsv => {
                let (mean, var) = tmsv_shot_moments(a.eta, a.ns, a.nb)?;
                let per_shot = if var > 0.0 { mean * mean / (2.0 * var) } else { 0.0 };
                let beta = if a.eta > 0.0 { per_shot / (a.eta * a.eta) } else { 0.0 };
                (simulate_tmsv_local(&cfg, a.trials)?, beta)
            }
        };
        let ana = error_probability(beta, a.eta, m)?.gaussian_threshold;
        let ex = exponent_from_error(est.p, m).unwrap_or(f64::NAN);
        t.push(vec![m as f64, est.p, est.ci_low, est.ci_high, est.sigma, ana, ex, beta * a.eta * a.eta]);
    }
    let prov = Provenance::new("simulate", a, Some(a.seed));
    report(write_table(dir, &t, &prov, fmt)?);
    Ok(EXIT_OK)
}

fn screceiver(a: &ScReceiverArgs, dir: &Path, fmt: Format) -> Outcome {
    use crate::sc_receiver::{effective_observable, o_opt, optimal_tau_sq, sc_return_state, snr, snr_ratio_formula, squeeze_parameter};
    if !(a.ns > 0.0) || !(a.eta > 0.0 && a.eta < 1.0) {
        return Err(config("--NS > 0 and --eta in (0,1) required"));
    }
    let mut t = Table::new(
        "screceiver",
        vec![
            ("NB", "mean thermal photons per mode"),
            ("tau_sq", "interaction strength squared"),
            ("ratio_numeric", "Fock-simulated SNR / optimal-observable SNR"),
            ("ratio_formula", "small-tau SNR ratio formula"),
            ("relative_error", "ratio_numeric / ratio_formula - 1"),
        ],
    );
    for nb in a.nb.values() {
        let r0 = sc_return_state(a.ns, nb, a.eta, false, a.cutoff, a.tail_tol)?;
        let r1 = sc_return_state(a.ns, nb, a.eta, true, a.cutoff, a.tail_tol)?;
        let d = r0.space.dims()[1];
        let qopt = snr(&r0, &r1, &o_opt(a.ns, d)?);
        for &f in &a.tau_factors {
            let tau2 = f * optimal_tau_sq(a.ns, nb);
            let obs = effective_observable(tau2.sqrt(), squeeze_parameter(a.ns), d)?;
            let num = snr(&r0, &r1, &obs) / qopt;
            let form = snr_ratio_formula(a.ns, nb, tau2.sqrt());
            t.push(vec![nb, tau2, num, form, num / form - 1.0]);
        }
    }
    let prov = Provenance::new("screceiver", a, None);
    report(write_table(dir, &t, &prov, fmt)?);
    Ok(EXIT_OK)
}

pub fn link_result(a: &LinkArgs) -> crate::Result<serde_json::Value> {
    let eta = link_budget(a.range_km, a.loss_db_per_km, a.area_m2)?;
    let nb = thermal_occupation(a.freq_ghz, a.temp_k)?;
    let m = time_bandwidth(a.p_err, eta, a.ns, nb, a.beta_ratio)?;
    Ok(json!({ "eta": eta, "N_B": nb, "M": m }))
}

fn linkbudget(a: &LinkArgs, dir: &Path) -> Outcome {
    let v = link_result(a)?;
    let prov = Provenance::new("linkbudget", a, None);
    report(vec![write_document(dir, "linkbudget", &prov, &v)?]);
    Ok(EXIT_OK)
}

/// One self-test line.
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn selftest_checks(seed: u64) -> Vec<Check> {
    use crate::fock::{chernoff_exponent, coherent_state, qfi_numeric, FockSpace, ThermalLoss, QFI_STEP};
    use crate::gaussian::{closed_form_eve_relent, eve_covariance, gaussian_relative_entropy, EveChannelInputs};
    use crate::linalg::c;
    use crate::sc_receiver::{lindblad_qubit_numeric, lindblad_qubit_propagate, prepare_sc_state, target_sc_state, DecoherenceParams, JCParams, PrepMode, QubitObservable};
    vec![
        check("chernoff pure-state overlap", || {
            let sp = FockSpace::single(30);
            let v = coherent_state(c(0.0), &sp)?.to_density();
            let a = coherent_state(c(1.0), &sp)?.to_density();
            let ch = chernoff_exponent(&v, &a)?;
            Ok(((ch.exponent - 1.0).abs() < 1e-6, format!("C = {}", ch.exponent)))
        }),
        check("qfi coherent vs closed form", || {
            let sp = FockSpace::single(16);
            let coh = coherent_state(c(0.3f64.sqrt()), &sp)?.to_density();
            let fam = |k: f64| ThermalLoss::new(k, 0.5)?.with_port_dim(17).apply(&coh, 0);
            let f = qfi_numeric(fam, QFI_STEP)?.fisher;
            let want = 2.0 * beta_loc(&coherent_schmidt(0.3)?, 0.5);
            Ok(((f - want).abs() / want < 1e-3, format!("F = {f}, 2 beta_loc = {want}")))
        }),
        check("eve relative entropy matrix vs closed form", || {
            let on = eve_covariance(&EveChannelInputs { eta: 0.5, nb: 1.0, ns: 0.1, phase: 0.0 })?;
            let off = eve_covariance(&EveChannelInputs { eta: 0.5, nb: 1.0, ns: 0.0, phase: 0.0 })?;
            let d = gaussian_relative_entropy(&on, &off)?;
            let cf = closed_form_eve_relent(0.5, 1.0, 0.1)?;
            Ok(((d - cf).abs() < 1e-8, format!("{d} vs {cf}")))
        }),
        check("maximal collective gain at N_B = 1", || {
            let g = gain_db(max_collective_gain(1.0));
            Ok(((g - 4.6).abs() <= 0.05, format!("{g} dB")))
        }),
        check("sc closed forms vs Schmidt sums", || {
            let (a, b) = sc_closed_forms(0.05, 3.0);
            let s = sc_schmidt(0.05)?;
            let (x, y) = (beta_col(&s, 3.0), beta_loc(&s, 3.0));
            Ok(((a - x).abs() < 1e-10 && (b - y).abs() < 1e-10, format!("{a} {x} / {b} {y}")))
        }),
        check("homodyne Monte Carlo vs threshold", || {
            let cfg = SlotConfig::new(0.3, 0.5, 2.0, 200, seed)?;
            let e = simulate_coherent_homodyne(&cfg, 20_000)?;
            let p = error_probability(homodyne_exponent(0.3, 0.5, 2.0), 0.3, 200)?.gaussian_threshold;
            let z = (e.p - p) / e.sigma.max(1e-12);
            Ok((z.abs() < 4.0, format!("p = {} vs {p} (z = {z:.2})", e.p)))
        }),
        check("cat preparation fidelity", || {
            let p = prepare_sc_state(0.3, 40, &JCParams::reference(), PrepMode::Ideal)?;
            let f = p.state.fidelity_with_pure(&target_sc_state(0.3, 40)?);
            Ok((f >= 1.0 - 1e-8, format!("1 - F = {:e}", 1.0 - f)))
        }),
        check("qubit decoherence closed forms", || {
            let dp = DecoherenceParams::qubit(0.1, 0.02, 0.05);
            let a = lindblad_qubit_propagate(QubitObservable::Lower, 3.0, &dp)?;
            let b = lindblad_qubit_numeric(&QubitObservable::Lower.matrix(), 3.0, &dp, Default::default())?;
            let d = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok((d < 1e-6, format!("max deviation {d:e}")))
        }),
    ]
}

fn selftest(a: &SelftestArgs) -> Outcome {
    let checks = selftest_checks(a.seed);
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}
