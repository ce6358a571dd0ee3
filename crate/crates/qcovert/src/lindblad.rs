//! Lindblad generators and an adaptive Dormand-Prince 5(4) integrator.

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, I};

/// rate · D[op]
#[derive(Clone, Debug)]
pub struct Dissipator {
    pub rate: f64,
    pub op: CMat,
}

/// dρ/dt = −i[H,ρ] + Σ γ (LρL† − ½{L†L, ρ})
pub fn schrodinger_rhs(h: &CMat, ds: &[Dissipator], rho: &CMat) -> CMat {
    let mut out = (h * rho - rho * h) * (-I);
    for d in ds {
        if d.rate == 0.0 {
            continue;
        }
        let l = &d.op;
        let ld = l.adjoint();
        let ldl = &ld * l;
        out += (l * rho * &ld - (&ldl * rho + rho * &ldl) * c(0.5)) * c(d.rate);
    }
    out
}

/// dO/dt = i[H,O] + Σ γ (L†OL − ½{L†L, O})
pub fn adjoint_rhs(h: &CMat, ds: &[Dissipator], o: &CMat) -> CMat {
    let mut out = (h * o - o * h) * I;
    for d in ds {
        if d.rate == 0.0 {
            continue;
        }
        let l = &d.op;
        let ld = l.adjoint();
        let ldl = &ld * l;
        out += (&ld * o * l - (&ldl * o + o * &ldl) * c(0.5)) * c(d.rate);
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates dX/dt = f(X) (autonomous) from 0 to `t`.
pub fn integrate<F>(f: F, x0: &CMat, t: f64, tol: Tolerances) -> Result<CMat>
where
    F: Fn(&CMat) -> CMat,
{
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let mut x = x0.clone();
    let mut now = 0.0;
    let mut h = (t / 100.0).min(0.1).max(1e-6 * t);
    let mut k1 = f(&x);
    let mut steps = 0usize;
    while now < t {
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::Convergence("Lindblad integration took too many steps".into()));
        }
        if now + h > t {
            h = t - now;
        }
        let k2 = f(&(&x + &k1 * c(h * A21)));
        let k3 = f(&(&x + (&k1 * c(A31) + &k2 * c(A32)) * c(h)));
        let k4 = f(&(&x + (&k1 * c(A41) + &k2 * c(A42) + &k3 * c(A43)) * c(h)));
        let k5 = f(&(&x + (&k1 * c(A51) + &k2 * c(A52) + &k3 * c(A53) + &k4 * c(A54)) * c(h)));
        let k6 = f(&(&x + (&k1 * c(A61) + &k2 * c(A62) + &k3 * c(A63) + &k4 * c(A64) + &k5 * c(A65)) * c(h)));
        let xn = &x + (&k1 * c(B1) + &k3 * c(B3) + &k4 * c(B4) + &k5 * c(B5) + &k6 * c(B6)) * c(h);
        let k7 = f(&xn);
        let err = (&k1 * c(E1) + &k3 * c(E3) + &k4 * c(E4) + &k5 * c(E5) + &k6 * c(E6) + &k7 * c(E7)) * c(h);
        let mut e = 0.0f64;
        for (ei, (xi, yi)) in err.iter().zip(x.iter().zip(xn.iter())) {
            let sc = tol.atol + tol.rtol * xi.norm().max(yi.norm());
            e = e.max(ei.norm() / sc);
        }
        if e <= 1.0 {
            now += h;
            x = xn;
            k1 = k7;
        }
        let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(x)
}
