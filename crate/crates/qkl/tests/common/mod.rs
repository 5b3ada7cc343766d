//! Reference implementations that share no code with the library.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// `ln Γ(z)` by upward recurrence to `Re z ≥ 20` followed by the Stirling series.
pub fn stirling_ln_gamma(z: C64) -> C64 {
    let mut z = z;
    let mut shift = C64::new(0.0, 0.0);
    while z.re < 20.0 {
        shift -= z.ln();
        z += 1.0;
    }
    // B_{2n} / (2n(2n-1))
    let coeffs = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0];
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let mut series = C64::new(0.0, 0.0);
    let mut p = zi;
    for a in coeffs {
        series += a * p;
        p *= zi2;
    }
    shift + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

/// `I_ν(r)` for real `r > 0` from the ascending series.
pub fn bessel_i_oracle(r: f64, nu: C64) -> C64 {
    let half = C64::new(r / 2.0, 0.0);
    let mut term = (nu * half.ln() - stirling_ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    for m in 1..200 {
        let m = m as f64;
        term *= half * half / (m * (nu + m));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `K_{ik}(e^x)` from `π(I_{-ik} - I_{ik}) / (2 sin(πik))`.
pub fn bessel_k_oracle(x: f64, k: f64) -> C64 {
    let r = x.exp();
    let nu = C64::new(0.0, k);
    PI * (bessel_i_oracle(r, -nu) - bessel_i_oracle(r, nu)) / (2.0 * (PI * nu).sin())
}

/// `ln γ(z)` from the strip integral, by the trapezoidal rule on `Im t = δ`.
pub fn trapezoid_ln_gamma(z: C64, b: f64) -> C64 {
    let small = b.min(1.0 / b);
    let delta = PI * small / 2.0;
    let rate = 0.5 * (b + 1.0 / b) - z.im.abs();
    let t_max = (45.0 + delta * z.re.abs()) / rate;
    let h = 0.02 * small;
    let n = (t_max / h).ceil() as i64;
    let mut sum = C64::new(0.0, 0.0);
    for j in -n..=n {
        let t = C64::new(j as f64 * h, delta);
        let f = (C64::i() * t * z).exp() / ((t / (2.0 * b)).sinh() * (t * b / 2.0).sinh() * t);
        sum += f;
    }
    0.25 * h * sum
}
