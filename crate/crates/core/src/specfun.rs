//! Special functions: complex gamma, Bessel J of complex order, Neumann
//! Y₀/Y₁ and the zeros of J₀/J₁.
//!
//! `J_ν` for complex order is evaluated from its power series with the
//! partial sums carried in double-double precision, so the alternating
//! cancellation for `z` up to ~30 costs no significant digits. Integer
//! orders for `Y` and for zero finding come from Miller's backward
//! recurrence, which is an independent route to the same `J₀`, `J₁`.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dd::{Dd, DdComplex};
use crate::roots::{self, RootError};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

/// Largest `|ν|` the series evaluator accepts.
pub const MAX_ORDER_MAGNITUDE: f64 = 50.0;

const SERIES_REL_TOL: f64 = 1e-17;
const SERIES_MAX_TERMS: usize = 200;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("gamma has a pole at {0}")]
    Pole(f64),
    #[error("argument {0} outside the domain (must be positive)")]
    Domain(f64),
    #[error("order {re}{im:+}i is non-finite or exceeds |nu| <= {max}")]
    Order { re: f64, im: f64, max: f64 },
    #[error("series for J_nu({z}) did not converge in {terms} terms")]
    Range { z: f64, terms: usize },
    #[error(transparent)]
    Root(#[from] RootError),
}

/// A (possibly complex) Bessel order ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexOrder(Complex64);

impl ComplexOrder {
    pub fn new(re: f64, im: f64) -> Result<Self, SpecfunError> {
        let nu = Complex64::new(re, im);
        if !re.is_finite() || !im.is_finite() || nu.norm() > MAX_ORDER_MAGNITUDE {
            return Err(SpecfunError::Order {
                re,
                im,
                max: MAX_ORDER_MAGNITUDE,
            });
        }
        Ok(ComplexOrder(nu))
    }

    pub fn real(nu: f64) -> Result<Self, SpecfunError> {
        Self::new(nu, 0.0)
    }

    pub fn imaginary(nu: f64) -> Result<Self, SpecfunError> {
        Self::new(0.0, nu)
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    fn shifted(self, by: f64) -> Self {
        ComplexOrder(self.0 + by)
    }

    fn conj(self) -> Self {
        ComplexOrder(self.0.conj())
    }

    fn neg(self) -> Self {
        ComplexOrder(-self.0)
    }
}

/// Integer order selector for `Y` and for zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    fn index(self) -> usize {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
        }
    }
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Lanczos sum for `Γ(z+1)` with `Re z ≥ −0.5`.
fn lanczos_gamma_shifted(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let log_pow = (z + 0.5) * t.ln() - t;
    (2.0 * PI).sqrt() * log_pow.exp() * sum
}

/// `Γ(z)` for complex `z`, reflection formula below `Re z = ½`.
pub fn gamma_complex(z: Complex64) -> Result<Complex64, SpecfunError> {
    if is_nonpositive_integer(z) {
        return Err(SpecfunError::Pole(z.re));
    }
    if z.re < 0.5 {
        let s = (PI * z).sin();
        Ok(PI / (s * lanczos_gamma_shifted(-z)))
    } else {
        Ok(lanczos_gamma_shifted(z - 1.0))
    }
}

/// `1/Γ(z)`, an entire function; exact zero at the poles of Γ.
pub fn rgamma_complex(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        (PI * z).sin() * lanczos_gamma_shifted(-z) / PI
    } else {
        1.0 / lanczos_gamma_shifted(z - 1.0)
    }
}

/// `Σ_m (−z²/4)^m / (m! (ν+1)_m)` in double-double precision.
fn bessel_series_sum(nu: Complex64, z: f64) -> Result<Complex64, SpecfunError> {
    let half = Dd::from_f64(0.5 * z);
    let w = -(half * half);
    let nu_re = Dd::from_f64(nu.re);
    let nu_im = Dd::from_f64(nu.im);
    let mut term = DdComplex::ONE;
    let mut sum = DdComplex::ONE;
    for m in 1..=SERIES_MAX_TERMS {
        let md = Dd::from_f64(m as f64);
        let den = DdComplex::new((nu_re + md) * md, nu_im * md);
        term = term.scale(w) / den;
        sum = sum + term;
        // terms shrink monotonically once |m(ν+m)| exceeds z²/4
        let past_peak = (m as f64) * (m as f64 + nu.re) > 0.25 * z * z;
        if past_peak && term.norm() <= SERIES_REL_TOL * sum.norm() {
            return Ok(sum.to_c64());
        }
    }
    Err(SpecfunError::Range {
        z,
        terms: SERIES_MAX_TERMS,
    })
}

/// `J_ν(z)` from the ascending power series, `z > 0`.
pub fn bessel_j(nu: ComplexOrder, z: f64) -> Result<Complex64, SpecfunError> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(SpecfunError::Domain(z));
    }
    let v = nu.value();
    // J_{−n} = (−1)^n J_n; the series has a zero divisor there
    if v.im == 0.0 && v.re < 0.0 && v.re.fract() == 0.0 {
        let j = bessel_j(nu.neg(), z)?;
        let sign = if (v.re as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * j);
    }
    let lead = (v * (0.5 * z).ln()).exp() * rgamma_complex(v + 1.0);
    let sum = bessel_series_sum(v, z)?;
    let mut j = lead * sum;
    if v.im == 0.0 {
        j.im = 0.0;
    }
    Ok(j)
}

/// `J'_ν(z) = (J_{ν−1}(z) − J_{ν+1}(z))/2`.
pub fn bessel_j_prime(nu: ComplexOrder, z: f64) -> Result<Complex64, SpecfunError> {
    let lower = bessel_j(nu.shifted(-1.0), z)?;
    let upper = bessel_j(nu.shifted(1.0), z)?;
    Ok(0.5 * (lower - upper))
}

/// `J_ν(z)` for the conjugate order, via the real-coefficient series.
pub fn bessel_j_conj(nu: ComplexOrder, z: f64) -> Result<Complex64, SpecfunError> {
    bessel_j(nu.conj(), z)
}

/// `J_0(x) … J_{n_max}(x)` by Miller's backward recurrence, normalized with
/// `J₀ + 2ΣJ_{2k} = 1`. Accurate for all real `x`.
pub fn bessel_j_integer_orders(n_max: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    if ax == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    let start = (ax.max(n_max as f64) + 30.0 + 8.0 * ax.cbrt()).ceil() as usize;
    let start = start + start % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1.0;
    for k in (1..=start).rev() {
        vals[k - 1] = (2.0 * k as f64 / ax) * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    vals.truncate(start + 1);
    let mut out: Vec<f64> = vals.iter().map(|v| v / norm).collect();
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out.resize(out.len().max(n_max + 1), 0.0);
    out
}

/// `J₀(x)` or `J₁(x)` for real `x` via backward recurrence.
pub fn bessel_j01(order: BesselOrder, x: f64) -> f64 {
    bessel_j_integer_orders(1, x)[order.index()]
}

/// Neumann functions `Y₀`, `Y₁` from the logarithmic (Neumann) series
/// `Y₀ = (2/π)[ln(z/2)+γ]J₀ − (4/π)Σ(−1)^k J_{2k}/k` and its derivative.
pub fn bessel_y01(order: BesselOrder, z: f64) -> Result<f64, SpecfunError> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(SpecfunError::Domain(z));
    }
    let j = bessel_j_integer_orders(1, z);
    let log_term = (0.5 * z).ln() + EULER_GAMMA;
    let mut acc = 0.0;
    match order {
        BesselOrder::Zero => {
            for k in 1..j.len() / 2 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * j[2 * k] / k as f64;
            }
            Ok(FRAC_2_PI * log_term * j[0] - 2.0 * FRAC_2_PI * acc)
        }
        BesselOrder::One => {
            for k in 1..(j.len() - 1) / 2 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
            }
            Ok(FRAC_2_PI * (log_term * j[1] - j[0] / z + acc))
        }
    }
}

/// n-th positive zero of `J₀` or `J₁`: McMahon estimate, then Brent.
pub fn bessel_zero(order: BesselOrder, n: usize) -> Result<f64, SpecfunError> {
    if n == 0 {
        return Err(SpecfunError::Domain(0.0));
    }
    let nu = order.index() as f64;
    let mu = 4.0 * nu * nu;
    let beta = (n as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * beta;
    let guess = beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
    let f = |x: f64| Ok::<f64, SpecfunError>(bessel_j01(order, x));
    roots::brent(f, guess - 0.3, guess + 0.3, 1e-15)
}

/// Residuals of classical identities, for debugging the kernel.
pub fn identity_residuals() -> Result<Vec<(String, f64)>, SpecfunError> {
    let mut out = Vec::new();
    for z in [0.5, 2.4, 10.0] {
        let j0 = bessel_j01(BesselOrder::Zero, z);
        let j1 = bessel_j01(BesselOrder::One, z);
        let y0 = bessel_y01(BesselOrder::Zero, z)?;
        let y1 = bessel_y01(BesselOrder::One, z)?;
        out.push((
            format!("J1*Y0 - J0*Y1 - 2/(pi z) at z={z}"),
            (j1 * y0 - j0 * y1 - 2.0 / (PI * z)).abs(),
        ));
    }
    for (nu, z) in [(0.5, 3.0), (2.25, 7.0), (4.0, 15.0)] {
        let o = ComplexOrder::real(nu)?;
        let lhs = bessel_j(o.shifted(-1.0), z)? + bessel_j(o.shifted(1.0), z)?;
        let rhs = 2.0 * nu / z * bessel_j(o, z)?;
        out.push((format!("J recurrence at nu={nu}, z={z}"), (lhs - rhs).norm()));
    }
    for z in [Complex64::new(0.3, 0.2), Complex64::new(4.5, -3.0), Complex64::new(-2.5, 0.7)] {
        let g = gamma_complex(z)?;
        let g1 = gamma_complex(z + 1.0)?;
        out.push((format!("Gamma(z+1)/(z Gamma(z)) - 1 at z={z}"), (g1 / (z * g) - 1.0).norm()));
    }
    for (order, n) in [(BesselOrder::Zero, 1), (BesselOrder::One, 1), (BesselOrder::Zero, 2)] {
        let x = bessel_zero(order, n)?;
        let series = bessel_j(ComplexOrder::real(order.index() as f64)?, x)?;
        out.push((format!("series J{}(j_{},{n})", order.index(), order.index()), series.norm()));
    }
    Ok(out)
}
