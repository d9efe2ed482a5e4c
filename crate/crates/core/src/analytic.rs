//! Closed-form reflection, bound states and half-bound states for the
//! exactly solvable wells: square, exponential, soliton (`sech²`) and delta.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::potentials::{Potential, PotentialKind};
use crate::roots::{self, RootError};
use crate::specfun::{
    self, bessel_j, bessel_j01, bessel_j_prime, bessel_y01, BesselOrder, ComplexOrder, SpecfunError,
};

/// Largest `ka` for which the threshold form of the exponential-well
/// amplitude is accepted.
pub const THRESHOLD_KA_MAX: f64 = 0.05;

/// Tolerance for treating `q` as exactly `nπ/2` in the square-well limit.
pub const SQUARE_CRITICAL_TOL: f64 = 1e-12;

/// Bound-state roots with `κa` below this are reported as threshold
/// (half-bound) states rather than bound states.
pub const THRESHOLD_KAPPA_A: f64 = 1e-6;

const KAPPA_SCAN_STEP: f64 = 0.01;
const DEGENERACY_TOL: f64 = 1e-14;
const EXP_Q_MAX: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("{what} must be {requirement}, got {value}")]
    InvalidInput {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("E = 0 is a limit; use the threshold-limit function")]
    ZeroEnergy,
    #[error("vanishing Bessel denominator at E = {energy}; perturb the energy")]
    Degenerate { energy: f64 },
    #[error("threshold form needs 0 < ka <= {max}, got ka = {ka}")]
    Validity { ka: f64, max: f64 },
    #[error("q = {q} is not within {tol} of a zero of J0 or J1")]
    NotCritical { q: f64, tol: f64 },
    #[error("no closed form for {0}")]
    Unsupported(PotentialKind),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

impl From<RootError> for AnalyticError {
    fn from(e: RootError) -> Self {
        AnalyticError::Specfun(SpecfunError::Root(e))
    }
}

fn require(what: &'static str, requirement: &'static str, value: f64, ok: bool) -> Result<(), AnalyticError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::InvalidInput {
            what,
            requirement,
            value,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// `k = √E` above threshold, `κ = √(−E)` below; `ε = E/V0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveNumbers {
    pub energy: f64,
    pub k: Option<f64>,
    pub kappa: Option<f64>,
    pub epsilon: f64,
}

impl WaveNumbers {
    pub fn new(energy: f64, v0: f64) -> Self {
        let (k, kappa) = if energy > 0.0 {
            (Some(energy.sqrt()), None)
        } else if energy < 0.0 {
            (None, Some((-energy).sqrt()))
        } else {
            (Some(0.0), None)
        };
        WaveNumbers {
            energy,
            k,
            kappa,
            epsilon: energy / v0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSpectrum {
    /// Ascending, all negative.
    pub energies: Vec<f64>,
    pub parities: Vec<Parity>,
    pub count: usize,
    /// Parity of a state sitting at `E = 0`, if the well is critical.
    pub threshold: Option<Parity>,
}

/// Square well `V(|x|<a) = −V0`:
/// `R = sin²(2q√(1+ε)) / [4ε(ε+1) + sin²(2q√(1+ε))]`.
pub fn square_well_r(energy: f64, v0: f64, a: f64) -> Result<f64, AnalyticError> {
    if energy == 0.0 {
        return Err(AnalyticError::ZeroEnergy);
    }
    require("E", "positive", energy, energy > 0.0)?;
    require("V0", "positive", v0, v0 > 0.0)?;
    require("a", "positive", a, a > 0.0)?;
    let eps = energy / v0;
    let q = a * v0.sqrt();
    let s = (2.0 * q * (1.0 + eps).sqrt()).sin();
    let s2 = s * s;
    Ok(s2 / (4.0 * eps * (eps + 1.0) + s2))
}

/// `lim_{E→0⁺} R` for the square well: 0 at `q = nπ/2` (n ≥ 1), else 1.
pub fn square_well_r0_limit(q: f64) -> f64 {
    let n = (q / FRAC_PI_2).round();
    if n >= 1.0 && (q - n * FRAC_PI_2).abs() <= SQUARE_CRITICAL_TOL {
        0.0
    } else {
        1.0
    }
}

/// Zero-energy half-bound state of the square well at `q = nπ/2`, unit
/// amplitude. Odd `n`: `sin(nπx/2a)` inside, `sgn(x)·sin(nπ/2)` outside;
/// even `n`: `cos(nπx/2a)` inside, `cos(nπ/2)` outside.
pub fn square_well_hbs(n: u32, a: f64, xs: &[f64]) -> Result<Vec<f64>, AnalyticError> {
    require("n", "at least 1", n as f64, n >= 1)?;
    require("a", "positive", a, a > 0.0)?;
    let arg = n as f64 * PI / (2.0 * a);
    let odd = n % 2 == 1;
    Ok(xs
        .iter()
        .map(|&x| {
            let inside = x.abs() < a;
            let xe = if inside { x } else { a * x.signum() };
            if odd {
                (arg * xe).sin()
            } else {
                (arg * xe).cos()
            }
        })
        .collect())
}

struct ExpWellInputs {
    q: f64,
    ka: f64,
}

fn exp_inputs(energy: f64, v0: f64, a: f64) -> Result<ExpWellInputs, AnalyticError> {
    if energy == 0.0 {
        return Err(AnalyticError::ZeroEnergy);
    }
    require("E", "positive", energy, energy > 0.0)?;
    require("V0", "positive", v0, v0 > 0.0)?;
    require("a", "positive", a, a > 0.0)?;
    let q = a * v0.sqrt();
    require("q", "at most 30", q, q <= EXP_Q_MAX)?;
    Ok(ExpWellInputs {
        q,
        ka: energy.sqrt() * a,
    })
}

/// Bracketed part of the exponential-well amplitude,
/// `−½[J_{ika}(q)/J_{−ika}(q) + J'_{ika}(q)/J'_{−ika}(q)]`.
///
/// Differs from [`exp_well_r_exact`] only by the unit-modulus factor
/// `(q/2)^{−2ika} Γ(1+ika)/Γ(1−ika)`.
pub fn exp_well_r_reduced(energy: f64, v0: f64, a: f64) -> Result<Complex64, AnalyticError> {
    let ExpWellInputs { q, ka } = exp_inputs(energy, v0, a)?;
    let plus = ComplexOrder::imaginary(ka)?;
    let minus = ComplexOrder::imaginary(-ka)?;
    let j_plus = bessel_j(plus, q)?;
    let j_minus = bessel_j(minus, q)?;
    let dj_plus = bessel_j_prime(plus, q)?;
    let dj_minus = bessel_j_prime(minus, q)?;
    if j_minus.norm() < DEGENERACY_TOL || dj_minus.norm() < DEGENERACY_TOL {
        return Err(AnalyticError::Degenerate { energy });
    }
    Ok(-0.5 * (j_plus / j_minus + dj_plus / dj_minus))
}

/// Exact reflection amplitude of `V = −V0·exp(−2|x|/a)`:
/// `r = −½ (q/2)^{−2ika} [Γ(1+ika)/Γ(1−ika)] [J_{ika}/J_{−ika} + J'_{ika}/J'_{−ika}]`.
pub fn exp_well_r_exact(energy: f64, v0: f64, a: f64) -> Result<Complex64, AnalyticError> {
    let reduced = exp_well_r_reduced(energy, v0, a)?;
    Ok(exp_well_phase(energy, v0, a)? * reduced)
}

/// The unit-modulus prefactor `(q/2)^{−2ika} Γ(1+ika)/Γ(1−ika)`.
pub fn exp_well_phase(energy: f64, v0: f64, a: f64) -> Result<Complex64, AnalyticError> {
    let ExpWellInputs { q, ka } = exp_inputs(energy, v0, a)?;
    let nu = Complex64::new(0.0, ka);
    let power = (-2.0 * nu * (0.5 * q).ln()).exp();
    let ratio = specfun::gamma_complex(1.0 + nu)? / specfun::gamma_complex(1.0 - nu)?;
    Ok(power * ratio)
}

/// Threshold form of the exponential-well amplitude, from
/// `J_ν ≈ J₀ + ν(π/2)Y₀` at small order ν = ±ika:
/// `r ≈ −½[(J₀ + iβY₀)/(J₀ − iβY₀) + (J₁ + iβY₁)/(J₁ − iβY₁)]`, `β = (π/2)ka`.
pub fn exp_well_r_threshold(energy: f64, v0: f64, a: f64) -> Result<Complex64, AnalyticError> {
    let ExpWellInputs { q, ka } = exp_inputs(energy, v0, a)?;
    if ka > THRESHOLD_KA_MAX {
        return Err(AnalyticError::Validity {
            ka,
            max: THRESHOLD_KA_MAX,
        });
    }
    let beta = FRAC_PI_2 * ka;
    let j0 = bessel_j01(BesselOrder::Zero, q);
    let j1 = bessel_j01(BesselOrder::One, q);
    let y0 = bessel_y01(BesselOrder::Zero, q)?;
    let y1 = bessel_y01(BesselOrder::One, q)?;
    let frac = |j: f64, y: f64| Complex64::new(j, beta * y) / Complex64::new(j, -beta * y);
    Ok(-0.5 * (frac(j0, y0) + frac(j1, y1)))
}

fn real_j(nu: f64, q: f64) -> Result<f64, AnalyticError> {
    Ok(bessel_j(ComplexOrder::real(nu)?, q)?.re)
}

fn real_j_prime(nu: f64, q: f64) -> Result<f64, AnalyticError> {
    Ok(bessel_j_prime(ComplexOrder::real(nu)?, q)?.re)
}

/// Bound states of the exponential well: even levels from `J'_{κa}(q) = 0`,
/// odd levels from `J_{κa}(q) = 0`, `E = −κ²`.
pub fn exp_well_bound_states(q: f64, a: f64) -> Result<BoundSpectrum, AnalyticError> {
    require("q", "within (0, 30]", q, q > 0.0 && q <= EXP_Q_MAX)?;
    require("a", "positive", a, a > 0.0)?;
    let mut grid = vec![THRESHOLD_KAPPA_A];
    let steps = (q / KAPPA_SCAN_STEP).floor() as usize;
    grid.extend((1..=steps).map(|i| i as f64 * KAPPA_SCAN_STEP));
    if *grid.last().unwrap() < q {
        grid.push(q);
    }

    let mut levels: Vec<(f64, Parity)> = Vec::new();
    type Condition = fn(f64, f64) -> Result<f64, AnalyticError>;
    let conditions: [(Parity, Condition); 2] = [(Parity::Even, real_j_prime), (Parity::Odd, real_j)];
    for (parity, cond) in conditions {
        let values: Vec<f64> = grid.iter().map(|&nu| cond(nu, q)).collect::<Result<_, _>>()?;
        for i in 0..grid.len() - 1 {
            let (f0, f1) = (values[i], values[i + 1]);
            if f0 == 0.0 || f0.signum() != f1.signum() && f1 != 0.0 {
                let nu = roots::brent(|nu| cond(nu, q), grid[i], grid[i + 1], 1e-12)?;
                levels.push((nu, parity));
            }
        }
    }
    levels.sort_by(|x, y| y.0.total_cmp(&x.0));

    let threshold = if bessel_j01(BesselOrder::Zero, q).abs() < THRESHOLD_KAPPA_A {
        Some(Parity::Odd)
    } else if bessel_j01(BesselOrder::One, q).abs() < THRESHOLD_KAPPA_A {
        Some(Parity::Even)
    } else {
        None
    };
    Ok(BoundSpectrum {
        energies: levels.iter().map(|(nu, _)| -(nu / a) * (nu / a)).collect(),
        parities: levels.iter().map(|(_, p)| *p).collect(),
        count: levels.len(),
        threshold,
    })
}

const HBS_CRITICAL_TOL: f64 = 1e-6;

/// Parity of the half-bound state at `q`, if `q` is within `1e−6` of a zero
/// of `J₀` (odd) or `J₁` (even).
pub fn exp_well_critical_parity(q: f64) -> Result<Option<Parity>, AnalyticError> {
    for n in 1..=20 {
        if (q - specfun::bessel_zero(BesselOrder::Zero, n)?).abs() <= HBS_CRITICAL_TOL {
            return Ok(Some(Parity::Odd));
        }
        if (q - specfun::bessel_zero(BesselOrder::One, n)?).abs() <= HBS_CRITICAL_TOL {
            return Ok(Some(Parity::Even));
        }
    }
    Ok(None)
}

/// Half-bound state of the exponential well at a critical `q_c`:
/// `sgn(x)·J₀(q_c e^{−|x|/a})` at a zero of `J₀`, `J₀(q_c e^{−|x|/a})` at a
/// zero of `J₁`.
pub fn exp_well_hbs(q_c: f64, a: f64, xs: &[f64]) -> Result<Vec<f64>, AnalyticError> {
    require("a", "positive", a, a > 0.0)?;
    let parity = exp_well_critical_parity(q_c)?.ok_or(AnalyticError::NotCritical {
        q: q_c,
        tol: HBS_CRITICAL_TOL,
    })?;
    Ok(xs
        .iter()
        .map(|&x| {
            let j = bessel_j01(BesselOrder::Zero, q_c * (-x.abs() / a).exp());
            match parity {
                Parity::Odd => x.signum() * j,
                Parity::Even => j,
            }
        })
        .collect())
}

/// `V = −ν(ν−1)sech²x`: `R = sin²νπ / (sin²νπ + sinh²πk)`.
pub fn soliton_r(energy: f64, nu: f64) -> Result<f64, AnalyticError> {
    if energy == 0.0 {
        return Err(AnalyticError::ZeroEnergy);
    }
    require("E", "positive", energy, energy > 0.0)?;
    require("nu", "greater than 1", nu, nu > 1.0)?;
    // reduce first so integer ν gives an exact zero
    let s = (PI * (nu - nu.round())).sin();
    let s2 = s * s;
    let sh = (PI * energy.sqrt()).sinh();
    Ok(s2 / (s2 + sh * sh))
}

/// Delta well `−λδ(x)`: `R = λ²/(λ² + 4E)`, so `R(0) = 1`.
pub fn delta_well_r(energy: f64, lambda: f64) -> Result<f64, AnalyticError> {
    require("E", "non-negative", energy, energy >= 0.0)?;
    require("lambda", "positive", lambda, lambda > 0.0)?;
    Ok(lambda * lambda / (lambda * lambda + 4.0 * energy))
}

/// Closed-form `R(E)` for the wells that have one.
pub fn reflection_probability(p: &Potential, energy: f64) -> Result<f64, AnalyticError> {
    match p.kind() {
        PotentialKind::SquareWell => square_well_r(energy, p.depth(), p.width()),
        PotentialKind::ExponentialWell => Ok(exp_well_r_reduced(energy, p.depth(), p.width())?.norm_sqr()),
        PotentialKind::SolitonWell => {
            let nu = 0.5 + (0.25 + p.depth()).sqrt();
            soliton_r(energy, nu)
        }
        PotentialKind::DeltaWell => delta_well_r(energy, p.depth()),
        kind => Err(AnalyticError::Unsupported(kind)),
    }
}

/// Test states of `V = −2sech²x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sech2State {
    /// `sech x`
    Ground,
    /// `tanh x`
    HalfBound,
}

/// `max |ψ'' + (E − V)ψ|` over the samples for `V = −2sech²x`, with exact
/// second derivatives.
pub fn sech2_residual(state: Sech2State, energy: f64, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| {
            let sech = 1.0 / x.cosh();
            let tanh = x.tanh();
            let v = -2.0 * sech * sech;
            let (psi, psi_dd) = match state {
                Sech2State::Ground => (sech, sech * (tanh * tanh - sech * sech)),
                Sech2State::HalfBound => (tanh, -2.0 * sech * sech * tanh),
            };
            (psi_dd + (energy - v) * psi).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sech2Residuals {
    /// `sech x` at `E = −1`.
    pub ground: f64,
    /// `tanh x` at `E = 0`.
    pub half_bound: f64,
}

pub fn sech2_groundstate_check(xs: &[f64]) -> Sech2Residuals {
    Sech2Residuals {
        ground: sech2_residual(Sech2State::Ground, -1.0, xs),
        half_bound: sech2_residual(Sech2State::HalfBound, 0.0, xs),
    }
}
