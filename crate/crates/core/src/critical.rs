//! Half-bound states and critical strengths by zero-energy shooting.
//!
//! A solution started flat at the left edge (`ψ = 1, ψ' = 0`) is integrated
//! to the right edge; the well has a half-bound state exactly when it also
//! arrives flat, so the critical strengths are the roots of `ψ'(L1)` as a
//! function of the strength. Asymmetric wells need no special handling: the
//! left-flat solution is whatever mix of `u` and `v` the well selects.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::Parity;
use crate::potentials::{Family, PotentialError};
use crate::roots::{self, RootError};
use crate::scatter::{self, GridConfig, LeftShot, ScatterError};

/// Bracketing step used when scanning for critical strengths.
pub const SCAN_STEP: f64 = 0.02;
/// Root tolerance on the strength.
pub const ROOT_XTOL: f64 = 1e-10;
/// `|ψ(0)|` or `|ψ'(0)|` below this (with `ψ(L1) = 1`) fixes the parity.
pub const PARITY_TOL: f64 = 1e-8;
/// Largest strength accepted by the spectrum scan.
pub const MAX_STRENGTH: f64 = 30.0;
/// Upper bound on the number of profile samples inside the support.
pub const PROFILE_POINTS: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("no critical point in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("strength {value} must be {requirement}")]
    Strength { value: f64, requirement: String },
    #[error("root polish failed: {0}")]
    Root(RootError),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

impl From<RootError> for CriticalError {
    fn from(e: RootError) -> Self {
        match e {
            RootError::NotBracketed { lo, hi } => CriticalError::NoRoot { lo, hi },
            other => CriticalError::Root(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HbsSample {
    pub x: f64,
    pub psi: f64,
    pub dpsi: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HbsResult {
    pub q_c: f64,
    pub node_count: usize,
    /// Normalised to `ψ(L1) = 1`; finite-support wells are padded with the
    /// flat continuation on both sides.
    pub profile: Vec<HbsSample>,
    pub left_residual: f64,
    pub right_residual: f64,
    /// `None` for asymmetric wells.
    pub parity: Option<Parity>,
    /// `lim_{E→0⁺} r` at this strength, when the boundary data confirm the
    /// half-bound state.
    pub threshold_r: Option<Complex64>,
    pub wronskian_drift: f64,
}

fn check_strength(family: &Family, q: f64) -> Result<(), CriticalError> {
    let floor = family.strength_floor();
    if q.is_finite() && q > floor {
        Ok(())
    } else {
        Err(CriticalError::Strength {
            value: q,
            requirement: format!("greater than {floor}"),
        })
    }
}

fn shoot(family: &Family, q: f64, cfg: &GridConfig, record: bool) -> Result<LeftShot, CriticalError> {
    check_strength(family, q)?;
    let p = family.at(q)?;
    Ok(scatter::shoot_from_left(&p, 0.0, cfg, record)?)
}

/// `ψ'(L1)` for the zero-energy solution with `ψ(−L2) = 1, ψ'(−L2) = 0`.
pub fn hbs_mismatch(family: &Family, q: f64, cfg: &GridConfig) -> Result<f64, CriticalError> {
    Ok(shoot(family, q, cfg, false)?.end.1)
}

fn zero_energy_nodes(shot: &LeftShot) -> usize {
    let samples: Vec<(f64, f64)> = shot.samples.iter().map(|&(x, psi, _)| (x, psi)).collect();
    scatter::count_nodes(&samples)
}

/// Number of bound states at strength `q`: zeros of the left-flat
/// zero-energy solution, including the one its straight-line continuation
/// past `L1` picks up when it heads toward the axis.
pub fn bound_state_count_at(family: &Family, q: f64, cfg: &GridConfig) -> Result<usize, CriticalError> {
    let shot = shoot(family, q, cfg, true)?;
    let (psi, dpsi) = shot.end;
    let tail = usize::from(psi * dpsi < 0.0);
    Ok(zero_energy_nodes(&shot) + tail)
}

/// Root of [`hbs_mismatch`] inside the bracket, with the half-bound state
/// profile and diagnostics.
pub fn find_critical_q(family: &Family, bracket: (f64, f64), cfg: &GridConfig) -> Result<HbsResult, CriticalError> {
    let (lo, hi) = bracket;
    check_strength(family, lo)?;
    check_strength(family, hi)?;
    if lo >= hi {
        return Err(CriticalError::Strength {
            value: lo,
            requirement: format!("below the upper end {hi}"),
        });
    }
    let q_c = roots::brent(|q| hbs_mismatch(family, q, cfg), lo, hi, ROOT_XTOL)?;
    describe(family, q_c, cfg)
}

fn describe(family: &Family, q_c: f64, cfg: &GridConfig) -> Result<HbsResult, CriticalError> {
    let p = family.at(q_c)?;
    let shot = shoot(family, q_c, cfg, true)?;
    let norm = shot.end.0;
    let node_count = zero_energy_nodes(&shot);

    let parity = if p.symmetric() {
        shot.samples
            .iter()
            .find(|s| s.0 == 0.0)
            .and_then(|&(_, psi, dpsi)| {
                if (psi / norm).abs() < PARITY_TOL {
                    Some(Parity::Odd)
                } else if (dpsi / norm).abs() < PARITY_TOL {
                    Some(Parity::Even)
                } else {
                    None
                }
            })
    } else {
        None
    };

    let bd = scatter::integrate_uv(&p, 0.0, cfg)?;
    let threshold_r = scatter::threshold_limit_r(&bd, p.symmetric()).ok();

    let stride = shot.samples.len().div_ceil(PROFILE_POINTS).max(1);
    let last = shot.samples.len() - 1;
    let mut interior: Vec<HbsSample> = shot
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, &(x, psi, dpsi))| HbsSample {
            x,
            psi: psi / norm,
            dpsi: dpsi / norm,
            v: p.value(x),
        })
        .collect();

    let mut profile = Vec::with_capacity(interior.len() * 2);
    if p.has_finite_support() {
        let width = shot.right - shot.left;
        let n_pad = (interior.len() / 4).max(50);
        let first = interior[0];
        let end = *interior.last().unwrap();
        profile.extend((0..n_pad).rev().map(|i| {
            let x = shot.left - width * (i + 1) as f64 / n_pad as f64;
            HbsSample {
                x,
                psi: first.psi + first.dpsi * (x - first.x),
                dpsi: first.dpsi,
                v: 0.0,
            }
        }));
        profile.append(&mut interior);
        profile.extend((0..n_pad).map(|i| {
            let x = shot.right + width * (i + 1) as f64 / n_pad as f64;
            HbsSample {
                x,
                psi: end.psi + end.dpsi * (x - end.x),
                dpsi: end.dpsi,
                v: 0.0,
            }
        }));
    } else {
        profile = interior;
    }

    let first = shot.samples[0];
    Ok(HbsResult {
        q_c,
        node_count,
        profile,
        left_residual: (first.2 / norm).abs(),
        right_residual: (shot.end.1 / norm).abs(),
        parity,
        threshold_r,
        wronskian_drift: shot.drift.max(bd.wronskian_drift),
    })
}

/// All critical strengths up to `q_max`, ascending.
pub fn critical_spectrum(family: &Family, q_max: f64, cfg: &GridConfig) -> Result<Vec<HbsResult>, CriticalError> {
    let floor = family.strength_floor();
    if !(q_max > floor && q_max <= MAX_STRENGTH) {
        return Err(CriticalError::Strength {
            value: q_max,
            requirement: format!("within ({floor}, {MAX_STRENGTH}]"),
        });
    }
    let n = ((q_max - floor) / SCAN_STEP).ceil() as usize + 1;
    let grid: Vec<f64> = (1..=n).map(|i| floor + i as f64 * SCAN_STEP).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&q| hbs_mismatch(family, q, cfg))
        .collect::<Result<_, _>>()?;

    let brackets: Vec<(f64, f64)> = (0..grid.len().saturating_sub(1))
        .filter(|&i| values[i] != 0.0 && (values[i + 1] == 0.0 || values[i].signum() != values[i + 1].signum()))
        .map(|i| (grid[i], grid[i + 1]))
        .collect();
    let mut found: Vec<HbsResult> = brackets
        .par_iter()
        .map(|&b| find_critical_q(family, b, cfg))
        .collect::<Result<_, _>>()?;
    found.retain(|h| h.q_c <= q_max + 1e-6);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_zero, BesselOrder};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg() -> GridConfig {
        GridConfig::default()
    }

    #[test]
    fn mismatch_vanishes_at_known_criticals() {
        assert!(hbs_mismatch(&Family::square(1.0), FRAC_PI_2, &cfg()).unwrap().abs() < 1e-8);
        assert!(hbs_mismatch(&Family::exponential(1.0), 2.404826, &cfg()).unwrap().abs() < 1e-6);
        assert!(hbs_mismatch(&Family::square(1.0), 1.0, &cfg()).unwrap().abs() > 1e-3);
    }

    #[test]
    fn weak_wells_have_no_critical_point() {
        let f = Family::square(1.0);
        assert!(hbs_mismatch(&f, 1e-3, &cfg()).unwrap() < 0.0);
        assert!(hbs_mismatch(&f, 0.5, &cfg()).unwrap() < 0.0);
        assert!(matches!(hbs_mismatch(&f, 0.0, &cfg()), Err(CriticalError::Strength { .. })));
        assert!(matches!(
            find_critical_q(&f, (0.1, 1.0), &cfg()),
            Err(CriticalError::NoRoot { .. })
        ));
    }

    #[test]
    fn square_first_critical() {
        let h = find_critical_q(&Family::square(1.0), (1.0, 2.0), &cfg()).unwrap();
        assert!((h.q_c - FRAC_PI_2).abs() < 1e-8);
        assert_eq!(h.node_count, 1);
        assert_eq!(h.parity, Some(Parity::Odd));
        assert!(h.left_residual <= 1e-8 && h.right_residual <= 1e-8);
        assert!(h.threshold_r.unwrap().norm() == 0.0);
        // plateaus at ±1
        assert!((h.profile[0].psi + 1.0).abs() < 1e-6);
        assert!((h.profile.last().unwrap().psi - 1.0).abs() < 1e-12);
        for s in &h.profile {
            if s.x.abs() <= 1.0 {
                assert!((s.psi - (FRAC_PI_2 * s.x).sin()).abs() < 1e-7, "x = {}", s.x);
            }
        }
    }

    #[test]
    fn exponential_criticals() {
        let f = Family::exponential(1.0);
        let even = find_critical_q(&f, (3.0, 4.5), &cfg()).unwrap();
        assert!((even.q_c - 3.831706).abs() < 1e-5);
        assert_eq!(even.parity, Some(Parity::Even));
        assert_eq!(even.node_count, 2);
        let odd = find_critical_q(&f, (5.0, 6.0), &cfg()).unwrap();
        assert!((odd.q_c - 5.520078).abs() < 1e-5);
        assert_eq!(odd.node_count, 3);
        assert_eq!(odd.parity, Some(Parity::Odd));
    }

    #[test]
    fn profile_plateaus() {
        for (family, bracket) in [
            (Family::square(1.0), (2.5, 3.5)),
            (Family::exponential(1.0), (2.0, 3.0)),
            (Family::parabolic(1.0, 1.1), (2.0, 2.3)),
        ] {
            let h = find_critical_q(&family, bracket, &cfg()).unwrap();
            let n = h.profile.len();
            let edge = n / 20;
            for s in h.profile[..edge].iter().chain(&h.profile[n - edge..]) {
                assert!(s.dpsi.abs() <= 1e-6, "{:?} x = {}: {}", family.kind(), s.x, s.dpsi);
            }
            assert!(h.profile.windows(2).all(|w| w[0].x < w[1].x));
        }
    }

    #[test]
    fn spectra() {
        let sq = critical_spectrum(&Family::square(1.0), 5.0, &cfg()).unwrap();
        let qs: Vec<f64> = sq.iter().map(|h| h.q_c).collect();
        assert_eq!(qs.len(), 3);
        for (n, q) in qs.iter().enumerate() {
            assert!((q - (n + 1) as f64 * FRAC_PI_2).abs() < 1e-8);
        }
        assert_eq!(sq.iter().map(|h| h.node_count).collect::<Vec<_>>(), vec![1, 2, 3]);

        let ex = critical_spectrum(&Family::exponential(1.0), 6.0, &cfg()).unwrap();
        let expected = [
            bessel_zero(BesselOrder::Zero, 1).unwrap(),
            bessel_zero(BesselOrder::One, 1).unwrap(),
            bessel_zero(BesselOrder::Zero, 2).unwrap(),
        ];
        assert_eq!(ex.len(), 3);
        for (h, z) in ex.iter().zip(expected) {
            assert!((h.q_c - z).abs() < 1e-5, "{} vs {z}", h.q_c);
        }
        assert_eq!(ex.iter().map(|h| h.node_count).collect::<Vec<_>>(), vec![1, 2, 3]);

        let sol = critical_spectrum(&Family::soliton(), 4.0, &cfg()).unwrap();
        let nus: Vec<f64> = sol.iter().map(|h| h.q_c).collect();
        assert_eq!(nus.len(), 3, "{nus:?}");
        for (nu, expected) in nus.iter().zip([2.0, 3.0, 4.0]) {
            assert!((nu - expected).abs() < 1e-7);
        }
    }

    #[test]
    fn bound_state_counts() {
        let ex = Family::exponential(1.0);
        // j₀,₁ < 3 < j₁,₁: ground state plus the first odd state
        assert_eq!(bound_state_count_at(&ex, 3.0, &cfg()).unwrap(), 2);
        assert_eq!(bound_state_count_at(&ex, 5.520078, &cfg()).unwrap(), 3);
        assert_eq!(bound_state_count_at(&ex, 1.0, &cfg()).unwrap(), 1);
        // π/2 < 2 < π: even ground state and one odd state
        assert_eq!(bound_state_count_at(&Family::square(1.0), 2.0, &cfg()).unwrap(), 2);
        assert_eq!(bound_state_count_at(&Family::square(1.0), 0.5, &cfg()).unwrap(), 1);
    }

    #[test]
    fn deeper_well_binds_one_more_state() {
        for (family, q_c) in [
            (Family::square(1.0), PI),
            (Family::exponential(1.0), bessel_zero(BesselOrder::One, 1).unwrap()),
        ] {
            let below = bound_state_count_at(&family, q_c - 1e-4, &cfg()).unwrap();
            let above = bound_state_count_at(&family, q_c + 1e-4, &cfg()).unwrap();
            assert_eq!(above, below + 1);
        }
    }

    #[test]
    fn asymmetric_wells_reflect_a_little_at_threshold() {
        for (family, bracket) in [
            (Family::square_triangular(1.0, 1.0).unwrap(), (2.4, 2.7)),
            (Family::parabolic(1.0, 1.1), (2.0, 2.3)),
        ] {
            let h = find_critical_q(&family, bracket, &cfg()).unwrap();
            assert_eq!(h.parity, None);
            let r0 = h.threshold_r.unwrap().norm();
            assert!(r0 > 0.0 && r0 < 1.0, "{:?}: |r(0)| = {r0}", family.kind());
        }
    }
}
