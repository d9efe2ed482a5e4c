//! Reflection scans over strength or energy, the near-critical exponential
//! grid, and their CSV/JSON renderings.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::potentials::{Descriptor, Family, Potential, PotentialError, PotentialKind};
use crate::roots;
use crate::scatter::{self, GridConfig, Method, ScatterError};

/// Strengths of the near-critical exponential-well grid (`a = 1`).
pub const TABLE_Q: [f64; 6] = [2.40, 2.404, 2.4048, 2.40482, 2.404825, 2.4048255];
/// Energies of the near-critical exponential-well grid.
pub const TABLE_E: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("scan range must satisfy {requirement}: [{lo}, {hi}]")]
    Range { lo: f64, hi: f64, requirement: &'static str },
    #[error("need at least 2 scan points, got {0}")]
    Points(usize),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    #[serde(rename = "q")]
    Strength,
    #[serde(rename = "E")]
    Energy,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Strength => "q",
            Axis::Energy => "E",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMetadata {
    pub step: f64,
    pub n_slices: usize,
    pub tail_tol: f64,
}

impl GridMetadata {
    pub fn new(p: &Potential, cfg: &GridConfig) -> Self {
        GridMetadata {
            step: cfg.step_for(p),
            n_slices: cfg.slices_for(p),
            tail_tol: cfg.tail_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub x: f64,
    #[serde(rename = "R")]
    pub reflection: f64,
}

/// A grid point lower than both neighbours, refined by golden section
/// inside the two adjacent cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minimum {
    pub grid_index: usize,
    pub grid_x: f64,
    pub x: f64,
    #[serde(rename = "R")]
    pub reflection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub axis: Axis,
    /// The energy for a strength scan, the strength for an energy scan.
    pub fixed_value: f64,
    pub points: Vec<ScanPoint>,
    pub potential: Descriptor,
    pub method: Method,
    pub grid: GridMetadata,
    pub minima: Vec<Minimum>,
}

fn check_range(lo: f64, hi: f64, n: usize, positive: bool) -> Result<(), ScanError> {
    if n < 2 {
        return Err(ScanError::Points(n));
    }
    let ok = lo.is_finite() && hi.is_finite() && lo < hi && (!positive || lo > 0.0);
    if !ok {
        return Err(ScanError::Range {
            lo,
            hi,
            requirement: if positive { "0 < lo < hi" } else { "lo < hi" },
        });
    }
    Ok(())
}

fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

fn evaluate<F>(xs: &[f64], f: F) -> Result<Vec<ScanPoint>, ScanError>
where
    F: Fn(f64) -> Result<f64, ScanError> + Sync,
{
    xs.par_iter()
        .map(|&x| Ok(ScanPoint { x, reflection: f(x)? }))
        .collect()
}

fn refine_minima<F>(points: &[ScanPoint], f: F) -> Result<Vec<Minimum>, ScanError>
where
    F: Fn(f64) -> Result<f64, ScanError> + Sync,
{
    let interior: Vec<usize> = (1..points.len().saturating_sub(1))
        .filter(|&i| {
            let r = points[i].reflection;
            r < points[i - 1].reflection && r < points[i + 1].reflection
        })
        .collect();
    interior
        .par_iter()
        .map(|&i| {
            let (lo, hi) = (points[i - 1].x, points[i + 1].x);
            let (x, r) = roots::golden_section_min(&f, lo, hi, 1e-7 * (hi - lo))?;
            // never report something worse than the grid point itself
            let (x, r) = if r <= points[i].reflection {
                (x, r)
            } else {
                (points[i].x, points[i].reflection)
            };
            Ok(Minimum {
                grid_index: i,
                grid_x: points[i].x,
                x,
                reflection: r,
            })
        })
        .collect()
}

/// `R(q)` at fixed energy on a uniform strength grid.
#[allow(clippy::too_many_arguments)]
pub fn scan_q(
    family: &Family,
    energy: f64,
    q_lo: f64,
    q_hi: f64,
    n_points: usize,
    method: Method,
    cfg: &GridConfig,
) -> Result<ScanTable, ScanError> {
    check_range(q_lo, q_hi, n_points, false)?;
    if q_lo <= family.strength_floor() {
        return Err(ScanError::Range {
            lo: q_lo,
            hi: q_hi,
            requirement: "lo above the zero-depth strength",
        });
    }
    let reference = family.at(q_lo)?;
    let f = |q: f64| -> Result<f64, ScanError> {
        let p = family.at(q)?;
        Ok(scatter::reflect(&p, energy, method, cfg)?.reflection)
    };
    let points = evaluate(&linear_grid(q_lo, q_hi, n_points), f)?;
    let minima = refine_minima(&points, f)?;
    Ok(ScanTable {
        axis: Axis::Strength,
        fixed_value: energy,
        points,
        potential: family.descriptor(),
        method,
        grid: GridMetadata::new(&reference, cfg),
        minima,
    })
}

/// `R(E)` for a fixed well on a linear or logarithmic energy grid.
pub fn scan_e(
    p: &Potential,
    e_lo: f64,
    e_hi: f64,
    n_points: usize,
    log_spacing: bool,
    method: Method,
    cfg: &GridConfig,
) -> Result<ScanTable, ScanError> {
    check_range(e_lo, e_hi, n_points, true)?;
    let grid = if log_spacing {
        log_grid(e_lo, e_hi, n_points)
    } else {
        linear_grid(e_lo, e_hi, n_points)
    };
    let f = |e: f64| -> Result<f64, ScanError> { Ok(scatter::reflect(p, e, method, cfg)?.reflection) };
    let points = evaluate(&grid, f)?;
    let minima = refine_minima(&points, f)?;
    Ok(ScanTable {
        axis: Axis::Energy,
        fixed_value: p.q(),
        points,
        potential: p.descriptor().clone(),
        method,
        grid: GridMetadata::new(p, cfg),
        minima,
    })
}

fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

fn metadata_lines(out: &mut String, potential: &Descriptor, method: Method, grid: &GridMetadata) {
    let _ = writeln!(out, "# potential: {}", potential.to_json());
    let _ = writeln!(out, "# method: {method}");
    let _ = writeln!(
        out,
        "# step: {}, n_slices: {}, tail_tol: {}",
        sci(grid.step),
        grid.n_slices,
        sci(grid.tail_tol)
    );
}

impl ScanTable {
    /// `#` metadata lines, a header row, then one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        metadata_lines(&mut out, &self.potential, self.method, &self.grid);
        let fixed = match self.axis {
            Axis::Strength => "E",
            Axis::Energy => "q",
        };
        let _ = writeln!(out, "# axis: {}, fixed {fixed}: {}", self.axis.label(), sci(self.fixed_value));
        let _ = writeln!(out, "{},R", self.axis.label());
        for pt in &self.points {
            let _ = writeln!(out, "{},{}", sci(pt.x), sci(pt.reflection));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan tables always serialize")
    }

    /// The minima with enough context to stand alone next to a CSV file.
    pub fn minima_json(&self) -> String {
        let sidecar = serde_json::json!({
            "axis": self.axis,
            "fixed_value": self.fixed_value,
            "potential": self.potential,
            "method": self.method,
            "grid": self.grid,
            "minima": self.minima,
        });
        serde_json::to_string_pretty(&sidecar).expect("minima always serialize")
    }
}

/// `R` for the exponential well (`a = 1`) on the near-critical grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub q: Vec<f64>,
    pub energies: Vec<f64>,
    /// `values[i][j]` is `R` at `q[i]`, `energies[j]`.
    #[serde(rename = "R")]
    pub values: Vec<Vec<f64>>,
    pub method: Method,
    pub grid: GridMetadata,
}

pub fn table1(method: Method, cfg: &GridConfig) -> Result<Table, ScanError> {
    let cells: Vec<(usize, usize)> = (0..TABLE_Q.len())
        .flat_map(|i| (0..TABLE_E.len()).map(move |j| (i, j)))
        .collect();
    let flat: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| -> Result<f64, ScanError> {
            let p = Potential::exponential(TABLE_Q[i] * TABLE_Q[i], 1.0)?;
            Ok(scatter::reflect(&p, TABLE_E[j], method, cfg)?.reflection)
        })
        .collect::<Result<_, _>>()?;
    let reference = Potential::exponential(TABLE_Q[0] * TABLE_Q[0], 1.0)?;
    Ok(Table {
        q: TABLE_Q.to_vec(),
        energies: TABLE_E.to_vec(),
        values: flat.chunks(TABLE_E.len()).map(<[f64]>::to_vec).collect(),
        method,
        grid: GridMetadata::new(&reference, cfg),
    })
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let desc = Descriptor::new(PotentialKind::ExponentialWell, &[("a", 1.0)]);
        metadata_lines(&mut out, &desc, self.method, &self.grid);
        out.push('q');
        for e in &self.energies {
            let _ = write!(out, ",R({})", sci(*e));
        }
        out.push('\n');
        for (q, row) in self.q.iter().zip(&self.values) {
            let _ = write!(out, "{}", sci(*q));
            for r in row {
                let _ = write!(out, ",{}", sci(*r));
            }
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = format!("{:<12}", "q \\ E");
        for e in &self.energies {
            let _ = write!(out, "{:>13}", format!("{e:.0e}"));
        }
        out.push('\n');
        for (q, row) in self.q.iter().zip(&self.values) {
            let _ = write!(out, "{:<12}", q);
            for r in row {
                let _ = write!(out, "{:>13}", format!("{r:.4e}"));
            }
            out.push('\n');
        }
        out
    }
}
