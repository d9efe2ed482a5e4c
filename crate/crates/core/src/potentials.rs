//! Catalog of one-dimensional attractive wells.
//!
//! Units are fixed to `2μ = ħ² = 1`, so the Schrödinger equation reads
//! `ψ'' + (E − V)ψ = 0` and the effective strength of a well of depth `V0`
//! and width `a` is `q = a·√V0`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default truncation tolerance for wells that only vanish asymptotically,
/// relative to the depth.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("unknown potential kind `{0}`")]
    UnknownKind(String),
    #[error("missing parameter `{param}` for {kind}")]
    MissingParam { kind: PotentialKind, param: &'static str },
    #[error("parameter `{param}` must be {requirement}, got {value}")]
    InvalidParam {
        param: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("unknown parameter `{param}` for {kind}")]
    UnknownParam { kind: PotentialKind, param: String },
    #[error("give either `V0` or `q`, not both")]
    ConflictingStrength,
    #[error("{0} is analytic-only and has no pointwise value")]
    AnalyticOnly(PotentialKind),
    #[error("malformed potential descriptor: {0}")]
    Descriptor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    SquareWell,
    ExponentialWell,
    SolitonWell,
    ParabolicWell,
    SquareTriangular,
    Sin2Multiwell,
    DeltaWell,
}

impl PotentialKind {
    pub const ALL: [PotentialKind; 7] = [
        PotentialKind::SquareWell,
        PotentialKind::ExponentialWell,
        PotentialKind::SolitonWell,
        PotentialKind::ParabolicWell,
        PotentialKind::SquareTriangular,
        PotentialKind::Sin2Multiwell,
        PotentialKind::DeltaWell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::SquareWell => "square_well",
            PotentialKind::ExponentialWell => "exponential_well",
            PotentialKind::SolitonWell => "soliton_well",
            PotentialKind::ParabolicWell => "parabolic_well",
            PotentialKind::SquareTriangular => "square_triangular",
            PotentialKind::Sin2Multiwell => "sin2_multiwell",
            PotentialKind::DeltaWell => "delta_well",
        }
    }

    /// Name of the parameter a [`Family`] of this kind varies.
    pub fn strength_name(self) -> &'static str {
        match self {
            PotentialKind::SolitonWell => "nu",
            PotentialKind::DeltaWell => "lambda",
            _ => "q",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            PotentialKind::SquareWell | PotentialKind::ExponentialWell => &["V0", "q", "a"],
            PotentialKind::SolitonWell => &["nu"],
            PotentialKind::ParabolicWell => &["V0", "q", "a", "b"],
            PotentialKind::SquareTriangular => &["V0", "q", "a", "alpha"],
            PotentialKind::Sin2Multiwell => &["V0", "q", "a", "m"],
            PotentialKind::DeltaWell => &["lambda"],
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialKind {
    type Err = PotentialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let kind = match norm.as_str() {
            "square_well" | "square" => PotentialKind::SquareWell,
            "exponential_well" | "exponential" | "exp" => PotentialKind::ExponentialWell,
            "soliton_well" | "soliton" | "sech2" => PotentialKind::SolitonWell,
            "parabolic_well" | "parabolic" => PotentialKind::ParabolicWell,
            "square_triangular" => PotentialKind::SquareTriangular,
            "sin2_multiwell" | "sin2" => PotentialKind::Sin2Multiwell,
            "delta_well" | "delta" => PotentialKind::DeltaWell,
            _ => return Err(PotentialError::UnknownKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// JSON descriptor `{"kind": ..., "params": {...}}` used on the command line
/// and echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mirrored: bool,
}

impl Descriptor {
    pub fn new(kind: PotentialKind, params: &[(&str, f64)]) -> Self {
        Descriptor {
            kind: kind.name().to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            mirrored: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, PotentialError> {
        serde_json::from_str(text).map_err(|e| PotentialError::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Square { v0: f64, a: f64 },
    Exponential { v0: f64, a: f64 },
    Soliton { nu: f64 },
    Parabolic { v0: f64, a: f64, b: f64 },
    SquareTriangular { v0: f64, a: f64, alpha: f64 },
    Sin2 { v0: f64, a: f64, m: u32 },
    Delta { lambda: f64 },
}

/// An immutable, catalogued attractive well.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    shape: Shape,
    mirrored: bool,
    descriptor: Descriptor,
}

struct Params<'a> {
    kind: PotentialKind,
    map: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn get(&self, name: &'static str) -> Result<f64, PotentialError> {
        let value = *self.map.get(name).ok_or(PotentialError::MissingParam {
            kind: self.kind,
            param: name,
        })?;
        if !value.is_finite() {
            return Err(PotentialError::InvalidParam {
                param: name,
                requirement: "finite",
                value,
            });
        }
        Ok(value)
    }

    fn positive(&self, name: &'static str) -> Result<f64, PotentialError> {
        let value = self.get(name)?;
        if value <= 0.0 {
            return Err(PotentialError::InvalidParam {
                param: name,
                requirement: "positive",
                value,
            });
        }
        Ok(value)
    }

    /// Depth from either `V0` directly or `q = a√V0`.
    fn depth(&self, a: f64) -> Result<f64, PotentialError> {
        match (self.map.contains_key("V0"), self.map.contains_key("q")) {
            (true, true) => Err(PotentialError::ConflictingStrength),
            (false, true) => {
                let q = self.positive("q")?;
                Ok((q / a) * (q / a))
            }
            _ => self.positive("V0"),
        }
    }
}

/// Builds a potential of `kind` from named parameters.
///
/// Wells with a depth accept either `V0` or the strength `q` (then
/// `V0 = (q/a)²`).
pub fn make_potential(
    kind: PotentialKind,
    params: &BTreeMap<String, f64>,
) -> Result<Potential, PotentialError> {
    for name in params.keys() {
        if !kind.allowed_params().contains(&name.as_str()) {
            return Err(PotentialError::UnknownParam {
                kind,
                param: name.clone(),
            });
        }
    }
    let p = Params { kind, map: params };
    let shape = match kind {
        PotentialKind::SquareWell => {
            let a = p.positive("a")?;
            Shape::Square { v0: p.depth(a)?, a }
        }
        PotentialKind::ExponentialWell => {
            let a = p.positive("a")?;
            Shape::Exponential { v0: p.depth(a)?, a }
        }
        PotentialKind::SolitonWell => {
            let nu = p.get("nu")?;
            if nu <= 1.0 {
                return Err(PotentialError::InvalidParam {
                    param: "nu",
                    requirement: "greater than 1",
                    value: nu,
                });
            }
            Shape::Soliton { nu }
        }
        PotentialKind::ParabolicWell => {
            let a = p.positive("a")?;
            let b = p.positive("b")?;
            Shape::Parabolic { v0: p.depth(a)?, a, b }
        }
        PotentialKind::SquareTriangular => {
            let a = p.positive("a")?;
            let alpha = p.get("alpha")?;
            if !(0.0..=1.0).contains(&alpha) {
                return Err(PotentialError::InvalidParam {
                    param: "alpha",
                    requirement: "within [0, 1]",
                    value: alpha,
                });
            }
            Shape::SquareTriangular { v0: p.depth(a)?, a, alpha }
        }
        PotentialKind::Sin2Multiwell => {
            let a = p.positive("a")?;
            let m = p.get("m")?;
            if m != 1.0 && m != 2.0 {
                return Err(PotentialError::InvalidParam {
                    param: "m",
                    requirement: "1 or 2",
                    value: m,
                });
            }
            Shape::Sin2 { v0: p.depth(a)?, a, m: m as u32 }
        }
        PotentialKind::DeltaWell => Shape::Delta {
            lambda: p.positive("lambda")?,
        },
    };
    Ok(Potential {
        shape,
        mirrored: false,
        descriptor: Descriptor {
            kind: kind.name().to_string(),
            params: params.clone(),
            mirrored: false,
        },
    })
}

impl Potential {
    pub fn from_descriptor(desc: &Descriptor) -> Result<Self, PotentialError> {
        let kind: PotentialKind = desc.kind.parse()?;
        let p = make_potential(kind, &desc.params)?;
        Ok(if desc.mirrored { p.mirrored() } else { p })
    }

    pub fn square(v0: f64, a: f64) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(PotentialKind::SquareWell, &[("V0", v0), ("a", a)]))
    }

    pub fn exponential(v0: f64, a: f64) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(
            PotentialKind::ExponentialWell,
            &[("V0", v0), ("a", a)],
        ))
    }

    pub fn soliton(nu: f64) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(PotentialKind::SolitonWell, &[("nu", nu)]))
    }

    pub fn parabolic(v0: f64, a: f64, b: f64) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(
            PotentialKind::ParabolicWell,
            &[("V0", v0), ("a", a), ("b", b)],
        ))
    }

    pub fn square_triangular(v0: f64, a: f64, alpha: f64) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(
            PotentialKind::SquareTriangular,
            &[("V0", v0), ("a", a), ("alpha", alpha)],
        ))
    }

    pub fn sin2(v0: f64, a: f64, m: u32) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(
            PotentialKind::Sin2Multiwell,
            &[("V0", v0), ("a", a), ("m", m as f64)],
        ))
    }

    pub fn delta(lambda: f64) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(PotentialKind::DeltaWell, &[("lambda", lambda)]))
    }

    pub fn kind(&self) -> PotentialKind {
        match self.shape {
            Shape::Square { .. } => PotentialKind::SquareWell,
            Shape::Exponential { .. } => PotentialKind::ExponentialWell,
            Shape::Soliton { .. } => PotentialKind::SolitonWell,
            Shape::Parabolic { .. } => PotentialKind::ParabolicWell,
            Shape::SquareTriangular { .. } => PotentialKind::SquareTriangular,
            Shape::Sin2 { .. } => PotentialKind::Sin2Multiwell,
            Shape::Delta { .. } => PotentialKind::DeltaWell,
        }
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    /// The same well reflected through the origin, `V(−x)`.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.mirrored = !self.mirrored;
        out.descriptor.mirrored = out.mirrored;
        out
    }

    pub fn is_mirrored(&self) -> bool {
        self.mirrored
    }

    /// Depth `V0`; `ν(ν−1)` for the soliton and `λ` for the delta well.
    pub fn depth(&self) -> f64 {
        match self.shape {
            Shape::Square { v0, .. }
            | Shape::Exponential { v0, .. }
            | Shape::Parabolic { v0, .. }
            | Shape::SquareTriangular { v0, .. }
            | Shape::Sin2 { v0, .. } => v0,
            Shape::Soliton { nu } => nu * (nu - 1.0),
            Shape::Delta { lambda } => lambda,
        }
    }

    /// Width parameter `a` entering `q` (unit for the soliton).
    pub fn width(&self) -> f64 {
        match self.shape {
            Shape::Square { a, .. }
            | Shape::Exponential { a, .. }
            | Shape::Parabolic { a, .. }
            | Shape::SquareTriangular { a, .. }
            | Shape::Sin2 { a, .. } => a,
            Shape::Soliton { .. } => 1.0,
            Shape::Delta { .. } => 0.0,
        }
    }

    /// Shortest length over which the well changes appreciably.
    pub fn length_scale(&self) -> f64 {
        match self.shape {
            Shape::Parabolic { a, b, .. } => a.min(b),
            _ => self.width(),
        }
    }

    /// Effective strength `q = a√V0`; `λ` for the delta well.
    pub fn q(&self) -> f64 {
        match self.shape {
            Shape::Delta { lambda } => lambda,
            _ => self.width() * self.depth().sqrt(),
        }
    }

    pub fn symmetric(&self) -> bool {
        match self.shape {
            Shape::Parabolic { a, b, .. } => a == b,
            Shape::SquareTriangular { alpha, .. } => alpha == 0.0,
            _ => true,
        }
    }

    pub fn is_analytic_only(&self) -> bool {
        matches!(self.shape, Shape::Delta { .. })
    }

    /// Whether the well is exactly zero outside a finite interval.
    pub fn has_finite_support(&self) -> bool {
        !matches!(self.shape, Shape::Exponential { .. } | Shape::Soliton { .. })
    }

    /// Whether the well is constant across its support (exact slicing).
    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self.shape, Shape::Square { .. })
            || matches!(self.shape, Shape::SquareTriangular { alpha, .. } if alpha == 0.0)
    }

    pub fn evaluate(&self, x: f64) -> Result<f64, PotentialError> {
        if self.is_analytic_only() {
            return Err(PotentialError::AnalyticOnly(self.kind()));
        }
        Ok(self.value(x))
    }

    /// Pointwise value without the analytic-only check; zero for the delta well.
    pub(crate) fn value(&self, x: f64) -> f64 {
        let x = if self.mirrored { -x } else { x };
        match self.shape {
            Shape::Square { v0, a } => {
                if x.abs() < a {
                    -v0
                } else {
                    0.0
                }
            }
            Shape::Exponential { v0, a } => -v0 * (-2.0 * x.abs() / a).exp(),
            Shape::Soliton { nu } => {
                let s = 1.0 / x.cosh();
                -nu * (nu - 1.0) * s * s
            }
            Shape::Parabolic { v0, a, b } => {
                if x > -a && x <= 0.0 {
                    -v0 * (1.0 - x * x / (a * a))
                } else if x > 0.0 && x < b {
                    -v0 * (1.0 - x * x / (b * b))
                } else {
                    0.0
                }
            }
            Shape::SquareTriangular { v0, a, alpha } => {
                if x.abs() <= a {
                    -v0 * (1.0 + alpha * (x - a) / (2.0 * a))
                } else {
                    0.0
                }
            }
            Shape::Sin2 { v0, a, m } => {
                if x.abs() < a {
                    let s = (m as f64 * PI * x / a).sin();
                    -v0 * s * s
                } else {
                    0.0
                }
            }
            Shape::Delta { .. } => 0.0,
        }
    }

    /// Support `(−L2, L1)`; beyond it `|V| ≤ tail_tol·V0`.
    pub fn support_bounds(&self, tail_tol: f64) -> (f64, f64) {
        let (left, right) = match self.shape {
            Shape::Square { a, .. } | Shape::SquareTriangular { a, .. } | Shape::Sin2 { a, .. } => {
                (-a, a)
            }
            Shape::Parabolic { a, b, .. } => (-a, b),
            Shape::Exponential { a, .. } => {
                let l = 0.5 * a * (1.0 / tail_tol).ln();
                (-l, l)
            }
            Shape::Soliton { .. } => {
                // sech²L = tol
                let l = (1.0 / tail_tol.sqrt()).acosh();
                (-l, l)
            }
            Shape::Delta { .. } => (0.0, 0.0),
        };
        if self.mirrored {
            (-right, -left)
        } else {
            (left, right)
        }
    }

    /// Interior points where `V` or its derivative is discontinuous.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self.shape {
            Shape::Exponential { .. } | Shape::Parabolic { .. } => vec![0.0],
            _ => Vec::new(),
        }
    }
}

/// A well with everything fixed except its strength.
///
/// For depth-carrying kinds the free parameter is `q` (so `V0 = (q/a)²`);
/// for the soliton it is `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    kind: PotentialKind,
    params: BTreeMap<String, f64>,
}

impl Family {
    pub fn new(kind: PotentialKind, params: &[(&str, f64)]) -> Result<Self, PotentialError> {
        Self::from_descriptor(&Descriptor::new(kind, params))
    }

    /// Any `V0`/`q`/`nu` in the descriptor is dropped.
    pub fn from_descriptor(desc: &Descriptor) -> Result<Self, PotentialError> {
        let kind: PotentialKind = desc.kind.parse()?;
        if kind == PotentialKind::DeltaWell {
            return Err(PotentialError::AnalyticOnly(kind));
        }
        let mut params = desc.params.clone();
        params.remove("V0");
        params.remove("q");
        params.remove("nu");
        let family = Family { kind, params };
        // validate the remaining parameters once
        family.at(family.probe_strength())?;
        Ok(family)
    }

    pub fn square(a: f64) -> Self {
        Self::new(PotentialKind::SquareWell, &[("a", a)]).expect("valid square family")
    }

    pub fn exponential(a: f64) -> Self {
        Self::new(PotentialKind::ExponentialWell, &[("a", a)]).expect("valid exponential family")
    }

    pub fn soliton() -> Self {
        Self::new(PotentialKind::SolitonWell, &[]).expect("valid soliton family")
    }

    pub fn parabolic(a: f64, b: f64) -> Self {
        Self::new(PotentialKind::ParabolicWell, &[("a", a), ("b", b)]).expect("valid parabolic family")
    }

    pub fn square_triangular(a: f64, alpha: f64) -> Result<Self, PotentialError> {
        Self::new(PotentialKind::SquareTriangular, &[("a", a), ("alpha", alpha)])
    }

    pub fn sin2(a: f64, m: u32) -> Result<Self, PotentialError> {
        Self::new(PotentialKind::Sin2Multiwell, &[("a", a), ("m", m as f64)])
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    fn probe_strength(&self) -> f64 {
        if self.kind == PotentialKind::SolitonWell {
            2.0
        } else {
            1.0
        }
    }

    /// Lower end of the meaningful strength range (zero depth).
    pub fn strength_floor(&self) -> f64 {
        if self.kind == PotentialKind::SolitonWell {
            1.0
        } else {
            0.0
        }
    }

    pub fn at(&self, strength: f64) -> Result<Potential, PotentialError> {
        let mut params = self.params.clone();
        params.insert(self.kind.strength_name().to_string(), strength);
        make_potential(self.kind, &params)
    }

    pub fn descriptor(&self) -> Descriptor {
        Descriptor {
            kind: self.kind.name().to_string(),
            params: self.params.clone(),
            mirrored: false,
        }
    }
}
