use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficient law `y ↦ a(y)` of the isotropic operator `−div(a(u)∇u)`.
#[derive(Clone)]
pub enum LawKind {
    Constant(f64),
    /// Porous-media permeability `κ(q) = 1 + s q²/(1 + q²)`.
    Porous { strength: f64 },
    /// `a(y) = y`. Not elliptic on ranges reaching zero.
    Identity,
    Custom { name: String, coefficient: ScalarFn, derivative: ScalarFn },
}

impl fmt::Debug for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Porous { strength } => write!(f, "Porous {{ strength: {strength} }}"),
            Self::Identity => write!(f, "Identity"),
            Self::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiffusionLaw {
    pub kind: LawKind,
    /// Declared ellipticity floor ν.
    pub floor: f64,
    /// Declared ceiling Λ.
    pub ceiling: f64,
}

impl DiffusionLaw {
    pub fn constant(value: f64) -> Self {
        Self { kind: LawKind::Constant(value), floor: value, ceiling: value }
    }

    pub fn porous(strength: f64) -> Self {
        Self { kind: LawKind::Porous { strength }, floor: 1.0, ceiling: 1.0 + strength }
    }

    pub fn identity(floor: f64, ceiling: f64) -> Self {
        Self { kind: LawKind::Identity, floor, ceiling }
    }

    pub fn custom(
        name: impl Into<String>,
        coefficient: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        floor: f64,
        ceiling: f64,
    ) -> Self {
        Self {
            kind: LawKind::Custom {
                name: name.into(),
                coefficient: Arc::new(coefficient),
                derivative: Arc::new(derivative),
            },
            floor,
            ceiling,
        }
    }

    pub fn coefficient(&self, y: f64) -> f64 {
        match &self.kind {
            LawKind::Constant(c) => *c,
            LawKind::Porous { strength } => {
                let y2 = y * y;
                1.0 + strength * y2 / (1.0 + y2)
            }
            LawKind::Identity => y,
            LawKind::Custom { coefficient, .. } => coefficient(y),
        }
    }

    pub fn derivative(&self, y: f64) -> f64 {
        match &self.kind {
            LawKind::Constant(_) => 0.0,
            LawKind::Porous { strength } => {
                let d = 1.0 + y * y;
                2.0 * strength * y / (d * d)
            }
            LawKind::Identity => 1.0,
            LawKind::Custom { derivative, .. } => derivative(y),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, LawKind::Constant(_))
    }

    pub fn tag(&self) -> String {
        match &self.kind {
            LawKind::Constant(c) => format!("constant({c})"),
            LawKind::Porous { strength } => format!("porous({strength})"),
            LawKind::Identity => "identity".into(),
            LawKind::Custom { name, .. } => name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EllipticityReport {
    pub range: (f64, f64),
    pub min: f64,
    pub max: f64,
    pub argmin: f64,
    pub argmax: f64,
    pub floor: f64,
    pub ceiling: f64,
    /// Largest gap between `a′` and a central difference of `a`, relative to `1 + |a′|`.
    pub derivative_mismatch: f64,
    pub pass: bool,
}

/// Samples `a` on `samples` equispaced points of `range` and compares with the
/// declared bounds `[ν, Λ]`.
pub fn ellipticity_check(law: &DiffusionLaw, range: (f64, f64), samples: usize) -> EllipticityReport {
    let (lo, hi) = if range.0 <= range.1 { range } else { (range.1, range.0) };
    let samples = samples.max(2);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = (lo, lo);
    let mut mismatch: f64 = 0.0;
    let width = hi - lo;
    let probe = 1e-5 * (1.0 + width);
    for s in 0..samples {
        let y = if width == 0.0 { lo } else { lo + width * s as f64 / (samples - 1) as f64 };
        let a = law.coefficient(y);
        if !a.is_finite() {
            min = f64::NAN;
            break;
        }
        if a < min {
            min = a;
            argmin = y;
        }
        if a > max {
            max = a;
            argmax = y;
        }
        let fd = (law.coefficient(y + probe) - law.coefficient(y - probe)) / (2.0 * probe);
        let d = law.derivative(y);
        mismatch = mismatch.max((fd - d).abs() / (1.0 + d.abs()));
    }
    let rel = 1e-12;
    let pass = law.floor > 0.0
        && min.is_finite()
        && min >= law.floor * (1.0 - rel)
        && max <= law.ceiling * (1.0 + rel)
        && mismatch < 1e-4;
    EllipticityReport {
        range: (lo, hi),
        min,
        max,
        argmin,
        argmax,
        floor: law.floor,
        ceiling: law.ceiling,
        derivative_mismatch: mismatch,
        pass,
    }
}
