//! Fourier bridge between lattice coupling coefficients and the active
//! reflection coefficient, and the matching energy identity.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{PhaseSet, QuadratureSpec};
use crate::quadrature::CompositeRule;

/// Which layer the coupled element sits in, relative to the reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerTag {
    /// Same layer, `C⁰`.
    #[default]
    Same,
    /// The other layer of a two-layer stack, `C¹`.
    Cross,
}

/// Coupling coefficients `C_pq` keyed by lattice offset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CouplingField {
    pub coefficients: BTreeMap<(i32, i32), Complex64>,
    pub layer_tag: LayerTag,
}

impl CouplingField {
    pub fn new(layer_tag: LayerTag) -> Self {
        Self {
            coefficients: BTreeMap::new(),
            layer_tag,
        }
    }

    pub fn with(mut self, p: i32, q: i32, value: Complex64) -> Self {
        self.coefficients.insert((p, q), value);
        self
    }

    /// Sets `C_pq` and its three mirror images `C_{−p,q}`, `C_{p,−q}`,
    /// `C_{−p,−q}`, the symmetry of a rectangular lattice.
    pub fn insert_mirrored(&mut self, p: i32, q: i32, value: Complex64) {
        for (sp, sq) in [(p, q), (-p, q), (p, -q), (-p, -q)] {
            self.coefficients.insert((sp, sq), value);
        }
    }

    /// Point symmetry `C_pq = C_{−p,−q}`.
    pub fn is_point_symmetric(&self) -> bool {
        self.coefficients
            .iter()
            .all(|(&(p, q), c)| self.coefficients.get(&(-p, -q)) == Some(c))
    }

    /// Mirror symmetry along both lattice axes. Under this symmetry `|R|²`
    /// is even in α and β separately, which is what lets a `[0, π]²`
    /// average stand in for the full period.
    pub fn is_mirror_symmetric(&self) -> bool {
        self.coefficients.iter().all(|(&(p, q), c)| {
            self.coefficients.get(&(-p, q)) == Some(c) && self.coefficients.get(&(p, -q)) == Some(c)
        })
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm_sqr()).sum()
    }

    fn layer_phase(&self, gamma: f64) -> Complex64 {
        match self.layer_tag {
            LayerTag::Same => Complex64::new(1.0, 0.0),
            LayerTag::Cross => Complex64::from_polar(1.0, gamma),
        }
    }
}

/// `R(α, β, γ) = Σ C⁰_pq e^{j(pα+qβ)} + Σ C¹_pq e^{j(pα+qβ+γ)}`.
pub fn reflection_from_coupling(fields: &[CouplingField], phases: PhaseSet) -> Complex64 {
    fields
        .iter()
        .map(|field| {
            let layer = field.layer_phase(phases.gamma);
            let planar: Complex64 = field
                .coefficients
                .iter()
                .map(|(&(p, q), c)| {
                    c * Complex64::from_polar(1.0, p as f64 * phases.alpha + q as f64 * phases.beta)
                })
                .sum();
            layer * planar
        })
        .sum()
}

/// Both sides of the coupling/reflection energy identity.
///
/// `lhs` is `(1/π²) ∬_{[0,π]²} |R|²`, averaged over `γ ∈ {0, π}` so the
/// cross-layer correlation terms cancel; `rhs` is `Σ|C⁰|² + Σ|C¹|²`.
pub fn parseval_check(fields: &[CouplingField], quad: &QuadratureSpec) -> (f64, f64) {
    let rhs: f64 = fields.iter().map(CouplingField::energy).sum();
    if fields.iter().all(|f| f.coefficients.is_empty()) {
        return (0.0, rhs);
    }
    let rule = CompositeRule::new(quad, 0.0, PI);
    let lhs = [0.0, PI]
        .iter()
        .map(|&gamma| mean_power_on_quarter(fields, gamma, &rule))
        .sum::<f64>()
        / 2.0;
    (lhs, rhs)
}

/// `(1/π²) ∬_{[0,π]²} |R(α, β, γ)|²`, factored as `R = Σ_p e^{jpα} S_p(β)`.
fn mean_power_on_quarter(fields: &[CouplingField], gamma: f64, rule: &CompositeRule) -> f64 {
    // merge all layers into one planar coefficient table for this γ
    let mut by_p: BTreeMap<i32, Vec<(i32, Complex64)>> = BTreeMap::new();
    for field in fields {
        let layer = field.layer_phase(gamma);
        for (&(p, q), c) in &field.coefficients {
            by_p.entry(p).or_default().push((q, c * layer));
        }
    }
    let rows: Vec<(i32, Vec<(i32, Complex64)>)> = by_p.into_iter().collect();

    let mut total = 0.0;
    for (beta, wb) in rule.iter() {
        let partial: Vec<(f64, Complex64)> = rows
            .iter()
            .map(|(p, terms)| {
                let s: Complex64 = terms
                    .iter()
                    .map(|(q, c)| c * Complex64::from_polar(1.0, *q as f64 * beta))
                    .sum();
                (*p as f64, s)
            })
            .collect();
        let line: f64 = rule
            .iter()
            .map(|(alpha, wa)| {
                let r: Complex64 = partial
                    .iter()
                    .map(|(p, s)| s * Complex64::from_polar(1.0, p * alpha))
                    .sum();
                wa * r.norm_sqr()
            })
            .sum();
        total += wb * line;
    }
    total / (PI * PI)
}
