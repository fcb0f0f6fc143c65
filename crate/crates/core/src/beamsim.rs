//! Brute-force array-factor simulator.
//!
//! Elements sit at `(m dx, n dy, l dz)`, with odd layers shifted by the
//! stack's horizontal offset. Element `(m, n, l)` is driven with phase
//! `mα + nβ + lγ`, and the far field in direction `û` is
//!
//! ```text
//! AF(û) = Σ exp(j(mα + nβ + lγ − k r·û)),   k = 2π/λ
//! ```
//!
//! so a positive α steers the beam towards +x, matching the phase/cone
//! mapping in [`crate::geometry`]. No mutual coupling is modelled.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feasible2d::normalized_radius_sq;
use crate::geometry::{ArrayLattice2D, PhaseSet, QuadratureSpec, SphericalDirection, Stack3D};
use crate::quadrature::CompositeRule;

/// Far-field pattern of a single element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementPattern {
    Isotropic,
    /// Power pattern `cos θ` on the upper hemisphere, zero below.
    /// Directivity 4.
    CosineTheta,
}

impl ElementPattern {
    /// Field amplitude, the square root of the power pattern.
    pub fn field(&self, theta: f64) -> f64 {
        match self {
            ElementPattern::Isotropic => 1.0,
            ElementPattern::CosineTheta => {
                if theta <= FRAC_PI_2 {
                    theta.cos().max(0.0).sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ElementPattern::Isotropic => "isotropic",
            ElementPattern::CosineTheta => "cosine_theta",
        }
    }
}

/// Element arrangement: a single layer or a stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayLayout {
    pub lattice: ArrayLattice2D,
    pub dz: f64,
    pub layer_count: usize,
    pub layer_offset: [f64; 2],
}

impl From<&ArrayLattice2D> for ArrayLayout {
    fn from(lattice: &ArrayLattice2D) -> Self {
        Self {
            lattice: *lattice,
            dz: 0.0,
            layer_count: 1,
            layer_offset: [0.0, 0.0],
        }
    }
}

impl From<&Stack3D> for ArrayLayout {
    fn from(stack: &Stack3D) -> Self {
        Self {
            lattice: *stack.layer(),
            dz: stack.dz(),
            layer_count: stack.layer_count(),
            layer_offset: stack.layer_offset(),
        }
    }
}

impl ArrayLayout {
    pub fn element_count(&self) -> usize {
        self.lattice.element_count() * self.layer_count
    }

    /// Largest extent along any axis, in wavelengths.
    pub fn largest_dimension(&self) -> f64 {
        let lat = &self.lattice;
        (lat.m_count() as f64 * lat.dx())
            .max(lat.n_count() as f64 * lat.dy())
            .max(self.layer_count as f64 * self.dz)
    }

    fn position(&self, m: usize, n: usize, l: usize) -> [f64; 3] {
        let shift = if l % 2 == 1 {
            self.layer_offset
        } else {
            [0.0, 0.0]
        };
        [
            m as f64 * self.lattice.dx() + shift[0],
            n as f64 * self.lattice.dy() + shift[1],
            l as f64 * self.dz,
        ]
    }

    /// Direction the planar phases `(α, β)` steer to, on the upper
    /// hemisphere. `None` when `(α, β)` lies outside the visible region.
    pub fn steered_direction(&self, phases: PhaseSet) -> Option<SphericalDirection> {
        if normalized_radius_sq(&self.lattice, phases.alpha, phases.beta) > 1.0 {
            return None;
        }
        let ux = phases.alpha / (TAU * self.lattice.dx());
        let uy = phases.beta / (TAU * self.lattice.dy());
        let s = ux.hypot(uy).min(1.0);
        let phi = if s == 0.0 { 0.0 } else { uy.atan2(ux) };
        SphericalDirection::new(s.asin(), phi).ok()
    }
}

/// Sum over every element, one complex exponential each.
pub fn array_factor(layout: &ArrayLayout, phases: PhaseSet, dir: SphericalDirection) -> Complex64 {
    let u = dir.unit_vector();
    let lat = &layout.lattice;
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..layout.layer_count {
        for m in 0..lat.m_count() {
            for n in 0..lat.n_count() {
                let r = layout.position(m, n, l);
                let assigned =
                    m as f64 * phases.alpha + n as f64 * phases.beta + l as f64 * phases.gamma;
                let path = TAU * (r[0] * u[0] + r[1] * u[1] + r[2] * u[2]);
                total += Complex64::from_polar(1.0, assigned - path);
            }
        }
    }
    total
}

/// `|Σ_{m<K} e^{jmx}| = |sin(Kx/2) / sin(x/2)|`.
fn dirichlet_magnitude(count: usize, x: f64) -> f64 {
    let s = (0.5 * x).sin();
    if s.abs() < 1e-9 {
        return count as f64;
    }
    ((0.5 * count as f64 * x).sin() / s).abs()
}

/// `|AF|` through the separable form: two Dirichlet factors times the
/// layer sum.
pub fn array_factor_magnitude(
    layout: &ArrayLayout,
    phases: PhaseSet,
    dir: SphericalDirection,
) -> f64 {
    magnitude_along(layout, phases, dir.unit_vector())
}

fn magnitude_along(layout: &ArrayLayout, phases: PhaseSet, u: [f64; 3]) -> f64 {
    let lat = &layout.lattice;
    let px = phases.alpha - TAU * lat.dx() * u[0];
    let py = phases.beta - TAU * lat.dy() * u[1];
    let planar = dirichlet_magnitude(lat.m_count(), px) * dirichlet_magnitude(lat.n_count(), py);
    planar * layer_sum(layout, phases.gamma, u).norm()
}

fn layer_sum(layout: &ArrayLayout, gamma: f64, u: [f64; 3]) -> Complex64 {
    if layout.layer_count == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let psi = gamma - TAU * layout.dz * u[2];
    let stagger = TAU * (layout.layer_offset[0] * u[0] + layout.layer_offset[1] * u[1]);
    (0..layout.layer_count)
        .map(|l| {
            let shift = if l % 2 == 1 { stagger } else { 0.0 };
            Complex64::from_polar(1.0, l as f64 * psi - shift)
        })
        .sum()
}

/// Resolution of the sphere scan used for invisible steering phases.
const SEARCH_THETA: usize = 91;
const SEARCH_PHI: usize = 180;

fn search_directions() -> &'static [[f64; 3]] {
    static GRID: OnceLock<Vec<[f64; 3]>> = OnceLock::new();
    GRID.get_or_init(|| {
        (0..SEARCH_THETA)
            .flat_map(|i| (0..SEARCH_PHI).map(move |j| (i, j)))
            .map(|(i, j)| {
                SphericalDirection {
                    theta: PI * i as f64 / (SEARCH_THETA - 1) as f64,
                    phi_az: TAU * j as f64 / SEARCH_PHI as f64,
                }
                .unit_vector()
            })
            .collect()
    })
}

/// `|AF| / element count` at the direction `(α, β)` steers to.
///
/// For `(α, β)` outside the visible region there is no steered direction;
/// the strongest value over a fixed full-sphere grid is returned instead.
pub fn main_beam_intensity(layout: &ArrayLayout, phases: PhaseSet) -> f64 {
    let count = layout.element_count() as f64;
    if let Some(dir) = layout.steered_direction(phases) {
        return (array_factor_magnitude(layout, phases, dir) / count).min(1.0);
    }
    let peak = search_directions()
        .iter()
        .map(|&u| magnitude_along(layout, phases, u))
        .fold(0.0, f64::max);
    (peak / count).min(1.0)
}

/// Main-beam intensity sampled on an `(α, β, γ)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Row-major over `(γ, α, β)`.
    pub values: Vec<f64>,
}

impl IntensityMap {
    pub fn value(&self, ig: usize, ia: usize, ib: usize) -> f64 {
        self.values[(ig * self.alpha.len() + ia) * self.beta.len() + ib]
    }
}

pub fn intensity_map(
    layout: &ArrayLayout,
    alpha: &[f64],
    beta: &[f64],
    gamma: &[f64],
) -> IntensityMap {
    let cells: Vec<(f64, f64, f64)> = gamma
        .iter()
        .flat_map(|&g| {
            alpha
                .iter()
                .flat_map(move |&a| beta.iter().map(move |&b| (a, b, g)))
        })
        .collect();
    let values = cells
        .par_iter()
        .map(|&(a, b, g)| {
            main_beam_intensity(
                layout,
                PhaseSet {
                    alpha: a,
                    beta: b,
                    gamma: g,
                },
            )
        })
        .collect();
    IntensityMap {
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        gamma: gamma.to_vec(),
        values,
    }
}

/// Polar nodes needed per wavelength of array extent.
const NODES_PER_WAVELENGTH: f64 = 8.0;

fn require_sphere_resolution(layout: &ArrayLayout, quad: &QuadratureSpec) -> Result<()> {
    let needed = (NODES_PER_WAVELENGTH * layout.largest_dimension()).ceil() as usize;
    if quad.total_nodes() < needed {
        return Err(Error::quadrature(format!(
            "{} polar nodes under-resolve an array {}λ across (need {needed})",
            quad.total_nodes(),
            layout.largest_dimension()
        )));
    }
    Ok(())
}

/// `∬ |F|² sin θ dθ dφ`: composite Gauss-Legendre in θ, `2 × nodes`
/// uniform trapezoid in φ.
pub fn radiated_power(
    layout: &ArrayLayout,
    phases: PhaseSet,
    pattern: ElementPattern,
    quad: &QuadratureSpec,
) -> f64 {
    let theta_rule = CompositeRule::new(quad, 0.0, PI);
    let n_phi = 2 * quad.total_nodes();
    let d_phi = TAU / n_phi as f64;
    let rings: Vec<f64> = theta_rule
        .nodes
        .par_iter()
        .map(|&theta| {
            let element = pattern.field(theta);
            if element == 0.0 {
                return 0.0;
            }
            let ring: f64 = (0..n_phi)
                .map(|j| {
                    let dir = SphericalDirection {
                        theta,
                        phi_az: j as f64 * d_phi,
                    };
                    let f = element * array_factor_magnitude(layout, phases, dir);
                    f * f
                })
                .sum();
            ring * d_phi * theta.sin()
        })
        .collect();
    rings
        .iter()
        .zip(&theta_rule.weights)
        .map(|(r, w)| r * w)
        .sum()
}

/// Directivity towards `dir`.
pub fn directivity_at(
    layout: &ArrayLayout,
    phases: PhaseSet,
    pattern: ElementPattern,
    dir: SphericalDirection,
    quad: &QuadratureSpec,
) -> Result<f64> {
    require_sphere_resolution(layout, quad)?;
    let power = radiated_power(layout, phases, pattern, quad);
    if power <= 0.0 {
        return Err(Error::quadrature("radiated power integrates to zero"));
    }
    let f0 = pattern.field(dir.theta) * array_factor_magnitude(layout, phases, dir);
    Ok(4.0 * PI * f0 * f0 / power)
}

/// Directivity towards the direction `(α, β)` steers to.
pub fn directivity(
    layout: &ArrayLayout,
    phases: PhaseSet,
    pattern: ElementPattern,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let dir = layout.steered_direction(phases).ok_or_else(|| {
        Error::domain(format!(
            "phases ({}, {}) steer outside the visible region",
            phases.alpha, phases.beta
        ))
    })?;
    directivity_at(layout, phases, pattern, dir, quad)
}

/// Scan plane of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanPlane {
    Xz,
    Yz,
}

impl ScanPlane {
    fn azimuth(&self) -> f64 {
        match self {
            ScanPlane::Xz => 0.0,
            ScanPlane::Yz => FRAC_PI_2,
        }
    }
}

/// Phases that steer every layer, and the inter-layer step, to `dir`.
pub fn matched_phases(layout: &ArrayLayout, dir: SphericalDirection) -> PhaseSet {
    let u = dir.unit_vector();
    let lat = &layout.lattice;
    PhaseSet {
        alpha: TAU * lat.dx() * u[0],
        beta: TAU * lat.dy() * u[1],
        gamma: TAU
            * (layout.dz * u[2] + layout.layer_offset[0] * u[0] + layout.layer_offset[1] * u[1]),
    }
}

/// Directivity while scanning through `angles` (radians from broadside).
pub fn scan_sweep(
    layout: &ArrayLayout,
    plane: ScanPlane,
    angles: &[f64],
    pattern: ElementPattern,
    quad: &QuadratureSpec,
) -> Result<Vec<(f64, f64)>> {
    angles
        .iter()
        .map(|&angle| {
            if !(0.0..=FRAC_PI_2).contains(&angle) {
                return Err(Error::domain(format!(
                    "scan angle {angle} outside [0, π/2]"
                )));
            }
            let dir = SphericalDirection {
                theta: angle,
                phi_az: plane.azimuth(),
            };
            let phases = matched_phases(layout, dir);
            Ok((angle, directivity_at(layout, phases, pattern, dir, quad)?))
        })
        .collect()
}
