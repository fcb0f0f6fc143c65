//! Geometric and phase-space value types shared by every module.
//!
//! All lengths are stored in units of the wavelength. The `wavelength` field
//! of [`ArrayLattice2D`] is kept only so that I/O can label results in
//! physical units.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Slack allowed when a cosine argument computed from user phases lands a
/// rounding error outside `[-1, 1]`.
pub(crate) const COSINE_SLACK: f64 = 1e-12;

/// Planar uniform rectangular lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayLattice2D {
    m_count: usize,
    n_count: usize,
    dx: f64,
    dy: f64,
    wavelength: f64,
}

impl ArrayLattice2D {
    /// `dx` and `dy` are spacings in wavelengths.
    pub fn new(m_count: usize, n_count: usize, dx: f64, dy: f64) -> Result<Self> {
        Self::with_wavelength(m_count, n_count, dx, dy, 1.0)
    }

    pub fn with_wavelength(
        m_count: usize,
        n_count: usize,
        dx: f64,
        dy: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if m_count == 0 || n_count == 0 {
            return Err(Error::domain("element counts must be at least 1"));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::domain(format!(
                "spacings must be positive and finite (dx={dx}, dy={dy})"
            )));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::domain(format!(
                "wavelength must be positive ({wavelength})"
            )));
        }
        Ok(Self {
            m_count,
            n_count,
            dx,
            dy,
            wavelength,
        })
    }

    /// Square half-wavelength lattice, the usual reference geometry.
    pub fn half_wave(m_count: usize, n_count: usize) -> Result<Self> {
        Self::new(m_count, n_count, 0.5, 0.5)
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn n_count(&self) -> usize {
        self.n_count
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn element_count(&self) -> usize {
        self.m_count * self.n_count
    }

    /// Same spacings, different element counts.
    pub fn resized(&self, m_count: usize, n_count: usize) -> Result<Self> {
        Self::with_wavelength(m_count, n_count, self.dx, self.dy, self.wavelength)
    }

    /// Semi-axis of the visible-region ellipse along α, `2π dx / λ`.
    pub fn alpha_semi_axis(&self) -> f64 {
        TAU * self.dx
    }

    /// Semi-axis of the visible-region ellipse along β, `2π dy / λ`.
    pub fn beta_semi_axis(&self) -> f64 {
        TAU * self.dy
    }

    /// True when neither spacing exceeds half a wavelength, so the visible
    /// ellipse fits inside the principal phase square.
    pub fn is_grating_lobe_free(&self) -> bool {
        self.dx <= 0.5 + COSINE_SLACK && self.dy <= 0.5 + COSINE_SLACK
    }

    /// Errors unless the lattice is free of grating lobes.
    pub(crate) fn require_grating_lobe_free(&self, what: &str) -> Result<()> {
        if self.is_grating_lobe_free() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{what} requires dx, dy <= λ/2 (got dx={}, dy={}); \
                 use the numerical feasible fraction in the grating-lobe regime",
                self.dx, self.dy
            )))
        }
    }
}

/// Stack of identical planar layers separated by `dz` along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stack3D {
    layer: ArrayLattice2D,
    dz: f64,
    layer_count: usize,
    layer_offset: [f64; 2],
}

impl Stack3D {
    /// Two vertically aligned layers.
    pub fn new(layer: ArrayLattice2D, dz: f64) -> Result<Self> {
        Self::with_layers(layer, dz, 2)
    }

    pub fn with_layers(layer: ArrayLattice2D, dz: f64, layer_count: usize) -> Result<Self> {
        if !(dz > 0.0 && dz.is_finite()) {
            return Err(Error::domain(format!(
                "inter-layer spacing must be positive ({dz})"
            )));
        }
        if layer_count < 2 {
            return Err(Error::domain(format!(
                "a stack needs at least two layers (got {layer_count})"
            )));
        }
        Ok(Self {
            layer,
            dz,
            layer_count,
            layer_offset: [0.0, 0.0],
        })
    }

    /// Horizontal stagger applied to every odd layer, in wavelengths.
    pub fn with_offset(mut self, offset: [f64; 2]) -> Result<Self> {
        if !offset.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("layer offset must be finite"));
        }
        self.layer_offset = offset;
        Ok(self)
    }

    pub fn layer(&self) -> &ArrayLattice2D {
        &self.layer
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn layer_offset(&self) -> [f64; 2] {
        self.layer_offset
    }

    pub fn element_count(&self) -> usize {
        self.layer_count * self.layer.element_count()
    }

    pub(crate) fn require_two_layers(&self, what: &str) -> Result<()> {
        if self.layer_count == 2 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{what} is defined for two-layer stacks (got {} layers)",
                self.layer_count
            )))
        }
    }
}

/// Wraps a phase into `[-π, π]`. Values already inside are returned
/// untouched so that `±π` survive exactly.
pub fn wrap_phase(phase: f64) -> f64 {
    if (-PI..=PI).contains(&phase) {
        return phase;
    }
    let wrapped = (phase + PI).rem_euclid(TAU) - PI;
    // rem_euclid can land exactly on TAU through rounding
    if wrapped > PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Linear excitation phase steps along x, y and between layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PhaseSet {
    /// Builds a canonical phase set; every component is wrapped into `[-π, π]`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            alpha: wrap_phase(alpha),
            beta: wrap_phase(beta),
            gamma: wrap_phase(gamma),
        }
    }

    pub fn planar(alpha: f64, beta: f64) -> Self {
        Self::new(alpha, beta, 0.0)
    }
}

/// Angles between the in-phase cone axes and the x, y and z axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeAngles {
    pub mu: f64,
    pub nu: f64,
    pub xi: f64,
}

impl ConeAngles {
    pub fn new(mu: f64, nu: f64, xi: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("nu", nu), ("xi", xi)] {
            if !(0.0..=PI).contains(&v) {
                return Err(Error::domain(format!("{name}={v} outside [0, π]")));
            }
        }
        Ok(Self { mu, nu, xi })
    }
}

/// Polar angle from +z and azimuth from +x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDirection {
    pub theta: f64,
    pub phi_az: f64,
}

impl SphericalDirection {
    /// Validates θ and folds the azimuth into `[0, 2π)`.
    pub fn new(theta: f64, phi_az: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!("theta={theta} outside [0, π]")));
        }
        if !phi_az.is_finite() {
            return Err(Error::domain("azimuth must be finite"));
        }
        let mut phi = phi_az.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi_az: phi })
    }

    pub fn broadside() -> Self {
        Self {
            theta: 0.0,
            phi_az: 0.0,
        }
    }

    /// Unit vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi_az.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn in_first_octant(&self) -> bool {
        self.theta <= FRAC_PI_2 + COSINE_SLACK && self.phi_az <= FRAC_PI_2 + COSINE_SLACK
    }
}

/// Rectangular (θ, φ) observation window inside the first octant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularRegion {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl AngularRegion {
    pub fn new(theta1: f64, theta2: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let in_quarter = |v: f64| (0.0..=FRAC_PI_2 + COSINE_SLACK).contains(&v);
        if !(in_quarter(theta1) && in_quarter(theta2) && theta1 <= theta2) {
            return Err(Error::domain(format!(
                "theta range [{theta1}, {theta2}] must satisfy 0 <= θ1 <= θ2 <= π/2"
            )));
        }
        if !(in_quarter(phi1) && in_quarter(phi2) && phi1 <= phi2) {
            return Err(Error::domain(format!(
                "phi range [{phi1}, {phi2}] must satisfy 0 <= φ1 <= φ2 <= π/2"
            )));
        }
        Ok(Self {
            theta1,
            theta2,
            phi1,
            phi2,
        })
    }

    /// θ ∈ [0, π/2], φ ∈ [0, π/2].
    pub fn first_octant() -> Self {
        Self {
            theta1: 0.0,
            theta2: FRAC_PI_2,
            phi1: 0.0,
            phi2: FRAC_PI_2,
        }
    }

    /// Elevation scan in the φ = π/2 (yz) half-plane.
    pub fn horizontal_hemispace() -> Self {
        Self {
            theta1: 0.0,
            theta2: FRAC_PI_2,
            phi1: FRAC_PI_2,
            phi2: FRAC_PI_2,
        }
    }
}

/// Composite Gauss-Legendre resolution. Same spec and same integrand always
/// give bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadratureSpec {
    pub panels_per_axis: usize,
    pub nodes_per_panel: usize,
}

impl QuadratureSpec {
    pub fn new(panels_per_axis: usize, nodes_per_panel: usize) -> Result<Self> {
        if panels_per_axis == 0 || nodes_per_panel == 0 {
            return Err(Error::domain(
                "quadrature panels and nodes must be positive",
            ));
        }
        Ok(Self {
            panels_per_axis,
            nodes_per_panel,
        })
    }

    /// Nodes per axis.
    pub fn total_nodes(&self) -> usize {
        self.panels_per_axis * self.nodes_per_panel
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels_per_axis: 256,
            nodes_per_panel: 4,
        }
    }
}

fn cone_cosine(phase: f64, spacing: f64, axis: &str) -> Result<f64> {
    let c = phase.abs() / (TAU * spacing);
    if c > 1.0 + COSINE_SLACK {
        return Err(Error::domain(format!(
            "phase step {phase} too large for {axis} spacing {spacing}λ (cosine {c} > 1)"
        )));
    }
    Ok(c.min(1.0))
}

/// Maps excitation phase steps to the in-phase cone angles.
///
/// Uses `cos μ = |α| λ / (2π dx)` and the analogous relations for ν and ξ.
/// Only cosines of these angles enter downstream formulas, so the sign of
/// the phase step is dropped.
pub fn phase_to_cone(lattice: &ArrayLattice2D, dz: f64, phases: PhaseSet) -> Result<ConeAngles> {
    if dz.is_nan() || dz <= 0.0 {
        return Err(Error::domain(format!("dz must be positive ({dz})")));
    }
    let cos_mu = cone_cosine(phases.alpha, lattice.dx(), "x")?;
    let cos_nu = cone_cosine(phases.beta, lattice.dy(), "y")?;
    let cos_xi = cone_cosine(phases.gamma, dz, "z")?;
    Ok(ConeAngles {
        mu: cos_mu.acos(),
        nu: cos_nu.acos(),
        xi: cos_xi.acos(),
    })
}

/// Inverse of [`phase_to_cone`] on its image: nonnegative phase steps.
pub fn cone_to_phase(lattice: &ArrayLattice2D, dz: f64, cones: ConeAngles) -> PhaseSet {
    PhaseSet {
        alpha: TAU * lattice.dx() * cones.mu.cos(),
        beta: TAU * lattice.dy() * cones.nu.cos(),
        gamma: TAU * dz * cones.xi.cos(),
    }
}

/// Direction where the x and y cones intersect, using
/// `cos²μ + cos²ν = sin²θ`.
pub fn cone_to_direction(cones: ConeAngles) -> Result<SphericalDirection> {
    let (cm, cn) = (cones.mu.cos(), cones.nu.cos());
    let s2 = cm * cm + cn * cn;
    if s2 > 1.0 + COSINE_SLACK {
        return Err(Error::domain(format!(
            "cones do not intersect: cos²μ + cos²ν = {s2} > 1"
        )));
    }
    let theta = s2.min(1.0).sqrt().asin();
    let phi = if s2 == 0.0 { 0.0 } else { cn.atan2(cm) };
    SphericalDirection::new(theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lattice_rejects_bad_inputs() {
        assert!(ArrayLattice2D::new(0, 3, 0.5, 0.5).is_err());
        assert!(ArrayLattice2D::new(3, 3, 0.0, 0.5).is_err());
        assert!(ArrayLattice2D::new(3, 3, 0.5, f64::NAN).is_err());
        assert!(ArrayLattice2D::with_wavelength(3, 3, 0.5, 0.5, -1.0).is_err());
        let stack_layer = ArrayLattice2D::half_wave(2, 2).unwrap();
        assert!(Stack3D::new(stack_layer, 0.0).is_err());
        assert!(Stack3D::with_layers(stack_layer, 0.5, 1).is_err());
        assert_eq!(
            Stack3D::with_layers(stack_layer, 0.5, 3)
                .unwrap()
                .element_count(),
            12
        );
    }

    #[test]
    fn wrap_keeps_pi_and_folds_the_rest() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), -PI);
        assert_abs_diff_eq!(wrap_phase(1.5 * PI), -0.5 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_phase(-3.5 * PI), 0.5 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(wrap_phase(7.0 * TAU + 0.25), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn phase_to_cone_examples() {
        let lat = ArrayLattice2D::half_wave(4, 4).unwrap();
        let c = phase_to_cone(&lat, 0.5, PhaseSet::new(0.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.mu, FRAC_PI_2, epsilon = 1e-15);
        let c = phase_to_cone(&lat, 0.5, PhaseSet::new(-PI, 0.0, 0.0)).unwrap();
        assert_eq!(c.mu, 0.0);
        // cos ξ = 0.5 at dz = λ/2 needs γ = π/2
        let c = phase_to_cone(&lat, 0.5, PhaseSet::new(0.0, 0.0, FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!(c.xi, PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_to_cone_rejects_oversized_steps() {
        let lat = ArrayLattice2D::new(4, 4, 0.25, 0.5).unwrap();
        let err = phase_to_cone(&lat, 0.5, PhaseSet::new(2.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(phase_to_cone(&lat, 0.1, PhaseSet::new(0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn cone_to_direction_examples() {
        let d = cone_to_direction(ConeAngles::new(FRAC_PI_2, FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(d.theta, 0.0, epsilon = 1e-15);
        let d = cone_to_direction(ConeAngles::new(0.0, FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(d.theta, FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(d.phi_az, 0.0, epsilon = 1e-15);
        let mu = 0.5f64.acos();
        let d = cone_to_direction(ConeAngles::new(mu, mu, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(d.theta, 0.5f64.sqrt().asin(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.theta, 1f64.atan(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.phi_az, PI / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn non_intersecting_cones_error() {
        let c = ConeAngles::new(0.3, 0.3, 0.0).unwrap();
        assert!(matches!(cone_to_direction(c), Err(Error::Domain(_))));
    }

    #[test]
    fn region_and_direction_validation() {
        assert!(AngularRegion::new(0.2, 0.1, 0.0, 0.5).is_err());
        assert!(AngularRegion::new(0.0, 2.0, 0.0, 0.5).is_err());
        assert!(SphericalDirection::new(-0.1, 0.0).is_err());
        let d = SphericalDirection::new(0.3, -FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(d.phi_az, 1.5 * PI, epsilon = 1e-15);
        assert!(QuadratureSpec::new(0, 4).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cone_round_trip(
                dx in 0.05f64..1.5, dy in 0.05f64..1.5, dz in 0.05f64..1.5,
                fa in 0.0f64..1.0, fb in 0.0f64..1.0, fg in 0.0f64..1.0,
            ) {
                let lat = ArrayLattice2D::new(3, 3, dx, dy).unwrap();
                // keep the steps inside [0, π] so canonicalisation is the identity
                let alpha = fa * (TAU * dx).min(PI);
                let beta = fb * (TAU * dy).min(PI);
                let gamma = fg * (TAU * dz).min(PI);
                let phases = PhaseSet::new(alpha, beta, gamma);
                let cones = phase_to_cone(&lat, dz, phases).unwrap();
                let back = cone_to_phase(&lat, dz, cones);
                prop_assert!((back.alpha - alpha).abs() < 1e-12);
                prop_assert!((back.beta - beta).abs() < 1e-12);
                prop_assert!((back.gamma - gamma).abs() < 1e-12);
            }

            #[test]
            fn zero_planar_phase_is_broadside(dx in 0.05f64..2.0, dy in 0.05f64..2.0, dz in 0.05f64..2.0) {
                let lat = ArrayLattice2D::new(2, 2, dx, dy).unwrap();
                let cones = phase_to_cone(&lat, dz, PhaseSet::new(0.0, 0.0, 0.0)).unwrap();
                let dir = cone_to_direction(cones).unwrap();
                prop_assert!(dir.theta.abs() < 1e-15);
            }
        }
    }
}
