//! Active reflection models.
//!
//! Every model returns the reflected power fraction `|R|² ∈ [0, 1]`:
//!
//! * [`mask_reflection`]: the infinite-array 0/1 mask over the visible
//!   ellipse.
//! * [`finite_excitation_reflection`]: the mask seen through the Fejér
//!   window of an `M × N` excited patch. Evaluated through the cached cosine
//!   series; [`finite_excitation_reflection_quadrature`] is the direct
//!   spatial quadrature kept as an independent check.
//! * [`analytic_reflection_3d`]: the stacked-array model where the inter-layer
//!   phase mismatch decides how much of the in-phase power radiates.

pub mod coupling;
pub mod fejer;
pub mod spectrum;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

pub use coupling::{parseval_check, reflection_from_coupling, CouplingField, LayerTag};
pub use fejer::{fejer_1d, fejer_mean, fejer_weight};
pub use spectrum::{slice_spectrum, SliceProfile, SliceSpectrum};

use crate::error::{Error, Result};
use crate::feasible2d::{is_feasible_2d, normalized_radius_sq};
use crate::geometry::{ArrayLattice2D, PhaseSet, QuadratureSpec, Stack3D};
use crate::quadrature::CompositeRule;

/// 0 inside the visible region, 1 outside.
pub fn mask_reflection(lattice: &ArrayLattice2D, alpha: f64, beta: f64) -> f64 {
    if is_feasible_2d(lattice, alpha, beta) {
        0.0
    } else {
        1.0
    }
}

/// Reflected power of a `layer_count`-layer stack at raw (unwrapped) phases.
pub(crate) fn stacked_power(
    lattice: &ArrayLattice2D,
    dz: f64,
    layer_count: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> f64 {
    let s2 = normalized_radius_sq(lattice, alpha, beta);
    if s2 > 1.0 {
        return 1.0;
    }
    let cos_theta = (1.0 - s2).sqrt();
    let profile = SliceProfile::Analytic {
        dz,
        gamma,
        layer_count,
    };
    (1.0 - profile.radiated(cos_theta)).clamp(0.0, 1.0)
}

/// `1 − |Σₗ e^{jlφ}|² / L²` with `φ = γ − 2π dz cos θ / λ` inside the
/// visible region, total reflection outside it.
pub fn analytic_reflection_3d(stack: &Stack3D, phases: PhaseSet) -> f64 {
    stacked_power(
        stack.layer(),
        stack.dz(),
        stack.layer_count(),
        phases.alpha,
        phases.beta,
        phases.gamma,
    )
}

fn require_resolution(m_count: usize, n_count: usize, quad: &QuadratureSpec) -> Result<()> {
    let needed = 4 * m_count.max(n_count);
    if quad.panels_per_axis < needed {
        return Err(Error::quadrature(format!(
            "{} panels per axis cannot resolve the main lobe of a {m_count}×{n_count} \
             excitation window (need at least {needed})",
            quad.panels_per_axis
        )));
    }
    Ok(())
}

/// Reflected power at `(α, β)` of an `M × N` excited patch in an infinite
/// lattice: the mask convolved with the normalised Fejér window.
pub fn finite_excitation_reflection(
    lattice: &ArrayLattice2D,
    m_count: usize,
    n_count: usize,
    alpha: f64,
    beta: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    convolved_slice(
        lattice,
        m_count,
        n_count,
        SliceProfile::Mask,
        alpha,
        beta,
        quad,
    )
}

/// Fejér-window convolution of an arbitrary slice profile.
pub fn convolved_slice(
    lattice: &ArrayLattice2D,
    m_count: usize,
    n_count: usize,
    profile: SliceProfile,
    alpha: f64,
    beta: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if m_count == 0 || n_count == 0 {
        return Err(Error::domain(
            "excitation window needs at least one element",
        ));
    }
    require_resolution(m_count, n_count, quad)?;
    let spectrum = slice_spectrum(lattice, m_count, n_count, profile, quad);
    Ok(spectrum.convolved_power(alpha, beta))
}

/// Direct spatial quadrature of the same convolution.
///
/// `(2π)⁻² [∬_square K − ∬_D g K]` with `K` the Fejér window; the ellipse
/// integral is split off so the discontinuity at its rim never falls inside
/// a panel.
pub fn finite_excitation_reflection_quadrature(
    lattice: &ArrayLattice2D,
    m_count: usize,
    n_count: usize,
    profile: SliceProfile,
    alpha: f64,
    beta: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    require_resolution(m_count, n_count, quad)?;
    let period = CompositeRule::new(quad, -PI, PI);
    let kernel_total = period.integrate(|r| fejer_1d(m_count, alpha - r))
        * period.integrate(|z| fejer_1d(n_count, beta - z));

    let a = lattice.alpha_semi_axis();
    let b = lattice.beta_semi_axis();
    let u_max = if a <= PI { FRAC_PI_2 } else { (PI / a).asin() };
    let u_rule = CompositeRule::new(quad, -u_max, u_max);
    let s_rule = CompositeRule::new(quad, -1.0, 1.0);
    let mut inside = 0.0;
    for (u, wu) in u_rule.iter() {
        let (su, cu) = u.sin_cos();
        let rho = a * su;
        let half_chord = b * cu;
        let v_max = if half_chord <= PI {
            FRAC_PI_2
        } else {
            (PI / half_chord).asin()
        };
        let kx = fejer_1d(m_count, alpha - rho);
        let line: f64 = s_rule
            .iter()
            .map(|(s, ws)| {
                let v = v_max * s;
                let (sv, cv) = v.sin_cos();
                let zeta = half_chord * sv;
                ws * v_max
                    * half_chord
                    * cv
                    * profile.radiated(cu * cv)
                    * fejer_1d(n_count, beta - zeta)
            })
            .sum();
        inside += wu * a * cu * kx * line;
    }
    Ok(((kernel_total - inside) / (TAU * TAU)).clamp(0.0, 1.0))
}

/// Average reflected power of the stacked model over `[0, π]²` at fixed γ.
pub fn mean_reflection_3d(stack: &Stack3D, gamma: f64, quad: &QuadratureSpec) -> Result<f64> {
    let lattice = stack.layer();
    lattice.require_grating_lobe_free("the γ-sliced mean reflection")?;
    let profile = SliceProfile::Analytic {
        dz: stack.dz(),
        gamma,
        layer_count: stack.layer_count(),
    };
    let (a, b) = (lattice.alpha_semi_axis(), lattice.beta_semi_axis());
    let rule = CompositeRule::new(quad, 0.0, FRAC_PI_2);
    // α = a sin u, β = b cos u sin v on the quarter ellipse
    let radiated: f64 = rule
        .iter()
        .map(|(u, wu)| {
            let cu = u.cos();
            wu * cu
                * cu
                * rule
                    .iter()
                    .map(|(v, wv)| {
                        let cv = v.cos();
                        wv * cv * profile.radiated(cu * cv)
                    })
                    .sum::<f64>()
        })
        .sum::<f64>()
        * a
        * b;
    Ok(1.0 - radiated / (PI * PI))
}

/// Which reflection model a [`ReflectionField`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReflectionModel {
    InfiniteMask,
    FiniteExcitation {
        m_count: usize,
        n_count: usize,
        quad: QuadratureSpec,
    },
    Analytic3d {
        dz: f64,
        layer_count: usize,
    },
}

/// A reflection model bound to a lattice, evaluable over phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionField {
    pub model: ReflectionModel,
    pub lattice: ArrayLattice2D,
}

impl ReflectionField {
    pub fn new(model: ReflectionModel, lattice: ArrayLattice2D) -> Self {
        Self { model, lattice }
    }

    /// `|R|²` at the given phases; γ is ignored by the planar models.
    pub fn power(&self, phases: PhaseSet) -> Result<f64> {
        match self.model {
            ReflectionModel::InfiniteMask => {
                Ok(mask_reflection(&self.lattice, phases.alpha, phases.beta))
            }
            ReflectionModel::FiniteExcitation {
                m_count,
                n_count,
                quad,
            } => finite_excitation_reflection(
                &self.lattice,
                m_count,
                n_count,
                phases.alpha,
                phases.beta,
                &quad,
            ),
            ReflectionModel::Analytic3d { dz, layer_count } => {
                let stack = Stack3D::with_layers(self.lattice, dz, layer_count)?;
                Ok(analytic_reflection_3d(&stack, phases))
            }
        }
    }
}
