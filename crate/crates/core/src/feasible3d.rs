//! Threshold-constrained beam regions of a stacked array.
//!
//! A stack steered with inter-layer step γ radiates coherently only where
//! the layer phasors stay aligned. Requiring the combined field amplitude
//! to reach a threshold `t` carves an annulus out of the planar `(α, β)`
//! visible disk; stepping γ through a short codebook tiles the elevation
//! range with such annuli.
//!
//! Radii are circular, so the annulus routines require a square lattice
//! (`dx = dy = d ≤ λ/2`). Arccos arguments are clamped to `[-1, 1]` and the
//! clamp events themselves decide the [`CaseTag`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{QuadratureSpec, Stack3D, COSINE_SLACK};
use crate::quadrature::integrate;

/// `|Σ_{l=1}^{L} e^{jlφ}|`, the amplitude of `L` unit layer phasors with
/// successive mismatch φ.
pub fn combining_factor(layer_count: usize, varphi: f64) -> f64 {
    let l = layer_count as f64;
    let half = 0.5 * varphi;
    let s = half.sin();
    if s.abs() < 1e-9 {
        return l;
    }
    ((l * half).sin() / s).abs()
}

/// Same quantity by direct phasor summation.
pub fn combining_factor_direct(layer_count: usize, varphi: f64) -> f64 {
    (1..=layer_count)
        .map(|l| Complex64::from_polar(1.0, l as f64 * varphi))
        .sum::<Complex64>()
        .norm()
}

/// Field-amplitude threshold `t ∈ [0, 2]` on the two-layer combining factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    t: f64,
}

impl Threshold {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&t) {
            return Err(Error::domain(format!("threshold {t} outside [0, 2]")));
        }
        Ok(Self { t })
    }

    pub fn value(&self) -> f64 {
        self.t
    }

    /// `cos φ_t = (t² − 2) / 2`.
    pub fn cos_phase(&self) -> f64 {
        ((self.t * self.t - 2.0) / 2.0).clamp(-1.0, 1.0)
    }

    /// Largest tolerated phase mismatch `φ_t = arccos((t² − 2) / 2)`.
    pub fn phase_margin(&self) -> f64 {
        self.cos_phase().acos()
    }

    /// Margin expressed on the `cos θ` axis: `λ φ_t / (2π dz)`.
    fn cosine_margin(&self, dz: f64) -> f64 {
        self.phase_margin() / (TAU * dz)
    }
}

/// `φ = 2π dz / λ (cos ξ − cos θ)`.
pub fn phase_mismatch(stack: &Stack3D, xi: f64, theta: f64) -> f64 {
    TAU * stack.dz() * (xi.cos() - theta.cos())
}

/// Polar limits of the feasible cone band around the beam angle ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaBounds {
    pub theta_minus: f64,
    pub theta_plus: f64,
    /// Unclamped `cos ξ + margin`.
    pub lower_argument: f64,
    /// Unclamped `cos ξ − margin`.
    pub upper_argument: f64,
}

fn bounds_from_cos(cos_xi: f64, margin: f64) -> ThetaBounds {
    let lower_argument = cos_xi + margin;
    let upper_argument = cos_xi - margin;
    ThetaBounds {
        theta_minus: lower_argument.clamp(-1.0, 1.0).acos(),
        theta_plus: upper_argument.clamp(-1.0, 1.0).acos(),
        lower_argument,
        upper_argument,
    }
}

/// `θ₋ = arccos[cos ξ + λ φ_t / (2π dz)]`, `θ₊ = arccos[cos ξ − λ φ_t / (2π dz)]`,
/// arguments clamped to `[-1, 1]`.
pub fn theta_bounds(stack: &Stack3D, xi: f64, t: Threshold) -> ThetaBounds {
    bounds_from_cos(xi.cos(), t.cosine_margin(stack.dz()))
}

/// Which saturation shaped the planar region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// Lower bound pinned at the z axis: a quarter disk.
    AroundZ,
    /// Both bounds inside the octant: a proper ring.
    Medium,
    /// Upper bound past the horizon: a ring reaching the disk rim, plus a
    /// mirrored residual band that cannot be steered.
    AroundXy,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::AroundZ => "around_z",
            CaseTag::Medium => "medium",
            CaseTag::AroundXy => "around_xy",
        }
    }
}

/// Threshold-constrained `(α, β)` region for one beam angle ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleAnnulus {
    pub r_minus: f64,
    pub r_plus: f64,
    /// Case-aware area, residual band included.
    pub area: f64,
    /// Area of the part inside the visible disk, `π (r₊² − r₋²) / 4`.
    pub steerable_area: f64,
    /// Mirrored beyond-horizon band of the around-xy case; flagged
    /// non-steerable.
    pub residual_area: f64,
    pub case_tag: CaseTag,
    pub theta_minus: f64,
    pub theta_plus: f64,
}

impl FeasibleAnnulus {
    /// True when `(α, β)` falls in the steerable ring.
    pub fn contains(&self, alpha: f64, beta: f64) -> bool {
        let r = alpha.hypot(beta);
        r >= self.r_minus && r <= self.r_plus
    }
}

fn ring_lattice_spacing(stack: &Stack3D) -> Result<f64> {
    stack.require_two_layers("the threshold-constrained feasible region")?;
    let lat = stack.layer();
    if (lat.dx() - lat.dy()).abs() > COSINE_SLACK {
        return Err(Error::domain(format!(
            "circular feasible rings need dx = dy (got {} and {})",
            lat.dx(),
            lat.dy()
        )));
    }
    lat.require_grating_lobe_free("the feasible annulus")?;
    Ok(lat.dx())
}

/// Feasible ring for beam angle ξ at threshold `t`.
pub fn annulus(stack: &Stack3D, xi: f64, t: Threshold) -> Result<FeasibleAnnulus> {
    if !(0.0..=PI).contains(&xi) {
        return Err(Error::domain(format!("xi={xi} outside [0, π]")));
    }
    annulus_from_cos(stack, xi.cos(), t)
}

pub(crate) fn annulus_from_cos(
    stack: &Stack3D,
    cos_xi: f64,
    t: Threshold,
) -> Result<FeasibleAnnulus> {
    let d = ring_lattice_spacing(stack)?;
    let k = TAU * d;
    let margin = t.cosine_margin(stack.dz());
    let bounds = bounds_from_cos(cos_xi, margin);
    let (lower, upper) = (bounds.lower_argument, bounds.upper_argument);

    // steerable band in cos θ ∈ [max(upper, 0), min(lower, 1)]
    let top = lower.min(1.0);
    let bottom = upper.max(0.0);
    let (r_minus, r_plus) = if top < 0.0 {
        (k, k)
    } else {
        (
            k * (1.0 - top * top).sqrt(),
            k * (1.0 - bottom * bottom).sqrt(),
        )
    };
    let steerable_area = PI * (r_plus * r_plus - r_minus * r_minus) / 4.0;
    let case_tag = if lower >= 1.0 {
        CaseTag::AroundZ
    } else if upper < 0.0 {
        CaseTag::AroundXy
    } else {
        CaseTag::Medium
    };
    let residual_area = if case_tag == CaseTag::AroundXy {
        let deepest = upper.max(-1.0);
        let shallowest = lower.min(0.0);
        PI * k * k * (deepest * deepest - shallowest * shallowest) / 4.0
    } else {
        0.0
    };
    let area = match case_tag {
        CaseTag::Medium => closed_form_ring_area(k, margin, cos_xi),
        CaseTag::AroundZ => PI * r_plus * r_plus / 4.0,
        CaseTag::AroundXy => steerable_area + residual_area,
    };
    Ok(FeasibleAnnulus {
        r_minus,
        r_plus,
        area,
        steerable_area,
        residual_area,
        case_tag,
        theta_minus: bounds.theta_minus,
        theta_plus: bounds.theta_plus,
    })
}

fn closed_form_ring_area(k: f64, margin: f64, cos_xi: f64) -> f64 {
    PI * k * k * margin * cos_xi
}

/// Unclamped ring area `S = π (2πd/λ)² cos ξ · λ φ_t / (2π dz)`, which for
/// `d = dz` reads `(2π² d / λ) cos ξ φ_t`. Exact only in the medium case.
pub fn closed_form_area(stack: &Stack3D, xi: f64, t: Threshold) -> Result<f64> {
    let d = ring_lattice_spacing(stack)?;
    Ok(closed_form_ring_area(
        TAU * d,
        t.cosine_margin(stack.dz()),
        xi.cos(),
    ))
}

/// Feasible volume split into its steerable and residual parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeBreakdown {
    /// `(1/π³) ∫ steerable_area dγ`.
    pub steerable: f64,
    /// `(1/π³) ∫ residual_area dγ`, the non-steerable mirror bands.
    pub residual: f64,
    /// Upper end of the γ range that maps to a real beam angle.
    pub gamma_max: f64,
}

/// Integrates the annulus areas over `γ ∈ [0, min(π, 2π dz/λ)]` with
/// `cos ξ = γ λ / (2π dz)`.
pub fn feasible_volume_breakdown(
    stack: &Stack3D,
    t: Threshold,
    quad: &QuadratureSpec,
) -> Result<VolumeBreakdown> {
    ring_lattice_spacing(stack)?;
    let dz = stack.dz();
    let gamma_max = PI.min(TAU * dz);
    let margin = t.cosine_margin(dz);
    // split where the clamps switch on so every panel sees a smooth integrand
    let mut cuts = vec![0.0, gamma_max];
    for cos_xi in [1.0 - margin, margin] {
        let g = TAU * dz * cos_xi;
        if g > 0.0 && g < gamma_max {
            cuts.push(g);
        }
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();

    let mut steerable = 0.0;
    let mut residual = 0.0;
    for pair in cuts.windows(2) {
        let ring = |gamma: f64| annulus_from_cos(stack, (gamma / (TAU * dz)).clamp(0.0, 1.0), t);
        // the spacing was validated above, so the ring cannot fail here
        steerable += integrate(quad, pair[0], pair[1], |g| {
            ring(g).map(|a| a.steerable_area).unwrap_or(0.0)
        });
        residual += integrate(quad, pair[0], pair[1], |g| {
            ring(g).map(|a| a.residual_area).unwrap_or(0.0)
        });
    }
    let norm = PI * PI * PI;
    Ok(VolumeBreakdown {
        steerable: steerable / norm,
        residual: residual / norm,
        gamma_max,
    })
}

/// Normalised feasible volume `V(t)` of steerable beams.
pub fn feasible_volume(stack: &Stack3D, t: Threshold, quad: &QuadratureSpec) -> Result<f64> {
    Ok(feasible_volume_breakdown(stack, t, quad)?.steerable)
}

/// Exact integral of the steerable area, piecewise polynomial in `cos ξ`.
///
/// With `x = cos ξ` and margin `c`, the steerable area is
/// `π k² [min(x + c, 1)² − max(x − c, 0)²] / 4`.
pub fn feasible_volume_exact(stack: &Stack3D, t: Threshold) -> Result<f64> {
    let d = ring_lattice_spacing(stack)?;
    let dz = stack.dz();
    let c = t.cosine_margin(dz);
    let x_max = (0.5 / dz).min(1.0);
    let knee = (1.0 - c).max(0.0);
    let lower = if x_max <= knee {
        ((x_max + c).powi(3) - c.powi(3)) / 3.0
    } else {
        ((knee + c).powi(3) - c.powi(3)) / 3.0 + (x_max - knee)
    };
    let upper = (x_max - c).max(0.0).powi(3) / 3.0;
    Ok(TAU * d * d * dz * (lower - upper))
}

/// Point-wise form of the ring constraints for any `dx`, `dy`:
/// `1 − (cos ξ + c)² ≤ (α/2πdx)² + (β/2πdy)² ≤ 1 − (cos ξ − c)²`, with the
/// arguments clamped to the visible hemisphere.
pub fn in_feasible_ring(stack: &Stack3D, alpha: f64, beta: f64, xi: f64, t: Threshold) -> bool {
    let lat = stack.layer();
    let s2 = (alpha / lat.alpha_semi_axis()).powi(2) + (beta / lat.beta_semi_axis()).powi(2);
    let c = t.cosine_margin(stack.dz());
    let cos_xi = xi.cos();
    let top = (cos_xi + c).min(1.0);
    let bottom = (cos_xi - c).max(0.0);
    top >= 0.0 && s2 >= 1.0 - top * top && s2 <= 1.0 - bottom * bottom
}

/// Which terminal condition closed the codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalScenario {
    /// Last beam angle inside the octant, its upper bound past the horizon.
    BeamInsideOctant,
    /// Last beam angle itself past the horizon.
    BeamPastHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodebookEntry {
    /// 1-based codeword index.
    pub index: usize,
    pub cos_xi: f64,
    pub xi: f64,
    /// Inter-layer step `2π dz cos ξ / λ`.
    pub gamma: f64,
    pub annulus: FeasibleAnnulus,
}

/// Elevation codebook whose θ bands tile `[0, π/2]` end to end.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub entries: Vec<CodebookEntry>,
    pub threshold: Threshold,
    pub region_count: usize,
    pub terminal: TerminalScenario,
}

/// Snaps values within this distance of an integer before flooring.
const COUNT_SNAP: f64 = 1e-9;

/// `P = ⌊2π dz / (2λ φ_t)⌋ + 1`.
pub fn region_count(stack: &Stack3D, t: Threshold) -> Result<usize> {
    stack.require_two_layers("the elevation codebook")?;
    let margin = t.phase_margin();
    if margin <= 0.0 {
        return Err(Error::domain(
            "threshold t = 2 leaves no phase margin; the codebook would be infinite",
        ));
    }
    let ratio = TAU * stack.dz() / (2.0 * margin);
    let nearest = ratio.round();
    let floor = if (ratio - nearest).abs() < COUNT_SNAP {
        nearest
    } else {
        ratio.floor()
    };
    Ok(floor as usize + 1)
}

/// Builds the codebook `cos ξ_p = 1 − (2p − 1) λ φ_t / (2π dz)`, `p = 1..P`.
pub fn build_codebook(stack: &Stack3D, t: Threshold) -> Result<Codebook> {
    let count = region_count(stack, t)?;
    let margin = t.cosine_margin(stack.dz());
    let mut entries = Vec::with_capacity(count);
    for p in 1..=count {
        let mut cos_xi = 1.0 - (2 * p - 1) as f64 * margin;
        if p == count {
            cos_xi = cos_xi.clamp(-1.0, 1.0);
        }
        let annulus = annulus_from_cos(stack, cos_xi, t)?;
        entries.push(CodebookEntry {
            index: p,
            cos_xi,
            xi: cos_xi.clamp(-1.0, 1.0).acos(),
            gamma: TAU * stack.dz() * cos_xi,
            annulus,
        });
    }
    let last = entries.last().expect("region count is at least one");
    let terminal = if last.xi <= FRAC_PI_2 {
        TerminalScenario::BeamInsideOctant
    } else {
        TerminalScenario::BeamPastHorizon
    };
    Ok(Codebook {
        entries,
        threshold: t,
        region_count: count,
        terminal,
    })
}
