//! Projected-aperture gain of a stacked array relative to a flat one.
//!
//! A stack presents its vertical faces to low-elevation directions, so its
//! effective area in direction `(θ, φ)` is
//! `A_e = A_xy cos θ + A_xz sin φ sin θ + A_yz cos φ sin θ`. Averaged over
//! an angular window and divided by the flat-array area `A_xy cos θ`, this
//! gives the gain ratio.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{AngularRegion, QuadratureSpec, SphericalDirection, Stack3D};
use crate::quadrature::{integrate, integrate_2d};

/// Projected apertures on the three coordinate planes, in λ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureSet {
    pub a_xy: f64,
    pub a_xz: f64,
    pub a_yz: f64,
}

impl ApertureSet {
    pub fn new(a_xy: f64, a_xz: f64, a_yz: f64) -> Result<Self> {
        if ![a_xy, a_xz, a_yz]
            .iter()
            .all(|a| a.is_finite() && *a >= 0.0)
        {
            return Err(Error::domain(format!(
                "apertures must be finite and nonnegative ({a_xy}, {a_xz}, {a_yz})"
            )));
        }
        Ok(Self { a_xy, a_xz, a_yz })
    }

    /// Hull apertures of a stack: `(count − 1) · spacing` along each axis.
    pub fn from_stack(stack: &Stack3D) -> Self {
        let lat = stack.layer();
        let w = (lat.m_count() - 1) as f64 * lat.dx();
        let d = (lat.n_count() - 1) as f64 * lat.dy();
        let h = (stack.layer_count() - 1) as f64 * stack.dz();
        Self {
            a_xy: w * d,
            a_xz: w * h,
            a_yz: d * h,
        }
    }

    fn require_flat_area(&self) -> Result<()> {
        if self.a_xy > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(
                "gain ratios are relative to A_xy, which is zero",
            ))
        }
    }

    fn vertical_projection(&self, phi: f64) -> f64 {
        self.a_xz * phi.sin() + self.a_yz * phi.cos()
    }
}

/// `A_e(θ, φ)` in the first octant.
pub fn effective_area(apertures: &ApertureSet, dir: SphericalDirection) -> Result<f64> {
    if !dir.in_first_octant() {
        return Err(Error::domain(format!(
            "projected area is defined in the first octant (θ={}, φ={})",
            dir.theta, dir.phi_az
        )));
    }
    let (st, ct) = dir.theta.sin_cos();
    Ok(apertures.a_xy * ct + apertures.vertical_projection(dir.phi_az) * st)
}

/// Region-averaged gain of the stack over the flat array.
///
/// For `φ₁ < φ₂` this is the solid-angle (`sin θ dθ dφ`) average in closed
/// form. A window with `φ₁ = φ₂` is a single meridian arc and is averaged
/// over arc length (`dθ`).
pub fn avg_gain_ratio(apertures: &ApertureSet, region: &AngularRegion) -> Result<f64> {
    apertures.require_flat_area()?;
    let AngularRegion {
        theta1,
        theta2,
        phi1,
        phi2,
    } = *region;
    if theta2 <= theta1 {
        return Err(Error::domain(format!(
            "empty elevation range [{theta1}, {theta2}]: the flat-array integral vanishes"
        )));
    }
    if phi2 > phi1 {
        // ∫ sin²θ dθ and ∫ sinθ cosθ dθ over [θ₁, θ₂]
        let sin_sq = theta2 - theta1 - 0.5 * ((2.0 * theta2).sin() - (2.0 * theta1).sin());
        let sin_cos = theta2.sin().powi(2) - theta1.sin().powi(2);
        let vertical =
            apertures.a_xz * (phi1.cos() - phi2.cos()) + apertures.a_yz * (phi2.sin() - phi1.sin());
        Ok(1.0 + vertical * sin_sq / (apertures.a_xy * (phi2 - phi1) * sin_cos))
    } else {
        let num = apertures.vertical_projection(phi1) * (theta1.cos() - theta2.cos());
        Ok(1.0 + num / (apertures.a_xy * (theta2.sin() - theta1.sin())))
    }
}

/// `A_em = λ² D₀ / (4π)`.
pub fn max_effective_aperture(directivity: f64, wavelength: f64) -> Result<f64> {
    if !(directivity > 0.0 && wavelength > 0.0) {
        return Err(Error::domain(format!(
            "directivity ({directivity}) and wavelength ({wavelength}) must be positive"
        )));
    }
    Ok(wavelength * wavelength * directivity / (4.0 * PI))
}

/// Gain ratio over an arbitrary `(θ, φ)` window, by quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedGain {
    pub ratio: f64,
    /// Always true: the value uses `|projection|` terms and lies outside
    /// the octant-valid closed form.
    pub extended: bool,
}

/// Window-averaged `A_xy|cos θ| + A_xz|sin φ sin θ| + A_yz|cos φ sin θ|`
/// relative to `A_xy|cos θ|`, for `θ ∈ [0, π]`, `φ ∈ [0, 2π]`.
pub fn avg_gain_ratio_extended(
    apertures: &ApertureSet,
    theta: (f64, f64),
    phi: (f64, f64),
    quad: &QuadratureSpec,
) -> Result<ExtendedGain> {
    apertures.require_flat_area()?;
    let (t1, t2) = theta;
    let (p1, p2) = phi;
    if !(0.0 <= t1 && t1 < t2 && t2 <= PI) {
        return Err(Error::domain(format!(
            "theta window [{t1}, {t2}] outside [0, π]"
        )));
    }
    if !(0.0 <= p1 && p1 <= p2 && p2 <= 2.0 * PI) {
        return Err(Error::domain(format!(
            "phi window [{p1}, {p2}] outside [0, 2π]"
        )));
    }
    let projected = |t: f64, p: f64| {
        let (st, ct) = t.sin_cos();
        let (sp, cp) = p.sin_cos();
        (
            apertures.a_xy * ct.abs()
                + apertures.a_xz * (sp * st).abs()
                + apertures.a_yz * (cp * st).abs(),
            apertures.a_xy * ct.abs(),
        )
    };
    let (num, den) = if p2 > p1 {
        (
            integrate_2d(quad, (t1, t2), (p1, p2), |t, p| projected(t, p).0 * t.sin()),
            integrate_2d(quad, (t1, t2), (p1, p2), |t, p| projected(t, p).1 * t.sin()),
        )
    } else {
        (
            integrate(quad, t1, t2, |t| projected(t, p1).0),
            integrate(quad, t1, t2, |t| projected(t, p1).1),
        )
    };
    if den <= 0.0 {
        return Err(Error::domain("flat-array projection integrates to zero"));
    }
    Ok(ExtendedGain {
        ratio: num / den,
        extended: true,
    })
}
