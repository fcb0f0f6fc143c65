//! Finite-excitation spectral window.

use std::f64::consts::{PI, TAU};

use crate::geometry::QuadratureSpec;
use crate::quadrature::CompositeRule;

/// Below this `|sin(x/2)|` the kernel is replaced by its peak value.
const SINGULAR_SIN: f64 = 1e-9;

/// One-axis Fejér kernel `sin²(Mx/2) / (M sin²(x/2))`, unit mean over a
/// period and peak value `M` at `x = 0`.
pub fn fejer_1d(count: usize, x: f64) -> f64 {
    let m = count as f64;
    let s = (0.5 * x).sin();
    if s.abs() < SINGULAR_SIN {
        return m;
    }
    let num = (0.5 * m * x).sin();
    num * num / (m * s * s)
}

/// `|A(ϱ, ζ; α, β)|²` of an `M × N` uniformly excited patch: the product of
/// one-axis Fejér kernels in `α − ϱ` and `β − ζ`.
pub fn fejer_weight(
    m_count: usize,
    n_count: usize,
    alpha: f64,
    beta: f64,
    rho: f64,
    zeta: f64,
) -> f64 {
    fejer_1d(m_count, alpha - rho) * fejer_1d(n_count, beta - zeta)
}

/// Mean of [`fejer_weight`] over the `2π × 2π` period, by quadrature.
pub fn fejer_mean(m_count: usize, n_count: usize, quad: &QuadratureSpec) -> f64 {
    let rule = CompositeRule::new(quad, -PI, PI);
    let along = |count: usize| rule.integrate(|x| fejer_1d(count, x)) / TAU;
    along(m_count) * along(n_count)
}
