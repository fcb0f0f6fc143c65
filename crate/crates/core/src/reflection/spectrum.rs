//! Cosine-series evaluation of the finite-excitation convolution.
//!
//! The reflected-power field `|R(ϱ, ζ)|² = 1 − 𝟙_D g(cos θ)` is even in
//! both phase axes, so its Fourier series is a cosine series. Convolving
//! with the separable Fejér window only rescales coefficient `(k, l)` by
//! `(1 − |k|/M)(1 − |l|/N)` and truncates to `|k| < M`, `|l| < N`. The
//! coefficients are integrals over the visible ellipse, computed once per
//! (lattice, support, profile, quadrature) and shared through a cache.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;

use crate::feasible3d::combining_factor;
use crate::geometry::{ArrayLattice2D, QuadratureSpec};
use crate::quadrature::CompositeRule;

/// Radiated fraction inside the visible region as a function of `cos θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SliceProfile {
    /// Infinite-array assumption: everything inside the ellipse radiates.
    Mask,
    /// Stacked array at a fixed inter-layer step `gamma`.
    Analytic {
        dz: f64,
        gamma: f64,
        layer_count: usize,
    },
}

impl SliceProfile {
    /// Fraction `g` of the available power that radiates, so `|R|² = 1 − g`.
    pub fn radiated(&self, cos_theta: f64) -> f64 {
        match *self {
            SliceProfile::Mask => 1.0,
            SliceProfile::Analytic {
                dz,
                gamma,
                layer_count,
            } => {
                let mismatch = gamma - 2.0 * PI * dz * cos_theta;
                let amp = combining_factor(layer_count, mismatch) / layer_count as f64;
                amp * amp
            }
        }
    }

    fn key_bits(&self) -> (u8, u64, u64, usize) {
        match *self {
            SliceProfile::Mask => (0, 0, 0, 0),
            SliceProfile::Analytic {
                dz,
                gamma,
                layer_count,
            } => (1, dz.to_bits(), gamma.to_bits(), layer_count),
        }
    }
}

/// Cosine coefficients `c[k][l]` (`k < M`, `l < N`) of a reflected-power
/// field, plus the Fejér window of an `M × N` patch.
#[derive(Debug, Clone)]
pub struct SliceSpectrum {
    m_terms: usize,
    n_terms: usize,
    coeffs: Vec<f64>,
}

impl SliceSpectrum {
    pub fn coefficient(&self, k: usize, l: usize) -> f64 {
        self.coeffs[k * self.n_terms + l]
    }

    /// Windowed cosine sum at `(α, β)`: the finite-excitation reflected power.
    pub fn convolved_power(&self, alpha: f64, beta: f64) -> f64 {
        let (mt, nt) = (self.m_terms, self.n_terms);
        let col = windowed_cosines(nt, beta);
        let row = windowed_cosines(mt, alpha);
        let total: f64 = row
            .iter()
            .enumerate()
            .map(|(k, rk)| {
                let line = &self.coeffs[k * nt..(k + 1) * nt];
                rk * line.iter().zip(&col).map(|(c, w)| c * w).sum::<f64>()
            })
            .sum();
        total.clamp(0.0, 1.0)
    }
}

/// `m_k (1 − k/M) cos(kx)` for `k < M`, with `m_0 = 1`, `m_k = 2`.
fn windowed_cosines(count: usize, x: f64) -> Vec<f64> {
    let cosines = cosine_ladder(count, x);
    let m = count as f64;
    cosines
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let mult = if k == 0 { 1.0 } else { 2.0 };
            mult * (1.0 - k as f64 / m) * c
        })
        .collect()
}

/// `cos(kx)` for `k < count` via the Chebyshev recurrence.
fn cosine_ladder(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let c1 = x.cos();
    out.push(1.0);
    if count > 1 {
        out.push(c1);
    }
    for k in 2..count {
        let next = 2.0 * c1 * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

type SpectrumKey = (
    u64,
    u64,
    usize,
    usize,
    QuadratureSpec,
    (u8, u64, u64, usize),
);

fn cache() -> &'static RwLock<HashMap<SpectrumKey, Arc<SliceSpectrum>>> {
    static CACHE: OnceLock<RwLock<HashMap<SpectrumKey, Arc<SliceSpectrum>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Spectrum of `profile` on `lattice`'s visible region with support
/// `m_terms × n_terms`, computed on first use and cached afterwards.
pub fn slice_spectrum(
    lattice: &ArrayLattice2D,
    m_terms: usize,
    n_terms: usize,
    profile: SliceProfile,
    quad: &QuadratureSpec,
) -> Arc<SliceSpectrum> {
    let key = (
        lattice.dx().to_bits(),
        lattice.dy().to_bits(),
        m_terms,
        n_terms,
        *quad,
        profile.key_bits(),
    );
    if let Some(hit) = cache().read().expect("spectrum cache poisoned").get(&key) {
        return Arc::clone(hit);
    }
    let fresh = Arc::new(compute_spectrum(lattice, m_terms, n_terms, profile, quad));
    let mut map = cache().write().expect("spectrum cache poisoned");
    Arc::clone(map.entry(key).or_insert(fresh))
}

fn compute_spectrum(
    lattice: &ArrayLattice2D,
    m_terms: usize,
    n_terms: usize,
    profile: SliceProfile,
    quad: &QuadratureSpec,
) -> SliceSpectrum {
    let a = lattice.alpha_semi_axis();
    let b = lattice.beta_semi_axis();
    // ϱ = a sin u, ζ = b cos u sin v, so cos θ = cos u cos v on the ellipse
    let u_max = if a <= PI { FRAC_PI_2 } else { (PI / a).asin() };
    let u_rule = CompositeRule::new(quad, 0.0, u_max);
    let s_rule = CompositeRule::new(quad, 0.0, 1.0);

    // inner integrals G_l(u) = ∫ g cos(lζ) dζ over the clipped chord
    let inner: Vec<Vec<f64>> = u_rule
        .nodes
        .par_iter()
        .map(|&u| {
            let cu = u.cos();
            let half_chord = b * cu;
            match profile {
                SliceProfile::Mask => {
                    let h = half_chord.min(PI);
                    (0..n_terms)
                        .map(|l| {
                            if l == 0 {
                                h
                            } else {
                                (l as f64 * h).sin() / l as f64
                            }
                        })
                        .collect()
                }
                SliceProfile::Analytic { .. } => {
                    let v_max = if half_chord <= PI {
                        FRAC_PI_2
                    } else {
                        (PI / half_chord).asin()
                    };
                    let mut acc = vec![0.0; n_terms];
                    for (s, ws) in s_rule.iter() {
                        let v = v_max * s;
                        let (sv, cv) = v.sin_cos();
                        let g = profile.radiated(cu * cv);
                        let weight = ws * v_max * g * half_chord * cv;
                        for (slot, c) in acc.iter_mut().zip(cosine_ladder(n_terms, half_chord * sv))
                        {
                            *slot += weight * c;
                        }
                    }
                    acc
                }
            }
        })
        .collect();

    let mut radiated = vec![0.0; m_terms * n_terms];
    for ((u, wu), g_l) in u_rule.iter().zip(&inner) {
        let cu = u.cos();
        let ladder = cosine_ladder(m_terms, a * u.sin());
        for (k, ck) in ladder.iter().enumerate() {
            let scale = wu * a * cu * ck;
            let row = &mut radiated[k * n_terms..(k + 1) * n_terms];
            for (slot, gl) in row.iter_mut().zip(g_l) {
                *slot += scale * gl;
            }
        }
    }

    // quarter-ellipse integrals → full period average: ×4 / (2π)²
    let mut coeffs: Vec<f64> = radiated.into_iter().map(|e| -e / (PI * PI)).collect();
    if !coeffs.is_empty() {
        coeffs[0] += 1.0;
    }
    SliceSpectrum {
        m_terms,
        n_terms,
        coeffs,
    }
}
