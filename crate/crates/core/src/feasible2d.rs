//! Visible-region classification of planar phase pairs and the DFT sample
//! grid of a finite lattice.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{ArrayLattice2D, QuadratureSpec};
use crate::quadrature::integrate;

/// `(λα / 2π dx)² + (λβ / 2π dy)²`, the squared sine of the steered polar
/// angle when the pair is feasible.
pub fn normalized_radius_sq(lattice: &ArrayLattice2D, alpha: f64, beta: f64) -> f64 {
    let a = alpha / lattice.alpha_semi_axis();
    let b = beta / lattice.beta_semi_axis();
    a * a + b * b
}

/// True iff `(α, β)` lies inside or on the visible-region ellipse.
pub fn is_feasible_2d(lattice: &ArrayLattice2D, alpha: f64, beta: f64) -> bool {
    normalized_radius_sq(lattice, alpha, beta) <= 1.0
}

/// Phase of DFT bin `index` of `count`, folded into `(-π, π]`.
///
/// Bins past the midpoint are shifted down by one period; the midpoint of
/// an even grid maps to exactly `π`.
pub fn sample_phase(index: usize, count: usize) -> f64 {
    debug_assert!(index < count);
    if 2 * index == count {
        return PI;
    }
    let signed = if 2 * index > count {
        index as f64 - count as f64
    } else {
        index as f64
    };
    TAU * signed / count as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub feasible: bool,
}

/// All `M × N` DFT sample points of a lattice, row-major in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub lattice: ArrayLattice2D,
    pub points: Vec<SamplePoint>,
}

impl SampleGrid {
    pub fn feasible_count(&self) -> usize {
        self.points.iter().filter(|p| p.feasible).count()
    }

    pub fn infeasible_count(&self) -> usize {
        self.points.len() - self.feasible_count()
    }

    pub fn feasible_fraction(&self) -> f64 {
        self.feasible_count() as f64 / self.points.len() as f64
    }
}

pub fn build_sample_grid(lattice: &ArrayLattice2D) -> SampleGrid {
    let (mc, nc) = (lattice.m_count(), lattice.n_count());
    let points = (0..mc)
        .into_par_iter()
        .flat_map_iter(|m| {
            let alpha = sample_phase(m, mc);
            (0..nc).map(move |n| {
                let beta = sample_phase(n, nc);
                SamplePoint {
                    m,
                    n,
                    alpha,
                    beta,
                    feasible: is_feasible_2d(lattice, alpha, beta),
                }
            })
        })
        .collect();
    SampleGrid {
        lattice: *lattice,
        points,
    }
}

/// Closed-form feasible fraction `π dx dy / λ²` of the phase square.
///
/// Refused when grating lobes are possible: the ellipse then spills past
/// the phase square and the closed form overcounts.
pub fn feasible_fraction_infinite(lattice: &ArrayLattice2D) -> Result<f64> {
    lattice.require_grating_lobe_free("the closed-form feasible fraction")?;
    Ok(PI * lattice.dx() * lattice.dy())
}

/// Area fraction of `[0, π]²` covered by the visible-region ellipse, by
/// quadrature. Valid for any spacing.
pub fn feasible_fraction_numerical(lattice: &ArrayLattice2D, quad: &QuadratureSpec) -> f64 {
    let a = lattice.alpha_semi_axis();
    let b = lattice.beta_semi_axis();
    // α = a sin u makes the boundary height b cos u smooth in u
    let u_max = if a <= PI { FRAC_PI_2 } else { (PI / a).asin() };
    let integrand = |u: f64| (b * u.cos()).min(PI) * a * u.cos();
    let area = if b > PI {
        let u_kink = (PI / b).acos().min(u_max);
        integrate(quad, 0.0, u_kink, integrand) + integrate(quad, u_kink, u_max, integrand)
    } else {
        integrate(quad, 0.0, u_max, integrand)
    };
    (area / (PI * PI)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use approx::assert_abs_diff_eq;

    fn half_wave(m: usize) -> ArrayLattice2D {
        ArrayLattice2D::half_wave(m, m).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let lat = half_wave(4);
        assert!(is_feasible_2d(&lat, 0.0, 0.0));
        assert!(!is_feasible_2d(&lat, PI, PI));
        assert!(is_feasible_2d(&lat, PI, 0.0));
        assert!(is_feasible_2d(&lat, 0.0, -PI));
    }

    #[test]
    fn sample_phases_fold_to_half_open_interval() {
        assert_eq!(sample_phase(0, 1), 0.0);
        assert_eq!(sample_phase(1, 2), PI);
        assert_eq!(sample_phase(3, 6), PI);
        assert_abs_diff_eq!(sample_phase(3, 4), -FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sample_phase(2, 3), -TAU / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn single_element_grid() {
        let g = build_sample_grid(&half_wave(1));
        assert_eq!(g.points.len(), 1);
        assert_eq!((g.points[0].alpha, g.points[0].beta), (0.0, 0.0));
        assert!(g.points[0].feasible);
    }

    #[test]
    fn two_by_two_grid_has_one_infeasible_corner() {
        let g = build_sample_grid(&half_wave(2));
        assert_eq!(g.points.len(), 4);
        assert_eq!(g.feasible_count(), 3);
        let bad: Vec<_> = g.points.iter().filter(|p| !p.feasible).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].alpha, bad[0].beta), (PI, PI));
    }

    #[test]
    fn ten_by_ten_matches_disk_count() {
        let g = build_sample_grid(&half_wave(10));
        // brute force: integer pairs (i, j) with i, j in -4..=5 inside radius 5
        let mut expected = 0;
        for i in -4i32..=5 {
            for j in -4i32..=5 {
                if i * i + j * j <= 25 {
                    expected += 1;
                }
            }
        }
        assert_eq!(g.feasible_count(), expected);
        assert_eq!(g.feasible_count() + g.infeasible_count(), 100);
        assert!((g.feasible_fraction() - PI / 4.0).abs() < 0.1);
    }

    #[test]
    fn closed_form_fractions() {
        let f = |dx, dy| feasible_fraction_infinite(&ArrayLattice2D::new(3, 3, dx, dy).unwrap());
        assert_abs_diff_eq!(f(0.5, 0.5).unwrap(), 1f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(f(0.25, 0.25).unwrap(), PI / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f(0.5, 0.25).unwrap(), PI / 8.0, epsilon = 1e-15);
        assert!(matches!(f(0.6, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn numerical_fraction_matches_closed_form_and_grid() {
        let quad = QuadratureSpec::default();
        for (dx, dy) in [(0.5, 0.5), (0.3, 0.45), (0.25, 0.5)] {
            let lat = ArrayLattice2D::new(3, 3, dx, dy).unwrap();
            let num = feasible_fraction_numerical(&lat, &quad);
            assert_abs_diff_eq!(num, PI * dx * dy, epsilon = 1e-10);
        }
        // grating-lobe regime: compare against a fine midpoint count
        for (dx, dy) in [(0.7, 0.5), (0.8, 0.9), (0.5, 1.2)] {
            let lat = ArrayLattice2D::new(3, 3, dx, dy).unwrap();
            let num = feasible_fraction_numerical(&lat, &quad);
            let res = 2000;
            let h = PI / res as f64;
            let mut hits = 0usize;
            for i in 0..res {
                for j in 0..res {
                    let (a, b) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                    if is_feasible_2d(&lat, a, b) {
                        hits += 1;
                    }
                }
            }
            let count = hits as f64 / (res * res) as f64;
            assert!((num - count).abs() < 2e-3, "{dx},{dy}: {num} vs {count}");
            assert!(num <= 1.0, "{num}");
        }
    }

    #[test]
    fn grid_fraction_converges_to_closed_form() {
        for (dx, dy) in [(0.5, 0.5), (0.4, 0.3)] {
            let mut previous = f64::INFINITY;
            let exact = PI * dx * dy;
            for m in [8usize, 16, 32, 64] {
                let lat = ArrayLattice2D::new(m, m, dx, dy).unwrap();
                let gap = (build_sample_grid(&lat).feasible_fraction() - exact).abs();
                assert!(
                    gap <= previous + 2.0 / m as f64,
                    "m={m}: gap {gap}, previous {previous}"
                );
                assert!(gap < 4.0 / m as f64);
                previous = gap;
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mirror_symmetry(dx in 0.05f64..1.0, dy in 0.05f64..1.0, a in -PI..PI, b in -PI..PI) {
                let lat = ArrayLattice2D::new(2, 2, dx, dy).unwrap();
                let f = is_feasible_2d(&lat, a, b);
                prop_assert_eq!(f, is_feasible_2d(&lat, -a, b));
                prop_assert_eq!(f, is_feasible_2d(&lat, a, -b));
            }
        }
    }
}
