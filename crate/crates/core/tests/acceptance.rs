//! Acceptance criteria 1 to 10. Each prints one PASS/FAIL line; the binary
//! exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};
use std::time::{Duration, Instant};

use arraylimits::beamsim::{
    directivity, main_beam_intensity, scan_sweep, ArrayLayout, ElementPattern, ScanPlane,
};
use arraylimits::efficiency::{
    eta_finite_2d, eta_infinite_2d, eta_infinite_3d, eta_infinite_3d_numerical,
};
use arraylimits::feasible3d::{
    annulus, build_codebook, combining_factor, feasible_volume, Threshold,
};
use arraylimits::gain::{avg_gain_ratio, ApertureSet};
use arraylimits::quadrature::{integrate_2d, CompositeRule};
use arraylimits::reflection::{
    analytic_reflection_3d, mask_reflection, parseval_check, CouplingField, LayerTag,
};
use arraylimits::{AngularRegion, ArrayLattice2D, PhaseSet, QuadratureSpec, Stack3D};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn half_wave(m: usize) -> ArrayLattice2D {
    ArrayLattice2D::half_wave(m, m).unwrap()
}

fn th(t: f64) -> Threshold {
    Threshold::new(t).unwrap()
}

/// `1 − (1/π²) ∬_{[0,π]²} mask`, splitting β at the rim and using
/// `α = π sin u` so no panel straddles the discontinuity.
fn hannan_by_quadrature(lat: &ArrayLattice2D, quad: &QuadratureSpec) -> f64 {
    let rule = CompositeRule::new(quad, 0.0, FRAC_PI_2);
    let mut mean = 0.0;
    for (u, wu) in rule.iter() {
        let alpha = PI * u.sin();
        let rim = PI * u.cos();
        let inside =
            CompositeRule::new(quad, 0.0, rim).integrate(|b| mask_reflection(lat, alpha, b));
        let outside =
            CompositeRule::new(quad, rim, PI).integrate(|b| mask_reflection(lat, alpha, b));
        mean += wu * PI * u.cos() * (inside + outside);
    }
    1.0 - mean / (PI * PI)
}

fn criterion_1() -> Outcome {
    let lat = half_wave(8);
    let eta = eta_infinite_2d(&lat).unwrap();
    let cross = hannan_by_quadrature(&lat, &QuadratureSpec::default());
    let (e1, e2) = ((eta - FRAC_PI_4).abs(), (cross - FRAC_PI_4).abs());
    check(
        e1 <= 1e-12 && e2 <= 1e-8,
        format!("eta={eta:.15} |eta-pi/4|={e1:.1e} mask-quadrature gap={e2:.1e}"),
    )
}

fn criterion_2() -> Outcome {
    let quad = QuadratureSpec::default();
    let lat = half_wave(8);
    let eta_2d = eta_infinite_2d(&lat).unwrap();
    let mut worst = 0.0f64;
    let mut exact = true;
    for dz in [0.25, 0.5, 0.75] {
        let s = Stack3D::new(lat, dz).unwrap();
        exact &= eta_infinite_3d(&s).unwrap() == eta_2d / 2.0;
        worst = worst.max((eta_infinite_3d_numerical(&s, &quad).unwrap() - eta_2d / 2.0).abs());
    }
    check(
        exact && worst < 1e-8,
        format!(
            "exact halving={exact} worst numerical gap={worst:.1e} over dz in {{0.25,0.5,0.75}}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let quad = QuadratureSpec::default();
    let mut gaps = Vec::new();
    for m in [4usize, 8, 16, 32] {
        let eta = eta_finite_2d(&half_wave(m), &quad).unwrap().eta;
        gaps.push((m, eta - FRAC_PI_4));
    }
    let above = gaps.iter().all(|&(_, g)| g >= 0.0);
    let g4 = gaps[0].1;
    let g32 = gaps[3].1;
    let listing: Vec<String> = gaps.iter().map(|(m, g)| format!("M={m}:{g:.5}")).collect();
    check(
        above && g32 < g4 && g32 < 0.1,
        format!("gaps to pi/4 {}", listing.join(" ")),
    )
}

fn random_symmetric_field(rng: &mut ChaCha8Rng, tag: LayerTag) -> CouplingField {
    let mut field = CouplingField::new(tag);
    for _ in 0..rng.gen_range(1..=4) {
        let p = rng.gen_range(0..=3);
        let q = rng.gen_range(0..=3);
        let c = Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        field.insert_mirrored(p, q, c);
    }
    field
}

fn criterion_4() -> Outcome {
    let quad = QuadratureSpec::new(32, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let fields = [
            random_symmetric_field(&mut rng, LayerTag::Same),
            random_symmetric_field(&mut rng, LayerTag::Cross),
        ];
        // the direct sum is formed here, independently of the library
        let rhs: f64 = fields
            .iter()
            .flat_map(|f| f.coefficients.values())
            .map(|c| c.norm_sqr())
            .sum();
        let (lhs, _) = parseval_check(&fields, &quad);
        worst = worst.max((lhs - rhs).abs());
    }
    check(
        worst < 1e-6,
        format!("50 mirror-symmetric fields, worst |LHS-RHS|={worst:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let hemi = avg_gain_ratio(
        &ApertureSet::new(4.0, 1.5, 1.5).unwrap(),
        &AngularRegion::horizontal_hemispace(),
    )
    .unwrap();
    let mut octant_exact = true;
    for (a_xy, a_xz, a_yz) in [
        (4.0, 1.5, 1.5),
        (4.0, 1.5, 0.0),
        (2.0, 0.5, 1.0),
        (1.0, 3.0, 0.25),
    ] {
        let g = avg_gain_ratio(
            &ApertureSet::new(a_xy, a_xz, a_yz).unwrap(),
            &AngularRegion::first_octant(),
        )
        .unwrap();
        octant_exact &= g == 1.0 + (a_xz + a_yz) / a_xy;
    }
    check(
        hemi == 1.375 && octant_exact,
        format!("hemispace G={hemi} octant closed form exact={octant_exact}"),
    )
}

fn criterion_6() -> Outcome {
    let quad = QuadratureSpec::new(16, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut pair = || {
            let a = rng.gen_range(0.0..FRAC_PI_2);
            let b = rng.gen_range(0.0..FRAC_PI_2);
            (a.min(b), a.max(b))
        };
        let (t1, t2) = pair();
        let (p1, p2) = pair();
        let ap = ApertureSet::new(
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
        )
        .unwrap();
        let region = AngularRegion::new(t1, t2, p1, p2).unwrap();
        let closed = avg_gain_ratio(&ap, &region).unwrap();
        let effective = |t: f64, p: f64| {
            ap.a_xy * t.cos() + ap.a_xz * p.sin() * t.sin() + ap.a_yz * p.cos() * t.sin()
        };
        let num = integrate_2d(&quad, (t1, t2), (p1, p2), |t, p| effective(t, p) * t.sin());
        let den = integrate_2d(&quad, (t1, t2), (p1, p2), |t, _| {
            ap.a_xy * t.cos() * t.sin()
        });
        worst = worst.max(((num / den) - closed).abs() / closed);
    }
    check(
        worst < 1e-9,
        format!("100 random octant regions, worst relative error={worst:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let res = 512usize;
    let h = PI / res as f64;
    let stack = Stack3D::new(half_wave(8), 0.5).unwrap();
    let mut worst = 0.0f64;
    for t in [1.0, SQRT_2, 1.8] {
        for cos_xi in [0.25, 0.5, 0.75] {
            let ring = annulus(&stack, f64::acos(cos_xi), th(t)).unwrap();
            let gamma = TAU * 0.5 * cos_xi;
            let mut mismatch = 0usize;
            for i in 0..res {
                let a = (i as f64 + 0.5) * h;
                for j in 0..res {
                    let b = (j as f64 + 0.5) * h;
                    let s2 = (a * a + b * b) / (PI * PI);
                    let brute =
                        s2 <= 1.0 && combining_factor(2, gamma - PI * (1.0 - s2).sqrt()) >= t;
                    if brute != ring.contains(a, b) {
                        mismatch += 1;
                    }
                }
            }
            worst = worst.max(mismatch as f64 / (res * res) as f64);
        }
    }
    check(
        worst < 0.02,
        format!(
            "9 (t, cos xi) cases at 512^2, worst symmetric difference={:.3}% of square",
            100.0 * worst
        ),
    )
}

fn criterion_8() -> Outcome {
    let quad = QuadratureSpec::default();
    let stack = Stack3D::new(half_wave(8), 0.5).unwrap();
    let res = 128usize;
    let h = PI / res as f64;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for t in [0.5, 1.0, SQRT_2] {
        let v = feasible_volume(&stack, th(t), &quad).unwrap();
        let limit = 1.0 - t * t / 4.0 + 1e-12;
        let mut hits = 0usize;
        for i in 0..res {
            for j in 0..res {
                for k in 0..res {
                    let p = PhaseSet {
                        alpha: (i as f64 + 0.5) * h,
                        beta: (j as f64 + 0.5) * h,
                        gamma: (k as f64 + 0.5) * h,
                    };
                    if analytic_reflection_3d(&stack, p) <= limit {
                        hits += 1;
                    }
                }
            }
        }
        let grid = hits as f64 / (res * res * res) as f64;
        worst = worst.max((v - grid).abs());
        notes.push(format!("t={t:.3}:V={v:.4}/grid={grid:.4}"));
    }
    let volumes: Vec<f64> = (1..=7)
        .map(|i| feasible_volume(&stack, th(0.25 * i as f64), &quad).unwrap())
        .collect();
    let monotone = volumes.windows(2).all(|w| w[1] <= w[0]);
    check(
        worst < 1e-2 && monotone,
        format!(
            "{} worst gap={worst:.4} monotone={monotone}",
            notes.join(" ")
        ),
    )
}

/// Count by walking the codebook formula until the upper bound passes the
/// horizon.
fn brute_region_count(dz: f64, t: f64) -> (usize, Vec<(f64, f64)>) {
    let margin = f64::acos((t * t - 2.0) / 2.0) / (TAU * dz);
    let mut bands = Vec::new();
    let mut p = 1usize;
    loop {
        let cos_xi = 1.0 - (2 * p - 1) as f64 * margin;
        let lo = (cos_xi + margin).clamp(-1.0, 1.0).acos();
        let hi = (cos_xi - margin).clamp(-1.0, 1.0).acos();
        bands.push((lo, hi));
        if hi > FRAC_PI_2 {
            return (p, bands);
        }
        p += 1;
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0usize;
    let mut gap_free = true;
    for _ in 0..200 {
        let dz = rng.gen_range(0.3..=1.5);
        let t = rng.gen_range(0.6..1.9);
        let stack = Stack3D::new(half_wave(8), dz).unwrap();
        let cb = build_codebook(&stack, th(t)).unwrap();
        let (brute, bands) = brute_region_count(dz, t);
        if brute != cb.region_count || cb.entries.len() != brute {
            mismatches += 1;
        }
        let e = &cb.entries;
        gap_free &= e[0].annulus.theta_minus == 0.0;
        gap_free &= e.last().unwrap().annulus.theta_plus >= FRAC_PI_2;
        gap_free &= e
            .windows(2)
            .all(|w| (w[0].annulus.theta_plus - w[1].annulus.theta_minus).abs() <= 1e-12);
        gap_free &= bands
            .iter()
            .zip(e)
            .all(|(b, entry)| (b.0 - entry.annulus.theta_minus).abs() <= 1e-12);
    }
    check(
        mismatches == 0 && gap_free,
        format!("200 random (dz, t): count mismatches={mismatches} gap-free tiling={gap_free}"),
    )
}

fn criterion_10() -> Outcome {
    let quad = QuadratureSpec::default();
    let broadside = PhaseSet::planar(0.0, 0.0);

    let single = directivity(
        &ArrayLayout::from(&half_wave(1)),
        broadside,
        ElementPattern::CosineTheta,
        &quad,
    )
    .unwrap();
    let ok_single = (single - 4.0).abs() <= 1e-3;

    let lat16 = half_wave(16);
    let d16 = directivity(
        &ArrayLayout::from(&lat16),
        broadside,
        ElementPattern::CosineTheta,
        &quad,
    )
    .unwrap();
    let cell_aperture = 16.0 * 16.0 * 0.25;
    let hull_aperture = (15.0f64 * 0.5).powi(2);
    let ratio_cell = d16 / (4.0 * PI * cell_aperture);
    let ratio_hull = d16 / (4.0 * PI * hull_aperture);
    let ok_aperture = (ratio_cell - 1.0).abs() <= 0.10;

    let lat8 = half_wave(8);
    let angle = 80f64.to_radians();
    let flat = scan_sweep(
        &ArrayLayout::from(&lat8),
        ScanPlane::Xz,
        &[angle],
        ElementPattern::Isotropic,
        &quad,
    )
    .unwrap()[0]
        .1;
    let stack = Stack3D::new(lat8, 0.75).unwrap();
    let stacked = scan_sweep(
        &ArrayLayout::from(&stack),
        ScanPlane::Xz,
        &[angle],
        ElementPattern::Isotropic,
        &quad,
    )
    .unwrap()[0]
        .1;
    let scan_ratio = stacked / flat;
    let ok_scan = scan_ratio > 1.0;

    // agreement of the brute-force intensity with the annulus
    let big = Stack3D::new(half_wave(32), 0.5).unwrap();
    let layout = ArrayLayout::from(&big);
    let res = 256usize;
    let h = PI / res as f64;
    let mut worst = 0.0f64;
    for (gamma, t) in [(PI, 1.0), (PI, SQRT_2), (FRAC_PI_2, 1.8)] {
        let ring = annulus(&big, f64::acos(gamma / PI), th(t)).unwrap();
        let cells: Vec<(f64, f64)> = (0..res)
            .flat_map(|i| (0..res).map(move |j| ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)))
            .collect();
        use rayon::prelude::*;
        let mismatch: usize = cells
            .par_iter()
            .map(|&(a, b)| {
                let bright = main_beam_intensity(
                    &layout,
                    PhaseSet {
                        alpha: a,
                        beta: b,
                        gamma,
                    },
                ) >= t / 2.0;
                usize::from(bright != ring.contains(a, b))
            })
            .sum();
        worst = worst.max(mismatch as f64 * h * h / ring.steerable_area);
    }
    let ok_fig9 = worst < 0.05;

    check(
        ok_single && ok_aperture && ok_scan && ok_fig9,
        format!(
            "cos element D={single:.5}; 16x16 D/(4pi A)={ratio_cell:.4} with A=MN dx dy \
             ({ratio_hull:.4} with hull A); 3D/2D at 80deg={scan_ratio:.3}; \
             annulus sym-diff={:.2}% of ring area",
            100.0 * worst
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Hannan limit", criterion_1, Duration::from_secs(1)),
        ("stacked halving", criterion_2, Duration::from_secs(10)),
        (
            "finite-array convergence",
            criterion_3,
            Duration::from_secs(120),
        ),
        ("Parseval identity", criterion_4, Duration::from_secs(60)),
        ("headline gain", criterion_5, Duration::from_secs(1)),
        (
            "gain closed form vs quadrature",
            criterion_6,
            Duration::from_secs(30),
        ),
        (
            "annulus vs brute force",
            criterion_7,
            Duration::from_secs(60),
        ),
        ("feasible volume", criterion_8, Duration::from_secs(300)),
        ("codebook count", criterion_9, Duration::from_secs(10)),
        ("beamsim oracles", criterion_10, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {:>2} {name}: {} ({:.2}s of {}s budget{})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
