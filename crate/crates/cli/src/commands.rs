//! Command dispatch: each command turns a [`RunConfig`] into a [`Dataset`].

use std::f64::consts::{PI, TAU};

use arraylimits::beamsim::{intensity_map, scan_sweep, ArrayLayout, ElementPattern, ScanPlane};
use arraylimits::efficiency::{
    eta_approx_3d, eta_finite_2d, eta_finite_3d, eta_infinite_2d, eta_infinite_3d,
    ContributionSource, EfficiencyReport,
};
use arraylimits::feasible3d::{
    annulus, build_codebook, combining_factor, feasible_volume_breakdown, feasible_volume_exact,
    TerminalScenario, Threshold,
};
use arraylimits::gain::{avg_gain_ratio, ApertureSet};
use arraylimits::reflection::{parseval_check, CouplingField, LayerTag};
use arraylimits::{AngularRegion, ArrayLattice2D, QuadratureSpec, Result, Stack3D};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::config::{Command, RunConfig};
use crate::output::{Cell, Dataset};
use crate::svg::Plot;

const PARSEVAL_TRIALS: usize = 50;
const VOLUME_STEPS: usize = 40;

pub fn run(cfg: &RunConfig) -> Result<Dataset> {
    match cfg.command {
        Command::Efficiency2d => efficiency2d(cfg),
        Command::Efficiency3d => efficiency3d(cfg),
        Command::Gain => gain(cfg),
        Command::FeasibleRegion => feasible_region(cfg),
        Command::Codebook => codebook(cfg),
        Command::Volume => volume(cfg),
        Command::ScanSweep => scan(cfg),
        Command::IntensityMap => intensity(cfg),
        Command::ParsevalCheck => parseval(cfg),
    }
}

fn lattice(cfg: &RunConfig) -> Result<ArrayLattice2D> {
    ArrayLattice2D::new(cfg.m, cfg.n, cfg.dx, cfg.dy)
}

fn stack(cfg: &RunConfig) -> Result<Stack3D> {
    Stack3D::with_layers(lattice(cfg)?, cfg.dz, cfg.layers)?.with_offset(cfg.offset)
}

fn quad(cfg: &RunConfig) -> Result<QuadratureSpec> {
    QuadratureSpec::new(cfg.panels, cfg.nodes)
}

fn threshold(cfg: &RunConfig) -> Result<Threshold> {
    Threshold::new(cfg.threshold)
}

/// Inter-layer phase step; defaults to `cos ξ = 0.75`.
fn gamma(cfg: &RunConfig) -> f64 {
    cfg.gamma.unwrap_or(1.5 * PI * cfg.dz)
}

fn summary(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// `n` points spread evenly over `[lo, hi]`, cell centres when `centred`.
fn axis(lo: f64, hi: f64, n: usize, centred: bool) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let u = if centred {
                (i as f64 + 0.5) / n as f64
            } else if n > 1 {
                i as f64 / (n - 1) as f64
            } else {
                0.0
            };
            lo + (hi - lo) * u
        })
        .collect()
}

fn breakdown_dataset(
    cfg: &RunConfig,
    report: &EfficiencyReport,
    extra: Vec<(&str, Value)>,
) -> Dataset {
    let mut rows = Vec::new();
    let mut loss_grid = vec![0.0; cfg.m * cfg.n];
    for c in &report.breakdown {
        match &c.source {
            ContributionSource::Sample {
                m,
                n,
                alpha,
                beta,
                gamma,
                feasible,
            } => {
                loss_grid[n * cfg.m + m] += c.value;
                rows.push(vec![
                    "sample".into(),
                    (*m).into(),
                    (*n).into(),
                    (*alpha).into(),
                    (*beta).into(),
                    (*gamma).into(),
                    (*feasible).into(),
                    c.value.into(),
                ]);
            }
            ContributionSource::Term(name) => rows.push(vec![
                Cell::Text(name.to_string()),
                Cell::Int(-1),
                Cell::Int(-1),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                false.into(),
                c.value.into(),
            ]),
        }
    }
    let mut pairs = vec![
        ("eta", report.eta.into()),
        ("model", report.model.as_str().into()),
    ];
    pairs.extend(extra);
    pairs.push(("lossy_terms", report.lossy_terms().into()));
    Dataset {
        columns: vec![
            "source", "m", "n", "alpha", "beta", "gamma", "feasible", "loss",
        ],
        rows,
        summary: summary(pairs),
        warnings: report.warnings.clone(),
        plot: Plot::Heatmap {
            title: format!(
                "{} loss per DFT sample (eta = {:.6})",
                report.model.as_str(),
                report.eta
            ),
            x_label: "m".into(),
            y_label: "n".into(),
            x_range: (0.0, (cfg.m - 1) as f64),
            y_range: (0.0, (cfg.n - 1) as f64),
            nx: cfg.m,
            ny: cfg.n,
            values: loss_grid,
        },
    }
}

fn efficiency2d(cfg: &RunConfig) -> Result<Dataset> {
    let lat = lattice(cfg)?;
    let report = eta_finite_2d(&lat, &quad(cfg)?)?;
    let infinite = eta_infinite_2d(&lat)?;
    Ok(breakdown_dataset(
        cfg,
        &report,
        vec![("eta_infinite", infinite.into())],
    ))
}

fn efficiency3d(cfg: &RunConfig) -> Result<Dataset> {
    let s = stack(cfg)?;
    let report = eta_finite_3d(&s, &quad(cfg)?)?;
    let infinite = eta_infinite_3d(&s)?;
    let approx = eta_approx_3d(&s)?;
    let mut data = breakdown_dataset(
        cfg,
        &report,
        vec![
            ("eta_infinite", infinite.into()),
            ("eta_approx", approx.eta.into()),
        ],
    );
    data.warnings.extend(approx.warnings);
    Ok(data)
}

fn gain(cfg: &RunConfig) -> Result<Dataset> {
    let ap = match cfg.apertures {
        Some([a, b, c]) => ApertureSet::new(a, b, c)?,
        None => ApertureSet::from_stack(&stack(cfg)?),
    };
    let region = AngularRegion::new(cfg.theta1, cfg.theta2, cfg.phi1, cfg.phi2)?;
    let ratio = avg_gain_ratio(&ap, &region)?;
    // the curve shows how the ratio builds up as the upper polar bound grows
    let uppers = axis(cfg.theta1, cfg.theta2, cfg.grid.max(2) + 1, false);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut rows = Vec::new();
    for &t2 in &uppers[1..] {
        let sub = AngularRegion::new(cfg.theta1, t2, cfg.phi1, cfg.phi2)?;
        let r = avg_gain_ratio(&ap, &sub)?;
        xs.push(t2.to_degrees());
        ys.push(r);
        rows.push(vec![
            cfg.theta1.into(),
            t2.into(),
            cfg.phi1.into(),
            cfg.phi2.into(),
            r.into(),
        ]);
    }
    Ok(Dataset {
        columns: vec!["theta1", "theta2", "phi1", "phi2", "gain_ratio"],
        rows,
        summary: summary(vec![
            ("gain_ratio", ratio.into()),
            ("a_xy", ap.a_xy.into()),
            ("a_xz", ap.a_xz.into()),
            ("a_yz", ap.a_yz.into()),
        ]),
        warnings: Vec::new(),
        plot: Plot::Lines {
            title: format!("average gain ratio, full region {ratio:.6}"),
            x_label: "upper polar angle (deg)".into(),
            y_label: "G_3D / G_2D".into(),
            x: xs,
            series: vec![("gain ratio".into(), ys)],
        },
    })
}

fn feasible_region(cfg: &RunConfig) -> Result<Dataset> {
    let s = stack(cfg)?;
    let t = threshold(cfg)?;
    let g = gamma(cfg);
    let cos_xi = g / (TAU * s.dz());
    if !(-1.0..=1.0).contains(&cos_xi) {
        return Err(arraylimits::Error::Domain(format!(
            "gamma {g} exceeds the 2π dz range of real beam angles"
        )));
    }
    let ring = annulus(&s, cos_xi.acos(), t)?;
    let (kx, ky) = (TAU * s.layer().dx(), TAU * s.layer().dy());
    let alphas = axis(0.0, PI, cfg.grid, true);
    let mut rows = Vec::with_capacity(cfg.grid * cfg.grid);
    let mut values = Vec::with_capacity(cfg.grid * cfg.grid);
    let mut inside = 0usize;
    for &b in &alphas {
        for &a in &alphas {
            let s2 = (a / kx).powi(2) + (b / ky).powi(2);
            let cf = if s2 <= 1.0 {
                combining_factor(s.layer_count(), g - TAU * s.dz() * (1.0 - s2).sqrt())
            } else {
                f64::NAN
            };
            let hit = ring.contains(a, b);
            inside += usize::from(hit);
            values.push(cf);
            rows.push(vec![a.into(), b.into(), cf.into(), hit.into()]);
        }
    }
    let fraction = inside as f64 / (cfg.grid * cfg.grid) as f64;
    Ok(Dataset {
        columns: vec!["alpha", "beta", "combining_factor", "in_annulus"],
        rows,
        summary: summary(vec![
            ("gamma", g.into()),
            ("xi", cos_xi.acos().into()),
            ("r_minus", ring.r_minus.into()),
            ("r_plus", ring.r_plus.into()),
            ("area", ring.area.into()),
            ("steerable_area", ring.steerable_area.into()),
            ("residual_area", ring.residual_area.into()),
            ("case_tag", ring.case_tag.as_str().into()),
            ("theta_minus", ring.theta_minus.into()),
            ("theta_plus", ring.theta_plus.into()),
            ("grid_fraction", fraction.into()),
        ]),
        warnings: Vec::new(),
        plot: Plot::Heatmap {
            title: format!("combining factor, gamma = {g:.4}, t = {:.4}", t.value()),
            x_label: "alpha (rad)".into(),
            y_label: "beta (rad)".into(),
            x_range: (0.0, PI),
            y_range: (0.0, PI),
            nx: cfg.grid,
            ny: cfg.grid,
            values,
        },
    })
}

fn codebook(cfg: &RunConfig) -> Result<Dataset> {
    let s = stack(cfg)?;
    let cb = build_codebook(&s, threshold(cfg)?)?;
    let rows = cb
        .entries
        .iter()
        .map(|e| {
            vec![
                e.index.into(),
                e.cos_xi.into(),
                e.xi.into(),
                e.gamma.into(),
                e.annulus.theta_minus.into(),
                e.annulus.theta_plus.into(),
                e.annulus.r_minus.into(),
                e.annulus.r_plus.into(),
                e.annulus.steerable_area.into(),
                e.annulus.case_tag.as_str().into(),
            ]
        })
        .collect();
    let idx: Vec<f64> = cb.entries.iter().map(|e| e.index as f64).collect();
    let deg = |f: fn(&arraylimits::feasible3d::CodebookEntry) -> f64| -> Vec<f64> {
        cb.entries.iter().map(|e| f(e).to_degrees()).collect()
    };
    let terminal = match cb.terminal {
        TerminalScenario::BeamInsideOctant => "beam_inside_octant",
        TerminalScenario::BeamPastHorizon => "beam_past_horizon",
    };
    Ok(Dataset {
        columns: vec![
            "index",
            "cos_xi",
            "xi",
            "gamma",
            "theta_minus",
            "theta_plus",
            "r_minus",
            "r_plus",
            "area",
            "case_tag",
        ],
        rows,
        summary: summary(vec![
            ("region_count", cb.region_count.into()),
            ("threshold", cb.threshold.value().into()),
            ("terminal", terminal.into()),
        ]),
        warnings: Vec::new(),
        plot: Plot::Lines {
            title: format!("codebook, P = {}", cb.region_count),
            x_label: "codeword".into(),
            y_label: "polar angle (deg)".into(),
            x: idx,
            series: vec![
                ("theta-".into(), deg(|e| e.annulus.theta_minus)),
                ("xi".into(), deg(|e| e.xi)),
                ("theta+".into(), deg(|e| e.annulus.theta_plus)),
            ],
        },
    })
}

fn volume(cfg: &RunConfig) -> Result<Dataset> {
    let s = stack(cfg)?;
    let q = quad(cfg)?;
    let mut rows = Vec::new();
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    for k in 0..=VOLUME_STEPS {
        let t = Threshold::new(2.0 * k as f64 / VOLUME_STEPS as f64)?;
        let b = feasible_volume_breakdown(&s, t, &q)?;
        let exact = feasible_volume_exact(&s, t)?;
        ts.push(t.value());
        vs.push(exact);
        rows.push(vec![
            t.value().into(),
            b.steerable.into(),
            exact.into(),
            b.residual.into(),
        ]);
    }
    let here = feasible_volume_exact(&s, threshold(cfg)?)?;
    Ok(Dataset {
        columns: vec!["threshold", "volume", "volume_exact", "residual"],
        rows,
        summary: summary(vec![
            ("threshold", cfg.threshold.into()),
            ("volume", here.into()),
        ]),
        warnings: Vec::new(),
        plot: Plot::Lines {
            title: "feasible phase volume".into(),
            x_label: "threshold t".into(),
            y_label: "V(t)".into(),
            x: ts,
            series: vec![("V".into(), vs)],
        },
    })
}

fn scan(cfg: &RunConfig) -> Result<Dataset> {
    let lat = lattice(cfg)?;
    let s = stack(cfg)?;
    let q = quad(cfg)?;
    let plane = if cfg.plane == "yz" {
        ScanPlane::Yz
    } else {
        ScanPlane::Xz
    };
    let pattern = if cfg.pattern == "cosine_theta" {
        ElementPattern::CosineTheta
    } else {
        ElementPattern::Isotropic
    };
    let rad: Vec<f64> = cfg.angles.iter().map(|a| a.to_radians()).collect();
    let flat = scan_sweep(&ArrayLayout::from(&lat), plane, &rad, pattern, &q)?;
    let stacked = scan_sweep(&ArrayLayout::from(&s), plane, &rad, pattern, &q)?;
    let mut rows = Vec::new();
    let (mut d2, mut d3) = (Vec::new(), Vec::new());
    for ((deg, f), st) in cfg.angles.iter().zip(&flat).zip(&stacked) {
        rows.push(vec![
            (*deg).into(),
            f.1.into(),
            st.1.into(),
            (st.1 / f.1).into(),
        ]);
        d2.push(10.0 * f.1.log10());
        d3.push(10.0 * st.1.log10());
    }
    Ok(Dataset {
        columns: vec!["angle_deg", "directivity_2d", "directivity_3d", "ratio"],
        rows,
        summary: summary(vec![
            ("pattern", pattern.as_str().into()),
            ("plane", cfg.plane.clone().into()),
            ("points", cfg.angles.len().into()),
        ]),
        warnings: Vec::new(),
        plot: Plot::Lines {
            title: format!("scan directivity, {} elements", pattern.as_str()),
            x_label: "scan angle (deg)".into(),
            y_label: "directivity (dBi)".into(),
            x: cfg.angles.clone(),
            series: vec![
                ("planar".into(), d2),
                (format!("{}-layer", s.layer_count()), d3),
            ],
        },
    })
}

fn intensity(cfg: &RunConfig) -> Result<Dataset> {
    let s = stack(cfg)?;
    let g = gamma(cfg);
    let ax = axis(-PI, PI, cfg.grid, true);
    let map = intensity_map(&ArrayLayout::from(&s), &ax, &ax, &[g]);
    let mut rows = Vec::with_capacity(cfg.grid * cfg.grid);
    let mut values = Vec::with_capacity(cfg.grid * cfg.grid);
    for (ib, &b) in ax.iter().enumerate() {
        for (ia, &a) in ax.iter().enumerate() {
            let v = map.value(0, ia, ib);
            values.push(v);
            rows.push(vec![a.into(), b.into(), v.into()]);
        }
    }
    let peak = values.iter().copied().fold(0.0, f64::max);
    Ok(Dataset {
        columns: vec!["alpha", "beta", "intensity"],
        rows,
        summary: summary(vec![("gamma", g.into()), ("peak", peak.into())]),
        warnings: Vec::new(),
        plot: Plot::Heatmap {
            title: format!("normalised main-beam intensity, gamma = {g:.4}"),
            x_label: "alpha (rad)".into(),
            y_label: "beta (rad)".into(),
            x_range: (-PI, PI),
            y_range: (-PI, PI),
            nx: cfg.grid,
            ny: cfg.grid,
            values,
        },
    })
}

fn random_field(rng: &mut ChaCha8Rng, tag: LayerTag) -> CouplingField {
    let mut field = CouplingField::new(tag);
    for _ in 0..rng.gen_range(1..=4) {
        let (p, q) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let c = Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        field.insert_mirrored(p, q, c);
    }
    field
}

fn parseval(cfg: &RunConfig) -> Result<Dataset> {
    let q = quad(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut errs = Vec::new();
    for trial in 0..PARSEVAL_TRIALS {
        let fields = [
            random_field(&mut rng, LayerTag::Same),
            random_field(&mut rng, LayerTag::Cross),
        ];
        let (lhs, rhs) = parseval_check(&fields, &q);
        errs.push((lhs - rhs).abs());
        rows.push(vec![
            trial.into(),
            lhs.into(),
            rhs.into(),
            (lhs - rhs).abs().into(),
        ]);
    }
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok(Dataset {
        columns: vec!["trial", "lhs", "rhs", "abs_error"],
        rows,
        summary: summary(vec![
            ("trials", PARSEVAL_TRIALS.into()),
            ("max_abs_error", worst.into()),
        ]),
        warnings: Vec::new(),
        plot: Plot::Lines {
            title: format!("energy identity residual, worst {worst:.2e}"),
            x_label: "trial".into(),
            y_label: "|LHS - RHS|".into(),
            x: (0..PARSEVAL_TRIALS).map(|i| i as f64).collect(),
            series: vec![("residual".into(), errs)],
        },
    })
}
