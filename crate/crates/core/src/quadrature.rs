//! Composite Gauss-Legendre quadrature with fixed panels.
//!
//! No adaptivity: a [`QuadratureSpec`] fully determines the node set, and
//! sums are always accumulated in node order so results are reproducible
//! bit for bit.

use std::f64::consts::PI;

use crate::geometry::QuadratureSpec;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes in ascending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = ((i as f64 + 0.75) / (nf + 0.5) * PI).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-ready node set of a composite rule on one interval.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Splits `[a, b]` into `spec.panels_per_axis` equal panels with
    /// `spec.nodes_per_panel` Gauss-Legendre nodes each.
    pub fn new(spec: &QuadratureSpec, a: f64, b: f64) -> Self {
        let (ref_nodes, ref_weights) = gauss_legendre(spec.nodes_per_panel);
        let panels = spec.panels_per_axis;
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(spec.total_nodes());
        let mut weights = Vec::with_capacity(spec.total_nodes());
        for p in 0..panels {
            let left = a + h * p as f64;
            let mid = left + 0.5 * h;
            for (x, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// ∫ₐᵇ f(x) dx with the composite rule of `spec`.
pub fn integrate<F: FnMut(f64) -> f64>(spec: &QuadratureSpec, a: f64, b: f64, f: F) -> f64 {
    if a == b {
        return 0.0;
    }
    CompositeRule::new(spec, a, b).integrate(f)
}

/// Iterated integral over `[a0, b0] × [a1, b1]`, inner axis summed first.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    spec: &QuadratureSpec,
    (a0, b0): (f64, f64),
    (a1, b1): (f64, f64),
    mut f: F,
) -> f64 {
    let outer = CompositeRule::new(spec, a0, b0);
    let inner = CompositeRule::new(spec, a1, b1);
    outer
        .iter()
        .map(|(x, wx)| wx * inner.iter().map(|(y, wy)| wy * f(x, y)).sum::<f64>())
        .sum()
}
