//! Gauss-Legendre quadrature: fixed rules, composite panels, and adaptive
//! bisection for smooth or mildly oscillatory integrands.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Computes the rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th root of P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (p2, d2) = legendre_and_derivative(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
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
        GaussRule { nodes, weights }
    }

    /// Shared rule for a small set of panel orders, built once.
    pub fn cached(order: PanelOrder) -> &'static GaussRule {
        static RULES: OnceLock<[GaussRule; 4]> = OnceLock::new();
        let rules = RULES.get_or_init(|| {
            [
                GaussRule::new(8),
                GaussRule::new(16),
                GaussRule::new(24),
                GaussRule::new(32),
            ]
        });
        match order {
            PanelOrder::P8 => &rules[0],
            PanelOrder::P16 => &rules[1],
            PanelOrder::P24 => &rules[2],
            PanelOrder::P32 => &rules[3],
        }
    }

    /// Integrates `f` over [a, b] with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
        &self,
        a: f64,
        b: f64,
        mut f: F,
    ) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * w;
        }
        acc * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelOrder {
    P8,
    P16,
    P24,
    P32,
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre over [a, b] using `total_nodes` spread across
/// 16-point panels (at least one panel).
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, total_nodes: usize, mut f: F) -> f64 {
    let rule = GaussRule::cached(PanelOrder::P16);
    let panels = total_nodes.div_ceil(16).max(1);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        acc += rule.integrate(lo, lo + h, &mut f);
    }
    acc
}

pub fn composite_complex<F: FnMut(f64) -> Complex64>(
    a: f64,
    b: f64,
    total_nodes: usize,
    mut f: F,
) -> Complex64 {
    let rule = GaussRule::cached(PanelOrder::P16);
    let panels = total_nodes.div_ceil(16).max(1);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        acc += rule.integrate_complex(lo, lo + h, &mut f);
    }
    acc
}

/// Adaptive Gauss-Legendre by interval bisection. Compares a 16- and a
/// 32-point estimate per interval and splits until the difference is under
/// `tol` (absolute, distributed across subintervals) or `max_depth` is hit.
pub fn adaptive<F: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, f: &F) -> f64 {
    adaptive_depth(a, b, tol, f, 48)
}

pub fn adaptive_depth<F: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, f: &F, max_depth: u32) -> f64 {
    fn rec<F: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, f: &F, depth: u32) -> f64 {
        let coarse = GaussRule::cached(PanelOrder::P16).integrate(a, b, f);
        let fine = GaussRule::cached(PanelOrder::P32).integrate(a, b, f);
        if (fine - coarse).abs() <= tol || depth == 0 {
            return fine;
        }
        let mid = 0.5 * (a + b);
        rec(a, mid, 0.5 * tol, f, depth - 1) + rec(mid, b, 0.5 * tol, f, depth - 1)
    }
    rec(a, b, tol, f, max_depth)
}

/// Adaptive integration seeded with interior split points (e.g. known kinks
/// or spike locations); each seeded subinterval is then refined adaptively.
/// The tolerance is not tightened while descending, so total error scales
/// with the number of active refinement branches; callers pass a tolerance
/// comfortably below their target.
pub fn adaptive_complex_seeded<F: Fn(f64) -> Complex64>(
    a: f64,
    b: f64,
    seeds: &[f64],
    tol: f64,
    f: &F,
) -> Complex64 {
    let mut cuts: Vec<f64> = vec![a];
    let mut interior: Vec<f64> = seeds
        .iter()
        .copied()
        .filter(|s| *s > a && *s < b)
        .collect();
    interior.sort_by(|p, q| p.partial_cmp(q).unwrap());
    interior.dedup();
    cuts.extend(interior);
    cuts.push(b);
    let mut acc = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        if w[1] - w[0] < 1e-14 {
            continue;
        }
        acc += adaptive_complex_depth(w[0], w[1], tol, f, 32);
    }
    acc
}

pub fn adaptive_complex_depth<F: Fn(f64) -> Complex64>(
    a: f64,
    b: f64,
    tol: f64,
    f: &F,
    max_depth: u32,
) -> Complex64 {
    fn rec<F: Fn(f64) -> Complex64>(a: f64, b: f64, tol: f64, f: &F, depth: u32) -> Complex64 {
        let coarse = GaussRule::cached(PanelOrder::P16).integrate_complex(a, b, f);
        let fine = GaussRule::cached(PanelOrder::P32).integrate_complex(a, b, f);
        if (fine - coarse).norm() <= tol || depth == 0 {
            return fine;
        }
        let mid = 0.5 * (a + b);
        rec(a, mid, tol, f, depth - 1) + rec(mid, b, tol, f, depth - 1)
    }
    rec(a, b, tol, f, max_depth)
}

/// Adaptive 2-D quadrature over an axis-aligned rectangle by panel
/// subdivision; tolerates integrand kinks along lines (refinement stays
/// local). Compares 8x8 and 16x16 tensor estimates per panel.
pub fn adaptive_2d<F: Fn(f64, f64) -> f64>(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    tol: f64,
    f: &F,
) -> f64 {
    fn tensor<F: Fn(f64, f64) -> f64>(
        rule: &GaussRule,
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        f: &F,
    ) -> f64 {
        let cx = 0.5 * (x0 + x1);
        let hx = 0.5 * (x1 - x0);
        let cy = 0.5 * (y0 + y1);
        let hy = 0.5 * (y1 - y0);
        let mut acc = 0.0;
        for (&xn, &xw) in rule.nodes.iter().zip(&rule.weights) {
            let x = cx + hx * xn;
            let mut row = 0.0;
            for (&yn, &yw) in rule.nodes.iter().zip(&rule.weights) {
                row += yw * f(x, cy + hy * yn);
            }
            acc += xw * row;
        }
        acc * hx * hy
    }
    fn rec<F: Fn(f64, f64) -> f64>(
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        tol: f64,
        f: &F,
        depth: u32,
    ) -> f64 {
        let coarse = tensor(GaussRule::cached(PanelOrder::P8), x0, x1, y0, y1, f);
        let fine = tensor(GaussRule::cached(PanelOrder::P16), x0, x1, y0, y1, f);
        if (fine - coarse).abs() <= tol || depth == 0 {
            return fine;
        }
        let mx = 0.5 * (x0 + x1);
        let my = 0.5 * (y0 + y1);
        let t = 0.25 * tol;
        rec(x0, mx, y0, my, t, f, depth - 1)
            + rec(mx, x1, y0, my, t, f, depth - 1)
            + rec(x0, mx, my, y1, t, f, depth - 1)
            + rec(mx, x1, my, y1, t, f, depth - 1)
    }
    rec(x0, x1, y0, y1, tol, f, 24)
}
