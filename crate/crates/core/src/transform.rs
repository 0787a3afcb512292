//! Continuous shearlet transform SH_f(a,s,t) = <f, psi_ast> for every
//! analytic distribution, evaluated in frequency domain with rescaled
//! coordinates u = a xi_c in +-[lo,hi], v = a^(delta-1)(slope - s) in [-1,1].
//!
//! Fast paths: the line measure reduces to a closed form in the spatial
//! scale profile; polygon indicators reduce per edge to differences of
//! precomputed profile transforms H_m(omega) = int psi1_hat(u) u^(m-1)
//! e^(i omega u) du, leaving a single adaptive slope integral; sampled
//! fields evaluate the analyzing element against the sample measure.

use crate::error::{Error, Result};
use crate::generator::{GeneratorProfile, HermitianTable, ShearletIndex, Side, Sided, Variant};
use crate::quad;
use crate::spectra::AnalyticDistribution;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Node budget for the tensor quadrature path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes along the scale axis, per support half.
    pub base_nodes_u: usize,
    /// Nodes along the slope axis.
    pub base_nodes_v: usize,
    /// Extra nodes per estimated phase cycle.
    pub oscillation_factor: f64,
    /// Hard cap per axis; exceeding it is an explicit error.
    pub max_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_nodes_u: 64,
            base_nodes_v: 48,
            oscillation_factor: 8.0,
            max_nodes: 65536,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_nodes_u < 8 || self.base_nodes_v < 8 {
            return Err(Error::InvalidQuadratureSpec(
                "node counts must be at least 8".into(),
            ));
        }
        if self.max_nodes < self.base_nodes_u.max(self.base_nodes_v) {
            return Err(Error::InvalidQuadratureSpec(
                "node cap must be at least the base counts".into(),
            ));
        }
        if !(self.oscillation_factor > 0.0) {
            return Err(Error::InvalidQuadratureSpec(
                "oscillation factor must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Same budget with doubled node counts (self-consistency checks).
    pub fn doubled(&self) -> Self {
        QuadratureSpec {
            base_nodes_u: self.base_nodes_u * 2,
            base_nodes_v: self.base_nodes_v * 2,
            oscillation_factor: self.oscillation_factor * 2.0,
            max_nodes: self.max_nodes * 2,
        }
    }

    fn nodes(&self, base: usize, cycles: f64, axis: &'static str) -> Result<usize> {
        let required = (self.oscillation_factor * cycles).ceil() as usize;
        let n = base.max(required);
        if n > self.max_nodes {
            return Err(Error::OscillationBudget {
                axis,
                required: n,
                cap: self.max_nodes,
            });
        }
        Ok(n)
    }
}

/// Evaluates SH_f(a,s,t) = <f, psi_ast>, dispatching to the closed-form
/// paths where they exist.
pub fn shearlet_transform(
    dist: &AnalyticDistribution,
    index: &ShearletIndex,
    profile: &GeneratorProfile,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    index.validate()?;
    dist.validate()?;
    spec.validate()?;
    match dist {
        AnalyticDistribution::LineDelta { p } => Ok(line_delta_transform(*p, index, profile)),
        AnalyticDistribution::PolygonIndicator { vertices } => {
            Ok(polygon_transform(vertices, index, profile))
        }
        AnalyticDistribution::SampledField {
            samples,
            height,
            width,
            extent,
        } => Ok(sampled_transform(
            samples, *height, *width, *extent, index, profile,
        )),
        _ => transform_quadrature(dist, index, profile, spec),
    }
}

/// Reference tensor-quadrature path over the rescaled support rectangle.
/// Works for any distribution with a pointwise spectrum.
pub fn transform_quadrature(
    dist: &AnalyticDistribution,
    index: &ShearletIndex,
    profile: &GeneratorProfile,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let (lo, hi) = profile.psi1_support();
    let a = index.a;
    let hw = index.slope_halfwidth();
    let radius = dist.oscillation_radius();
    let (tc, to, rc, ro) = match index.variant {
        Variant::Horizontal => (index.t[0], index.t[1], radius[0], radius[1]),
        Variant::Vertical => (index.t[1], index.t[0], radius[1], radius[0]),
    };
    let t_c = tc.abs() + rc;
    let t_o = to.abs() + ro;
    let cycles_u = 2.0 * (t_c + index.s.abs() * t_o + hw * t_o) / a;
    let cycles_v = 4.0 * t_o / a.powf(index.delta);
    let nodes_u = spec.nodes(spec.base_nodes_u, cycles_u, "u")?;
    let nodes_v = spec.nodes(spec.base_nodes_v, cycles_v, "v")?;

    // clip the u-interval against a known frequency-support box
    let freq_box = dist.frequency_box();
    let clip = |ulo: f64, uhi: f64| -> Option<(f64, f64)> {
        let Some(bx) = freq_box else {
            return Some((ulo, uhi));
        };
        let band = match index.variant {
            Variant::Horizontal => bx[0],
            Variant::Vertical => bx[1],
        };
        let lo2 = ulo.max(a * band[0]);
        let hi2 = uhi.min(a * band[1]);
        (lo2 < hi2).then_some((lo2, hi2))
    };

    let branch = |sign: f64| -> Result<Complex64> {
        let interval = if sign > 0.0 { (lo, hi) } else { (-hi, -lo) };
        let Some((ulo, uhi)) = clip(interval.0, interval.1) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let vrule = quad::GaussRule::cached(quad::PanelOrder::P16);
        let vpanels = nodes_v.div_ceil(16).max(1);
        let vstep = 2.0 / vpanels as f64;
        // pre-tabulate slope nodes
        let mut vgrid: Vec<(f64, f64, f64)> = Vec::with_capacity(vpanels * 16);
        for pv in 0..vpanels {
            let v0 = -1.0 + pv as f64 * vstep;
            let cv = v0 + 0.5 * vstep;
            let hv = 0.5 * vstep;
            for (&x, &wv) in vrule.nodes.iter().zip(&vrule.weights) {
                let v = cv + hv * x;
                vgrid.push((v, wv * hv, profile.psi2_hat(v)));
            }
        }
        let value = quad::composite_complex(ulo, uhi, nodes_u, |u| {
            let p1 = profile.psi1_hat(u);
            if p1 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let xi_c = u / a;
            let mut acc = Complex64::new(0.0, 0.0);
            for &(v, wv, p2) in &vgrid {
                if p2 == 0.0 {
                    continue;
                }
                let xi_o = xi_c * (index.s + hw * v);
                let xi = match index.variant {
                    Variant::Horizontal => [xi_c, xi_o],
                    Variant::Vertical => [xi_o, xi_c],
                };
                let f = dist.spectrum(xi).expect("pointwise spectrum");
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                let ph = 2.0 * PI * (xi[0] * index.t[0] + xi[1] * index.t[1]);
                acc += f * Complex64::new(ph.cos(), ph.sin()) * (wv * p2);
            }
            acc * (p1 * u.abs())
        });
        Ok(value)
    };

    let prefactor = a.powf(-0.5 * (1.0 + index.delta));
    let two_sided = profile.sided() == Sided::TwoSided;
    let value = match index.side {
        Side::Plus => branch(1.0)?,
        Side::Minus => branch(-1.0)?,
        Side::Both => {
            if two_sided && dist.is_real() {
                let pos = branch(1.0)?;
                Complex64::new(2.0 * pos.re, 0.0)
            } else {
                branch(1.0)? + branch(-1.0)?
            }
        }
    };
    Ok(value * prefactor)
}

/// Closed form for the line measure nu_p: the transform vanishes unless the
/// frequency line meets the slope band, and reduces to the spatial scale
/// profile along the modulation axis.
fn line_delta_transform(p: f64, index: &ShearletIndex, profile: &GeneratorProfile) -> Complex64 {
    let a = index.a;
    let hw = index.slope_halfwidth();
    let exponent = 0.5 * (index.delta - 1.0);
    match index.variant {
        Variant::Horizontal => {
            let p2 = profile.psi2_hat((p - index.s) / hw);
            if p2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let arg = -(index.t[0] + p * index.t[1]) / a;
            profile.psi1_spatial(arg) * (a.powf(exponent) * p2)
        }
        Variant::Vertical => {
            if p == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let p2 = profile.psi2_hat((1.0 / p - index.s) / hw);
            if p2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let arg = -(index.t[0] + p * index.t[1]) / (a * p);
            profile.psi1_spatial(arg) * (a.powf(exponent) * p2 / p.abs())
        }
    }
}

/// Reference 1-D frequency integral for the line measure: integrates
/// conj(psi_ast_hat) along the frequency line xi_o = p xi_c.
pub fn line_delta_reference(
    p: f64,
    index: &ShearletIndex,
    profile: &GeneratorProfile,
) -> Complex64 {
    let (lo, hi) = profile.psi1_support();
    let a = index.a;
    let amp = index.amplitude();
    let integral = |sign: f64| -> Complex64 {
        match index.variant {
            Variant::Horizontal => {
                // xi1 in sign*[lo,hi]/a, xi2 = p xi1
                let f = |xi1: f64| -> Complex64 {
                    let w1 = profile.psi1_hat(a * xi1);
                    let w2 = profile.psi2_hat((p - index.s) / index.slope_halfwidth());
                    let ph = 2.0 * PI * xi1 * (index.t[0] + p * index.t[1]);
                    Complex64::new(ph.cos(), ph.sin()) * (w1 * w2)
                };
                let cycles = (hi - lo) / a * (index.t[0] + p * index.t[1]).abs() + 2.0;
                let nodes = ((8.0 * cycles) as usize).max(256);
                if sign > 0.0 {
                    quad::composite_complex(lo / a, hi / a, nodes, f)
                } else {
                    quad::composite_complex(-hi / a, -lo / a, nodes, f)
                }
            }
            Variant::Vertical => {
                if p == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let f = |xi1: f64| -> Complex64 {
                    let xi2 = p * xi1;
                    let w1 = profile.psi1_hat(a * xi2);
                    let w2 = profile.psi2_hat((1.0 / p - index.s) / index.slope_halfwidth());
                    let ph = 2.0 * PI * xi1 * (index.t[0] + p * index.t[1]);
                    Complex64::new(ph.cos(), ph.sin()) * (w1 * w2)
                };
                let cycles = (hi - lo) / (a * p.abs()) * (index.t[0] + p * index.t[1]).abs() + 2.0;
                let nodes = ((8.0 * cycles) as usize).max(256);
                let (l, h) = (lo / (a * p.abs()), hi / (a * p.abs()));
                if sign > 0.0 {
                    quad::composite_complex(l, h, nodes, f)
                } else {
                    quad::composite_complex(-h, -l, nodes, f)
                }
            }
        }
    };
    (integral(1.0) + integral(-1.0)) * amp
}

/// Precomputed profile transforms H_m(omega) = int psi1_hat(u) u^(m-1)
/// e^(i omega u) du over the positive support, m = 0..4, with the empirical
/// radius beyond which they vanish below 1e-15.
#[derive(Debug)]
pub struct EdgeKernels {
    tables: Vec<HermitianTable>,
    radius: f64,
}

impl EdgeKernels {
    pub(crate) fn build(profile: &GeneratorProfile) -> Self {
        use rayon::prelude::*;
        let (lo, hi) = profile.psi1_support();
        let all = |omega: f64| -> [Complex64; 5] {
            let cycles = (hi - lo) * omega.abs() / (2.0 * PI) + 2.0;
            let nodes = ((8.0 * cycles).ceil() as usize).max(128);
            let rule = quad::GaussRule::cached(quad::PanelOrder::P16);
            let panels = nodes.div_ceil(16).max(1);
            let h = (hi - lo) / panels as f64;
            let mut acc = [Complex64::new(0.0, 0.0); 5];
            for p in 0..panels {
                let a0 = lo + p as f64 * h;
                let c = a0 + 0.5 * h;
                for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let u = c + 0.5 * h * x;
                    let base = profile.psi1_hat(u) / u * (w * 0.5 * h);
                    if base == 0.0 {
                        continue;
                    }
                    let ph = omega * u;
                    let e = Complex64::new(ph.cos(), ph.sin()) * base;
                    let mut pw = e;
                    for slot in acc.iter_mut() {
                        *slot += pw;
                        pw *= u;
                    }
                }
            }
            acc
        };
        // empirical kernel radius: envelope check over a spread of probes;
        // the threshold stays above the quadrature roundoff floor
        let envelope = |r: f64| -> f64 {
            (0..8)
                .map(|k| all(r * (1.0 + 0.015 * k as f64))[0].norm())
                .fold(0.0f64, f64::max)
        };
        let mut radius = 64.0;
        while envelope(radius) > 1e-13 && radius < 8192.0 {
            radius *= 2.0;
        }
        let step = 0.01;
        let n = (radius / step).ceil() as usize + 1;
        let rows: Vec<[Complex64; 5]> = (0..n)
            .into_par_iter()
            .map(|i| all(i as f64 * step))
            .collect();
        let tables = (0..5)
            .map(|m| {
                HermitianTable::from_values(step, rows.iter().map(|r| r[m]).collect())
            })
            .collect();
        EdgeKernels { tables, radius }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, m: usize, omega: f64) -> Complex64 {
        self.tables[m].eval(omega)
    }
}

/// Per-edge closed-form route for polygon indicators: the scale integral is
/// absorbed into H_m lookups, leaving one adaptive slope integral. Far
/// vertices fall beyond the kernel radius and drop out exactly.
fn polygon_transform(
    vertices: &[[f64; 2]],
    index: &ShearletIndex,
    profile: &GeneratorProfile,
) -> Complex64 {
    // vertical variant by coordinate swap (reversing to keep CCW orientation)
    if index.variant == Variant::Vertical {
        let swapped: Vec<[f64; 2]> = vertices.iter().rev().map(|v| [v[1], v[0]]).collect();
        let idx = ShearletIndex {
            t: [index.t[1], index.t[0]],
            variant: Variant::Horizontal,
            ..*index
        };
        return polygon_transform(&swapped, &idx, profile);
    }

    let kernels = profile.edge_kernels();
    let a = index.a;
    let hw = index.slope_halfwidth();
    let n = vertices.len();
    let two_pi_over_a = 2.0 * PI / a;

    struct Edge {
        d: [f64; 2],
        tau: [f64; 2], // t minus the edge start vertex
    }
    let edges: Vec<Edge> = (0..n)
        .map(|e| {
            let v = vertices[e];
            let w = vertices[(e + 1) % n];
            Edge {
                d: [w[0] - v[0], w[1] - v[1]],
                tau: [index.t[0] - v[0], index.t[1] - v[1]],
            }
        })
        .collect();

    // split points: kappa roots and the slope values where each vertex
    // phase crosses zero, with the H-kernel live window around them
    let mut seeds: Vec<f64> = Vec::new();
    let mut push_window = |center: f64, width: f64| {
        seeds.push(center);
        seeds.push(center - width);
        seeds.push(center + width);
        seeds.push(center - 4.0 * width);
        seeds.push(center + 4.0 * width);
    };
    for e in &edges {
        if e.d[1].abs() > 1e-300 {
            let vstar = (-e.d[0] / e.d[1] - index.s) / hw;
            push_window(vstar, (a / hw) / e.d[1].abs());
        }
        if e.tau[1].abs() > 1e-300 {
            let v0 = (-e.tau[0] / e.tau[1] - index.s) / hw;
            let live = kernels.radius() / (two_pi_over_a * hw * e.tau[1].abs());
            push_window(v0, live);
        }
    }

    let integrand = |v: f64| -> Complex64 {
        let p2 = profile.psi2_hat(v);
        if p2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = index.s + hw * v;
        let rho = 1.0 + w * w;
        let mut acc = Complex64::new(0.0, 0.0);
        for e in &edges {
            let mu_l = e.d[1] - w * e.d[0];
            if mu_l == 0.0 {
                continue;
            }
            let kappa = e.d[0] + w * e.d[1];
            let sigma = e.tau[0] + w * e.tau[1];
            let omega = two_pi_over_a * sigma;
            let delta = -two_pi_over_a * kappa;
            let diff_over_kappa = if delta.abs() < 1e-4 {
                // [H0(omega+delta) - H0(omega)] / kappa by the kernel series
                let h1 = kernels.eval(1, omega);
                let h2 = kernels.eval(2, omega);
                let h3 = kernels.eval(3, omega);
                let h4 = kernels.eval(4, omega);
                let i = Complex64::new(0.0, 1.0);
                let series = h1 * i
                    + h2 * (i * i) * (delta / 2.0)
                    + h3 * (i * i * i) * (delta * delta / 6.0)
                    + h4 * (delta * delta * delta / 24.0);
                series * (-two_pi_over_a)
            } else {
                (kernels.eval(0, omega + delta) - kernels.eval(0, omega)) / kappa
            };
            acc += diff_over_kappa * (mu_l / rho);
        }
        acc * p2
    };

    let perimeter: f64 = edges.iter().map(|e| (e.d[0] * e.d[0] + e.d[1] * e.d[1]).sqrt()).sum();
    let tol = 1e-11 * perimeter * two_pi_over_a;
    let positive = quad::adaptive_complex_seeded(-1.0, 1.0, &seeds, tol, &integrand);
    let pref = -a.powf(0.5 * (3.0 - index.delta)) / (4.0 * PI * PI);
    let half = positive * pref;
    match (profile.sided(), index.side) {
        (Sided::TwoSided, Side::Both) => Complex64::new(2.0 * half.re, 0.0),
        (Sided::TwoSided, Side::Plus) | (Sided::PositiveOnly, _) => half,
        (Sided::TwoSided, Side::Minus) | (Sided::NegativeOnly, _) => half.conj(),
    }
}

/// Sample-measure path: the Riemann-sum spectrum is the transform of an
/// atomic measure, so the inner product is the exact weighted sum of
/// conj(psi_ast) over the sample points.
fn sampled_transform(
    samples: &[f64],
    height: usize,
    width: usize,
    extent: f64,
    index: &ShearletIndex,
    profile: &GeneratorProfile,
) -> Complex64 {
    let minv = inverse_dilation(index);
    let da = extent * extent / (height * width) as f64;
    let amp = index.a.powf(-0.5 * (1.0 + index.delta));
    let dx = extent / width as f64;
    let dy = extent / height as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..height {
        let y = (i as f64 + 0.5) * dy - index.t[1];
        for j in 0..width {
            let s = samples[i * width + j];
            if s == 0.0 {
                continue;
            }
            let x = (j as f64 + 0.5) * dx - index.t[0];
            let u = [minv[0][0] * x + minv[0][1] * y, minv[1][0] * x + minv[1][1] * y];
            if u[0].abs() > 48.0 || u[1].abs() > 48.0 {
                continue;
            }
            acc += psi_spatial(u, profile, index.variant).conj() * s;
        }
    }
    acc * (da * amp)
}

fn inverse_dilation(index: &ShearletIndex) -> [[f64; 2]; 2] {
    let a = index.a;
    let ad = a.powf(index.delta);
    match index.variant {
        Variant::Horizontal => [[1.0 / a, index.s / a], [0.0, 1.0 / ad]],
        Variant::Vertical => [[1.0 / ad, 0.0], [index.s / a, 1.0 / a]],
    }
}

/// Spatial analyzing function psi(y) (or the vertical variant), evaluated
/// by quadrature over the support trapezoids with the slope direction
/// pre-integrated into a cached 1-D profile. Real for two-sided profiles.
pub fn psi_spatial(y: [f64; 2], profile: &GeneratorProfile, variant: Variant) -> Complex64 {
    let y = match variant {
        Variant::Horizontal => y,
        Variant::Vertical => [y[1], y[0]],
    };
    if y[0].abs() > 48.0 || y[1].abs() > 48.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (lo, hi) = profile.psi1_support();
    let cycles = (hi - lo) * (y[0].abs() + y[1].abs()) + 2.0;
    let nodes = ((8.0 * cycles).ceil() as usize).max(128);
    let positive = quad::composite_complex(lo, hi, nodes, |r| {
        let amp = profile.psi1_hat(r) * r * profile.phi2_spatial(r * y[1]);
        let ph = 2.0 * PI * r * y[0];
        Complex64::new(amp * ph.cos(), amp * ph.sin())
    });
    match profile.sided() {
        Sided::TwoSided => Complex64::new(2.0 * positive.re, 0.0),
        Sided::PositiveOnly => positive,
        Sided::NegativeOnly => positive.conj(),
    }
}

/// One transform value per scale at fixed (t, s, variant).
pub fn transform_scan(
    dist: &AnalyticDistribution,
    t: [f64; 2],
    s: f64,
    variant: Variant,
    scales: &[f64],
    profile: &GeneratorProfile,
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    if scales.is_empty() {
        return Err(Error::InvalidScales("empty scale list".into()));
    }
    for w in scales.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidScales(
                "scales must be strictly decreasing".into(),
            ));
        }
    }
    if scales.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidScales("scales must be positive".into()));
    }
    scales
        .iter()
        .map(|&a| {
            let index = ShearletIndex::new(a, s, t).with_variant(variant);
            shearlet_transform(dist, &index, profile, spec).map_err(|e| Error::ScanFailure {
                scale: a,
                source: Box::new(e),
            })
        })
        .collect()
}

/// <psi_index0, psi_index1> by quadrature over the intersection of the two
/// frequency supports; exactly zero when the supports are disjoint.
pub fn inner_product(
    index0: &ShearletIndex,
    index1: &ShearletIndex,
    profile: &GeneratorProfile,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    index0.validate()?;
    index1.validate()?;
    spec.validate()?;
    if index0.variant != index1.variant {
        return Err(Error::InvalidDistribution(
            "inner products require matching variants".into(),
        ));
    }
    let (lo, hi) = profile.psi1_support();
    let band = |idx: &ShearletIndex| (lo / idx.a, hi / idx.a);
    let (b0, b1) = (band(index0), band(index1));
    let xi_lo = b0.0.max(b1.0);
    let xi_hi = b0.1.min(b1.1);
    if xi_lo >= xi_hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let hw0 = index0.slope_halfwidth();
    let hw1 = index1.slope_halfwidth();
    let w_lo = (index0.s - hw0).max(index1.s - hw1);
    let w_hi = (index0.s + hw0).min(index1.s + hw1);
    if w_lo >= w_hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let dt = [
        index0.t[0] - index1.t[0],
        index0.t[1] - index1.t[1],
    ];
    let (dt_c, dt_o) = match index0.variant {
        Variant::Horizontal => (dt[0], dt[1]),
        Variant::Vertical => (dt[1], dt[0]),
    };
    let w_abs = w_lo.abs().max(w_hi.abs());
    let cycles_xi = (xi_hi - xi_lo) * (dt_c.abs() + w_abs * dt_o.abs());
    let cycles_w = (w_hi - w_lo) * xi_hi * dt_o.abs();
    let nodes_xi = spec.nodes(spec.base_nodes_u, cycles_xi, "u")?;
    let nodes_w = spec.nodes(spec.base_nodes_v, cycles_w, "v")?;
    let amp = index0.amplitude() * index1.amplitude();

    let branch = |sign: f64| -> Complex64 {
        let (clo, chi) = if sign > 0.0 {
            (xi_lo, xi_hi)
        } else {
            (-xi_hi, -xi_lo)
        };
        quad::composite_complex(clo, chi, nodes_xi, |xi_c| {
            let p0 = profile.psi1_hat(index0.a * xi_c);
            let p1 = profile.psi1_hat(index1.a * xi_c);
            if p0 == 0.0 || p1 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let inner = quad::composite_complex(w_lo, w_hi, nodes_w, |w| {
                let q0 = profile.psi2_hat((w - index0.s) / hw0);
                let q1 = profile.psi2_hat((w - index1.s) / hw1);
                if q0 == 0.0 || q1 == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let ph = -2.0 * PI * xi_c * (dt_c + w * dt_o);
                Complex64::new(ph.cos(), ph.sin()) * (q0 * q1)
            });
            inner * (p0 * p1 * xi_c.abs())
        })
    };

    let both = profile.sided() == Sided::TwoSided
        && index0.side == Side::Both
        && index1.side == Side::Both;
    let value = if both {
        let pos = branch(1.0);
        Complex64::new(2.0 * pos.re, 0.0)
    } else {
        branch(1.0) + branch(-1.0)
    };
    Ok(value * amp)
}
