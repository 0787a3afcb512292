//! Admissible generator pair and the shearlet frequency symbol.
//!
//! The scale profile `psi1_hat` is an even C-infinity bump supported on
//! [-hi,-lo] u [lo,hi] (defaults [1/2,2]), normalized so that
//! `int_lo^hi |psi1_hat(a)|^2 da/a = 1`. The slope profile `psi2_hat` is an
//! even bump on [-1,1], strictly positive inside, with unit L2 norm. The
//! 2-D symbol is `psi_hat(xi) = psi1_hat(xi1) * psi2_hat(xi2/xi1)`, and the
//! vertical variant swaps the coordinate roles.

use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sided {
    TwoSided,
    PositiveOnly,
    NegativeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Horizontal,
    Vertical,
}

/// Frequency half selector for the one-sided systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Both,
    Plus,
    Minus,
}

/// Bump-family parameters for `GeneratorProfile::build`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpParams {
    /// Support interval of the scale profile on the positive axis.
    pub psi1_support: (f64, f64),
    /// Exponent scale in exp(-c/(w-lo)) * exp(-c/(hi-w)).
    pub psi1_sharpness: f64,
    /// Exponent scale in exp(-c/(1-u^2)).
    pub psi2_sharpness: f64,
    pub sided: Sided,
}

impl Default for BumpParams {
    fn default() -> Self {
        BumpParams {
            psi1_support: (0.5, 2.0),
            psi1_sharpness: 1.0,
            psi2_sharpness: 1.0,
            sided: Sided::TwoSided,
        }
    }
}

/// One analyzing element: scale, shear, location, variant, anisotropy, side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearletIndex {
    pub a: f64,
    pub s: f64,
    pub t: [f64; 2],
    pub variant: Variant,
    pub delta: f64,
    pub side: Side,
}

impl ShearletIndex {
    pub fn new(a: f64, s: f64, t: [f64; 2]) -> Self {
        ShearletIndex {
            a,
            s,
            t,
            variant: Variant::Horizontal,
            delta: 0.5,
            side: Side::Both,
        }
    }

    pub fn vertical(mut self) -> Self {
        self.variant = Variant::Vertical;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "scale must be positive, got {}",
                self.a
            )));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::InvalidDistribution(format!(
                "anisotropy exponent must lie in [0,1), got {}",
                self.delta
            )));
        }
        if !self.s.is_finite() || !self.t[0].is_finite() || !self.t[1].is_finite() {
            return Err(Error::InvalidDistribution(
                "shear and location must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Dilation matrix; for delta = 1/2 this is the parabolic-scaling shear
    /// matrix with entries (a, -sqrt(a) s; 0, sqrt(a)).
    pub fn dilation_matrix(&self) -> [[f64; 2]; 2] {
        let ad = self.a.powf(self.delta);
        match self.variant {
            Variant::Horizontal => [[self.a, -ad * self.s], [0.0, ad]],
            Variant::Vertical => [[ad, 0.0], [-ad * self.s, self.a]],
        }
    }

    /// Frequency amplitude |det M|^(1/2) = a^((1+delta)/2).
    pub fn amplitude(&self) -> f64 {
        self.a.powf(0.5 * (1.0 + self.delta))
    }

    /// Half-width of the slope band: a^(1-delta).
    pub fn slope_halfwidth(&self) -> f64 {
        self.a.powf(1.0 - self.delta)
    }
}

/// Frequency-support geometry with exact membership predicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyRegion {
    /// Support of one shearlet: |xi_c| in [lo, hi] and |xi_o/xi_c - s| <= hw,
    /// where (c, o) = (1, 2) horizontally and (2, 1) vertically.
    TrapezoidPair {
        xi_lo: f64,
        xi_hi: f64,
        s: f64,
        slope_halfwidth: f64,
        variant: Variant,
        side: Side,
    },
    /// |xi1| >= min_abs and |xi2/xi1| <= 1 (C1 for min_abs = 0, C for 2).
    HorizontalCone { min_abs: f64 },
    /// |xi2| >= min_abs and |xi2/xi1| > 1.
    VerticalCone { min_abs: f64 },
    BoxRegion { half_extent: f64 },
}

impl FrequencyRegion {
    pub fn contains(&self, xi: [f64; 2]) -> bool {
        match *self {
            FrequencyRegion::TrapezoidPair {
                xi_lo,
                xi_hi,
                s,
                slope_halfwidth,
                variant,
                side,
            } => {
                let (c, o) = match variant {
                    Variant::Horizontal => (xi[0], xi[1]),
                    Variant::Vertical => (xi[1], xi[0]),
                };
                if c == 0.0 {
                    return false;
                }
                match side {
                    Side::Plus if c < 0.0 => return false,
                    Side::Minus if c > 0.0 => return false,
                    _ => {}
                }
                c.abs() >= xi_lo && c.abs() <= xi_hi && (o / c - s).abs() <= slope_halfwidth
            }
            FrequencyRegion::HorizontalCone { min_abs } => {
                xi[0].abs() >= min_abs && xi[1].abs() <= xi[0].abs()
            }
            FrequencyRegion::VerticalCone { min_abs } => {
                xi[1].abs() >= min_abs && xi[1].abs() > xi[0].abs()
            }
            FrequencyRegion::BoxRegion { half_extent } => {
                xi[0].abs() <= half_extent && xi[1].abs() <= half_extent
            }
        }
    }
}

/// Cumulative integral of |psi1_hat|^2 du/u tabulated on log-spaced nodes,
/// interpolated by a monotone (Fritsch-Carlson) cubic.
#[derive(Debug, Clone)]
struct CumulativeTable {
    log_lo: f64,
    log_step: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl CumulativeTable {
    fn build(lo: f64, hi: f64, integrand: impl Fn(f64) -> f64) -> Self {
        const N: usize = 4096;
        let log_lo = lo.ln();
        let log_step = (hi.ln() - log_lo) / (N - 1) as f64;
        let x: Vec<f64> = (0..N).map(|i| (log_lo + i as f64 * log_step).exp()).collect();
        let mut y = vec![0.0; N];
        let mut acc = 0.0;
        for i in 1..N {
            acc += quad::adaptive(x[i - 1], x[i], 1e-14, &|u| integrand(u));
            y[i] = acc;
        }
        // pin the saturated value to exactly 1 (the profile is normalized so
        // the total is 1 to quadrature tolerance; outside values are exact)
        let total = y[N - 1];
        for v in y.iter_mut() {
            *v /= total;
        }
        let slopes = pchip_slopes(&x, &y);
        CumulativeTable {
            log_lo,
            log_step,
            x,
            y,
            slopes,
        }
    }

    fn eval(&self, v: f64) -> f64 {
        let n = self.x.len();
        if v <= self.x[0] {
            return 0.0;
        }
        if v >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let fi = (v.ln() - self.log_lo) / self.log_step;
        let i = (fi.floor() as usize).min(n - 2);
        let h = self.x[i + 1] - self.x[i];
        let t = (v - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let sec: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    d[0] = sec[0];
    d[n - 1] = sec[n - 2];
    for i in 1..n - 1 {
        if sec[i - 1] * sec[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
        }
    }
    d
}

/// Sampled even function of one variable with cubic 4-point interpolation;
/// identically zero beyond the last node.
#[derive(Debug, Clone)]
pub(crate) struct EvenTable {
    step: f64,
    values: Vec<f64>,
}

impl EvenTable {
    pub(crate) fn build(radius: f64, n: usize, f: impl Fn(f64) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let step = radius / (n - 1) as f64;
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| f(i as f64 * step))
            .collect();
        EvenTable { step, values }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        let n = self.values.len();
        let fi = ax / self.step;
        if fi >= (n - 1) as f64 {
            return 0.0;
        }
        let i = fi.floor() as usize;
        let t = fi - i as f64;
        // 4-point Lagrange on nodes i-1..i+2 with even reflection at 0.
        let get = |j: isize| -> f64 {
            let j = j.unsigned_abs().min(n - 1);
            self.values[j]
        };
        let i = i as isize;
        let (m1, p0, p1, p2) = (get(i - 1), get(i), get(i + 1), get(i + 2));
        let c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        c0 * m1 + c1 * p0 + c2 * p1 + c3 * p2
    }
}

/// Complex-valued counterpart of `EvenTable` for Hermitian functions
/// (f(-x) = conj f(x)); stores x >= 0.
#[derive(Debug, Clone)]
pub(crate) struct HermitianTable {
    step: f64,
    values: Vec<Complex64>,
}

impl HermitianTable {
    pub(crate) fn from_values(step: f64, values: Vec<Complex64>) -> Self {
        HermitianTable { step, values }
    }

    pub(crate) fn build(radius: f64, n: usize, f: impl Fn(f64) -> Complex64 + Sync) -> Self {
        use rayon::prelude::*;
        let step = radius / (n - 1) as f64;
        let values: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|i| f(i as f64 * step))
            .collect();
        HermitianTable { step, values }
    }

    pub(crate) fn eval(&self, x: f64) -> Complex64 {
        let ax = x.abs();
        let n = self.values.len();
        let fi = ax / self.step;
        if fi >= (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = fi.floor() as usize;
        let t = fi - i as f64;
        let get = |j: isize| -> Complex64 {
            if j < 0 {
                self.values[(-j) as usize].conj()
            } else {
                self.values[(j as usize).min(n - 1)]
            }
        };
        let i = i as isize;
        let (m1, p0, p1, p2) = (get(i - 1), get(i), get(i + 1), get(i + 2));
        let c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        let v = m1 * c0 + p0 * c1 + p1 * c2 + p2 * c3;
        if x < 0.0 {
            v.conj()
        } else {
            v
        }
    }
}

/// The constructed generator pair with normalization constants and the
/// tabulated cumulative profile used by the coarse-scale window.
#[derive(Debug)]
pub struct GeneratorProfile {
    params: BumpParams,
    z1: f64,
    z2: f64,
    smoothness_class: String,
    cumulative: CumulativeTable,
    psi1_spatial: OnceLock<HermitianTable>,
    phi2_spatial: OnceLock<EvenTable>,
    edge_kernels: OnceLock<crate::transform::EdgeKernels>,
}

pub(crate) fn raw_bump1(w: f64, lo: f64, hi: f64, c: f64) -> f64 {
    if w <= lo || w >= hi {
        0.0
    } else {
        (-c / (w - lo)).exp() * (-c / (hi - w)).exp()
    }
}

pub(crate) fn raw_bump2(u: f64, c: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-c / (1.0 - u * u)).exp()
    }
}

impl GeneratorProfile {
    /// Builds the profile, fixing the normalization constants by adaptive
    /// quadrature (relative tolerance 1e-12).
    pub fn build(params: BumpParams) -> Result<Self> {
        let (lo, hi) = params.psi1_support;
        if !(lo.is_finite() && hi.is_finite() && 0.5 <= lo && lo < hi && hi <= 2.0) {
            return Err(Error::InvalidProfile(format!(
                "scale profile support must satisfy 0.5 <= lo < hi <= 2.0, got [{lo}, {hi}]"
            )));
        }
        if !(params.psi1_sharpness > 0.0) || !(params.psi2_sharpness > 0.0) {
            return Err(Error::InvalidProfile(
                "sharpness parameters must be positive".into(),
            ));
        }
        let c1 = params.psi1_sharpness;
        let c2 = params.psi2_sharpness;
        let z1 = adaptive_rel(lo, hi, |w| {
            let b = raw_bump1(w, lo, hi, c1);
            b * b / w
        });
        let z2 = adaptive_rel(-1.0, 1.0, |u| {
            let b = raw_bump2(u, c2);
            b * b
        });
        if !(z1.is_finite() && z1 > 0.0 && z2.is_finite() && z2 > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "non-finite or vanishing normalization: Z1={z1}, Z2={z2}"
            )));
        }
        let cumulative = CumulativeTable::build(lo, hi, |u| {
            let b = raw_bump1(u, lo, hi, c1);
            b * b / (z1 * u)
        });
        Ok(GeneratorProfile {
            params,
            z1,
            z2,
            smoothness_class: "exponential bump, C-infinity compact support".into(),
            cumulative,
            psi1_spatial: OnceLock::new(),
            phi2_spatial: OnceLock::new(),
            edge_kernels: OnceLock::new(),
        })
    }

    pub fn default_profile() -> Self {
        GeneratorProfile::build(BumpParams::default()).expect("default parameters are valid")
    }

    pub fn params(&self) -> &BumpParams {
        &self.params
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn z2(&self) -> f64 {
        self.z2
    }

    pub fn smoothness_class(&self) -> &str {
        &self.smoothness_class
    }

    pub fn sided(&self) -> Sided {
        self.params.sided
    }

    pub fn psi1_support(&self) -> (f64, f64) {
        self.params.psi1_support
    }

    /// Scale profile on the frequency axis.
    pub fn psi1_hat(&self, w: f64) -> f64 {
        let (lo, hi) = self.params.psi1_support;
        let arg = match self.params.sided {
            Sided::TwoSided => w.abs(),
            Sided::PositiveOnly => {
                if w < 0.0 {
                    return 0.0;
                }
                w
            }
            Sided::NegativeOnly => {
                if w > 0.0 {
                    return 0.0;
                }
                -w
            }
        };
        raw_bump1(arg, lo, hi, self.params.psi1_sharpness) / self.z1.sqrt()
    }

    /// Slope profile; even, supported on [-1,1], positive inside.
    pub fn psi2_hat(&self, u: f64) -> f64 {
        raw_bump2(u, self.params.psi2_sharpness) / self.z2.sqrt()
    }

    /// The 2-D symbol psi1_hat(xi_c) psi2_hat(xi_o/xi_c); total function,
    /// the support test guards the slope division.
    pub fn psi_hat(&self, xi: [f64; 2], variant: Variant, side: Side) -> f64 {
        let (c, o) = match variant {
            Variant::Horizontal => (xi[0], xi[1]),
            Variant::Vertical => (xi[1], xi[0]),
        };
        match side {
            Side::Plus if c <= 0.0 => return 0.0,
            Side::Minus if c >= 0.0 => return 0.0,
            _ => {}
        }
        let p1 = self.psi1_hat(c);
        if p1 == 0.0 {
            return 0.0;
        }
        p1 * self.psi2_hat(o / c - 0.0)
    }

    /// One analyzing element in frequency:
    /// a^((1+delta)/2) e^(-2 pi i xi.t) psi1_hat(a xi_c) psi2_hat(a^(delta-1) (xi_o/xi_c - s)).
    pub fn shearlet_hat(&self, xi: [f64; 2], index: &ShearletIndex) -> Complex64 {
        let (c, o) = match index.variant {
            Variant::Horizontal => (xi[0], xi[1]),
            Variant::Vertical => (xi[1], xi[0]),
        };
        match index.side {
            Side::Plus if c <= 0.0 => return Complex64::new(0.0, 0.0),
            Side::Minus if c >= 0.0 => return Complex64::new(0.0, 0.0),
            _ => {}
        }
        let p1 = self.psi1_hat(index.a * c);
        if p1 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p2 = self.psi2_hat((o / c - index.s) / index.slope_halfwidth());
        if p2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase = -2.0 * PI * (xi[0] * index.t[0] + xi[1] * index.t[1]);
        index.amplitude() * p1 * p2 * Complex64::new(phase.cos(), phase.sin())
    }

    /// Exact frequency support of the analyzing element.
    pub fn support_region(&self, index: &ShearletIndex) -> FrequencyRegion {
        let (lo, hi) = self.params.psi1_support;
        let side = match (self.params.sided, index.side) {
            (Sided::PositiveOnly, _) => Side::Plus,
            (Sided::NegativeOnly, _) => Side::Minus,
            (_, s) => s,
        };
        FrequencyRegion::TrapezoidPair {
            xi_lo: lo / index.a,
            xi_hi: hi / index.a,
            s: index.s,
            slope_halfwidth: index.slope_halfwidth(),
            variant: index.variant,
            side,
        }
    }

    /// Cumulative Calderon integral int_0^x |psi1_hat(u)|^2 du/u; exactly 0
    /// below the support and saturates at the top.
    pub fn cumulative_psi1_sq(&self, x: f64) -> f64 {
        self.cumulative.eval(x)
    }

    /// Coarse-scale window: sqrt(1 - cone cumulative terms), clamped at 0.
    pub fn window_hat(&self, xi: [f64; 2]) -> f64 {
        let active = if xi[1].abs() <= xi[0].abs() {
            xi[0].abs()
        } else {
            xi[1].abs()
        };
        (1.0 - self.cumulative.eval(active)).max(0.0).sqrt()
    }

    /// Spatial scale profile psi1 (inverse transform of psi1_hat), from a
    /// cached half-axis table. Real for the two-sided profile.
    pub fn psi1_spatial(&self, x: f64) -> Complex64 {
        let table = self.psi1_spatial.get_or_init(|| self.build_psi1_table());
        match self.params.sided {
            Sided::TwoSided => {
                let half = table.eval(x);
                Complex64::new(2.0 * half.re, 0.0)
            }
            Sided::PositiveOnly => table.eval(x),
            Sided::NegativeOnly => table.eval(x).conj(),
        }
    }

    /// Spatial slope profile phi2 (inverse transform of psi2_hat); real, even.
    pub fn phi2_spatial(&self, tau: f64) -> f64 {
        let table = self.phi2_spatial.get_or_init(|| self.build_phi2_table());
        table.eval(tau)
    }

    pub(crate) fn edge_kernels(&self) -> &crate::transform::EdgeKernels {
        self.edge_kernels
            .get_or_init(|| crate::transform::EdgeKernels::build(self))
    }

    fn build_psi1_table(&self) -> HermitianTable {
        let (lo, hi) = self.params.psi1_support;
        let c1 = self.params.psi1_sharpness;
        let z1s = self.z1.sqrt();
        const RADIUS: f64 = 64.0;
        const N: usize = 1 << 16;
        let table = HermitianTable::build(RADIUS, N, |x| {
            let cycles = (hi - lo) * x + 2.0;
            let nodes = (8.0 * cycles).ceil() as usize + 64;
            quad::composite_complex(lo, hi, nodes, |w| {
                let amp = raw_bump1(w, lo, hi, c1) / z1s;
                let ph = 2.0 * PI * w * x;
                Complex64::new(amp * ph.cos(), amp * ph.sin())
            })
        });
        table
    }

    fn build_phi2_table(&self) -> EvenTable {
        let c2 = self.params.psi2_sharpness;
        let z2s = self.z2.sqrt();
        const RADIUS: f64 = 64.0;
        const N: usize = 1 << 16;
        EvenTable::build(RADIUS, N, |tau| {
            let cycles = 2.0 * tau + 2.0;
            let nodes = (8.0 * cycles).ceil() as usize + 64;
            2.0 * quad::composite(0.0, 1.0, nodes, |u| {
                raw_bump2(u, c2) / z2s * (2.0 * PI * u * tau).cos()
            })
        })
    }
}

fn adaptive_rel(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let rough = quad::adaptive(a, b, 1e-6, &f);
    quad::adaptive(a, b, (rough.abs() * 1e-12).max(1e-300), &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: &F) -> f64 {
        // plain composite Simpson oracle, independent of the GL machinery
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn profile() -> GeneratorProfile {
        GeneratorProfile::default_profile()
    }

    #[test]
    fn psi1_vanishes_outside_support() {
        let p = profile();
        assert_eq!(p.psi1_hat(0.4), 0.0);
        assert_eq!(p.psi1_hat(2.0), 0.0);
        assert_eq!(p.psi1_hat(0.5), 0.0);
        assert_eq!(p.psi1_hat(2.5), 0.0);
        assert!(p.psi1_hat(1.0) > 0.0);
        assert!(p.psi1_hat(-1.0) > 0.0);
    }

    #[test]
    fn psi2_support_and_positivity() {
        let p = profile();
        assert_eq!(p.psi2_hat(1.0), 0.0);
        assert_eq!(p.psi2_hat(-1.0), 0.0);
        assert!(p.psi2_hat(0.0) > 0.0);
        assert!(p.psi2_hat(0.999) > 0.0);
        assert!(p.psi2_hat(-0.999) > 0.0);
    }

    #[test]
    fn calderon_normalization_matches_simpson_oracle() {
        let p = profile();
        let i1 = simpson(0.5, 2.0, 40000, &|w| {
            let v = p.psi1_hat(w);
            v * v / w
        });
        assert!((i1 - 1.0).abs() < 1e-10, "Calderon integral = {i1}");
        let i2 = simpson(-1.0, 1.0, 40000, &|u| {
            let v = p.psi2_hat(u);
            v * v
        });
        assert!((i2 - 1.0).abs() < 1e-10, "psi2 norm = {i2}");
    }

    #[test]
    fn smoothness_finite_differences_stay_bounded() {
        let p = profile();
        // central differences of order 1..4 on a refinement sequence
        let stencil = |f: &dyn Fn(f64) -> f64, x: f64, h: f64, order: usize| -> f64 {
            match order {
                1 => (f(x + h) - f(x - h)) / (2.0 * h),
                2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
                3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h))
                    / (2.0 * h * h * h),
                4 => (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h)
                    + f(x - 2.0 * h))
                    / (h * h * h * h),
                _ => unreachable!(),
            }
        };
        // bounded on refinement: no 1/h^k blow-up (a kink would double the
        // value per halving)
        let bounded = |f: &dyn Fn(f64) -> f64, x: f64, order: usize| {
            let seq: Vec<f64> = [2e-2, 1e-2, 5e-3, 2.5e-3]
                .iter()
                .map(|&h| stencil(f, x, h, order))
                .collect();
            for v in &seq {
                assert!(v.is_finite(), "order-{order} at {x}: non-finite fd");
            }
            for w in seq.windows(2) {
                assert!(
                    w[1].abs() <= 1.3 * w[0].abs() + 10.0,
                    "order-{order} fd grows under refinement at {x}: {seq:?}"
                );
            }
        };
        let f1 = |w: f64| p.psi1_hat(w);
        let f2 = |u: f64| p.psi2_hat(u);
        for order in 1..=4 {
            for &x in &[0.7, 1.0, 1.3, 1.9] {
                bounded(&f1, x, order);
            }
            for &x in &[-0.5, 0.0, 0.5, 0.9] {
                bounded(&f2, x, order);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut p = BumpParams::default();
        p.psi1_support = (1.5, 1.5);
        assert!(GeneratorProfile::build(p).is_err());
        let mut p = BumpParams::default();
        p.psi1_support = (0.4, 2.0);
        assert!(GeneratorProfile::build(p).is_err());
        let mut p = BumpParams::default();
        p.psi1_sharpness = -1.0;
        assert!(GeneratorProfile::build(p).is_err());
    }

    #[test]
    fn psi_hat_values() {
        let p = profile();
        let center = p.psi_hat([1.0, 0.0], Variant::Horizontal, Side::Both);
        assert!(center > 0.0);
        assert!((center - p.psi1_hat(1.0) * p.psi2_hat(0.0)).abs() < 1e-15);
        assert_eq!(p.psi_hat([3.0, 0.0], Variant::Horizontal, Side::Both), 0.0);
        let v = p.psi_hat([1.0, 0.5], Variant::Horizontal, Side::Both);
        assert!((v - p.psi1_hat(1.0) * p.psi2_hat(0.5)).abs() < 1e-15);
        // independent bump evaluation
        let b1 = (-1.0f64 / 0.5).exp() * (-1.0f64 / 1.0).exp();
        let b2 = (-1.0f64 / 0.75).exp();
        let direct = b1 / p.z1().sqrt() * (b2 / p.z2().sqrt());
        assert!((v - direct).abs() < 1e-14, "{v} vs {direct}");
        // one-sided zeroing
        assert_eq!(p.psi_hat([-1.0, 0.0], Variant::Horizontal, Side::Plus), 0.0);
        assert!(p.psi_hat([-1.0, 0.0], Variant::Horizontal, Side::Minus) > 0.0);
        // vertical role swap
        let vv = p.psi_hat([0.5, 1.0], Variant::Vertical, Side::Both);
        assert!((vv - p.psi1_hat(1.0) * p.psi2_hat(0.5)).abs() < 1e-15);
    }

    #[test]
    fn shearlet_hat_amplitude_law() {
        let p = profile();
        let idx = ShearletIndex::new(1.0, 0.0, [0.0, 0.0]);
        let v = p.shearlet_hat([1.0, 0.0], &idx);
        assert!((v.im).abs() < 1e-18);
        assert!((v.re - p.psi1_hat(1.0) * p.psi2_hat(0.0)).abs() < 1e-15);

        let idx = ShearletIndex::new(0.25, 0.0, [0.0, 0.0]);
        let v = p.shearlet_hat([4.0, 0.0], &idx);
        let expect = 0.25f64.powf(0.75) * p.psi1_hat(1.0) * p.psi2_hat(0.0);
        assert!((v.re - expect).abs() < 1e-15, "a^(3/4) amplitude law");

        // support law |xi2/xi1 - s| <= sqrt(a)
        let idx = ShearletIndex::new(0.25, 0.0, [0.3, -0.7]);
        let inside = p.shearlet_hat([4.0, 4.0 * 0.49], &idx);
        let outside = p.shearlet_hat([4.0, 4.0 * 0.51], &idx);
        assert!(inside.norm() > 0.0);
        assert_eq!(outside.norm(), 0.0);
        // amplitude scaling across dyadic scales at the support center
        let mut prev = 0.0;
        for k in 0..6 {
            let a = 0.5f64.powi(k);
            let idx = ShearletIndex::new(a, 0.0, [0.0, 0.0]);
            let v = p.shearlet_hat([1.0 / a, 0.0], &idx).norm();
            if k > 0 {
                let ratio = v / prev;
                assert!(
                    (ratio - 0.5f64.powf(0.75)).abs() < 1e-12,
                    "dyadic amplitude ratio {ratio}"
                );
            }
            prev = v;
        }
    }

    #[test]
    fn support_region_membership() {
        let p = profile();
        let idx = ShearletIndex::new(1.0, 0.0, [0.0, 0.0]);
        let r = p.support_region(&idx);
        assert!(r.contains([1.0, 0.5]));
        assert!(!r.contains([1.0, 1.5]));

        let idx = ShearletIndex::new(1.0 / 16.0, 0.0, [0.0, 0.0]);
        if let FrequencyRegion::TrapezoidPair { xi_lo, xi_hi, .. } = p.support_region(&idx) {
            assert!((xi_lo - 8.0).abs() < 1e-12);
            assert!((xi_hi - 32.0).abs() < 1e-12);
        } else {
            panic!("expected trapezoid pair");
        }

        let idx = ShearletIndex::new(0.25, 1.0, [0.0, 0.0]);
        let r = p.support_region(&idx);
        assert!(r.contains([4.0, 4.0]));
    }

    #[test]
    fn support_exactness_on_samples() {
        let p = profile();
        let idx = ShearletIndex::new(0.25, 0.7, [0.1, 0.2]);
        let region = p.support_region(&idx);
        let mut inside_seen = 0;
        for i in 0..60 {
            for j in 0..60 {
                let xi = [-10.0 + 20.0 * (i as f64 + 0.41) / 60.0, -12.0 + 24.0 * (j as f64 + 0.37) / 60.0];
                let hat = p.shearlet_hat(xi, &idx).norm();
                if region.contains(xi) {
                    inside_seen += 1;
                    assert!(hat > 0.0, "zero inside support at {xi:?}");
                } else {
                    assert_eq!(hat, 0.0, "nonzero outside support at {xi:?}");
                }
            }
        }
        assert!(inside_seen > 10);
    }

    #[test]
    fn window_values() {
        let p = profile();
        assert_eq!(p.window_hat([0.25, 0.25]), 1.0);
        assert_eq!(p.window_hat([0.5, 0.1]), 1.0);
        assert_eq!(p.window_hat([4.0, 0.0]), 0.0);
        assert_eq!(p.window_hat([0.0, 4.0]), 0.0);
        let w = p.window_hat([1.0, 0.0]);
        assert!(w > 0.0 && w < 1.0);
        // independent cumulative-quadrature oracle
        let cum = simpson(0.5, 1.0, 20000, &|u| {
            let v = p.psi1_hat(u);
            v * v / u
        });
        assert!(
            (w - (1.0 - cum).sqrt()).abs() < 1e-9,
            "window at (1,0): {w} vs oracle {}",
            (1.0 - cum).sqrt()
        );
    }

    #[test]
    fn partition_of_unity_on_grid() {
        let p = profile();
        // |W|^2 + cone terms = 1, cone terms via the independent oracle
        for i in 0..24 {
            for j in 0..24 {
                let xi = [
                    -64.0 + 128.0 * (i as f64 + 0.5) / 24.0,
                    -64.0 + 128.0 * (j as f64 + 0.5) / 24.0,
                ];
                let w2 = p.window_hat(xi).powi(2);
                let horizontal = xi[1].abs() <= xi[0].abs();
                let active: f64 = if horizontal { xi[0].abs() } else { xi[1].abs() };
                let cone = if active <= 0.5 {
                    0.0
                } else {
                    simpson(0.5, active.min(2.0), 4000, &|u| {
                        let v = p.psi1_hat(u);
                        v * v / u
                    })
                };
                assert!(
                    (w2 + cone - 1.0).abs() < 1e-8,
                    "partition failed at {xi:?}: {}",
                    w2 + cone
                );
            }
        }
    }

    #[test]
    fn symbol_symmetry_two_sided() {
        let p = profile();
        for &xi in &[[1.0, 0.3], [-1.5, 0.2], [0.7, -0.6], [1.9, 1.2]] {
            let a = p.psi_hat(xi, Variant::Horizontal, Side::Both);
            let b = p.psi_hat([-xi[0], -xi[1]], Variant::Horizontal, Side::Both);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cumulative_tracks_oracle() {
        let p = profile();
        for &x in &[0.6, 0.8, 1.0, 1.3, 1.7, 1.95] {
            let oracle = simpson(0.5, x, 20000, &|u| {
                let v = p.psi1_hat(u);
                v * v / u
            });
            let got = p.cumulative_psi1_sq(x);
            assert!((got - oracle).abs() < 1e-9, "cumulative at {x}: {got} vs {oracle}");
        }
        assert_eq!(p.cumulative_psi1_sq(0.5), 0.0);
        assert!((p.cumulative_psi1_sq(2.0) - 1.0).abs() < 1e-10);
        assert!((p.cumulative_psi1_sq(5.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dilation_matrix_matches_parabolic_scaling() {
        let idx = ShearletIndex::new(0.25, 1.5, [0.0, 0.0]);
        let m = idx.dilation_matrix();
        assert!((m[0][0] - 0.25).abs() < 1e-15);
        assert!((m[0][1] + 0.5 * 1.5).abs() < 1e-15);
        assert!((m[1][0]).abs() < 1e-15);
        assert!((m[1][1] - 0.5).abs() < 1e-15);
        assert!(idx.validate().is_ok());
        assert!(ShearletIndex::new(-1.0, 0.0, [0.0, 0.0]).validate().is_err());
        assert!(ShearletIndex::new(1.0, 0.0, [0.0, 0.0])
            .with_delta(1.0)
            .validate()
            .is_err());
    }
}
