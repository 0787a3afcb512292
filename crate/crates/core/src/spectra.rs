//! Exact frequency-domain representations of the test distributions, plus
//! ingestion of sampled fields.

use crate::error::{Error, Result};
use crate::generator::raw_bump2;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Tagged union of analysis inputs. Every member except `LineDelta` has a
/// pointwise spectrum; the line measure is served by a closed form in the
/// transform module.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticDistribution {
    /// Point mass at `x0`; spectrum e^(-2 pi i xi.x0).
    Dirac { x0: [f64; 2] },
    /// Measure on the line x1 = -p x2 (slope parameter p).
    LineDelta { p: f64 },
    /// Indicator of a simple polygon, counterclockwise vertices.
    PolygonIndicator { vertices: Vec<[f64; 2]> },
    /// Indicator of a disc.
    DiscIndicator { center: [f64; 2], radius: f64 },
    /// Separable C-infinity bump in frequency, supported on the box
    /// center +- halfwidth.
    BandlimitedBump {
        center: [f64; 2],
        halfwidth: [f64; 2],
        amplitude: f64,
        sharpness: f64,
    },
    /// H x W real samples over [0, extent]^2, row-major with the origin at
    /// the lower-left corner.
    SampledField {
        samples: Vec<f64>,
        height: usize,
        width: usize,
        extent: f64,
    },
}

impl AnalyticDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            AnalyticDistribution::Dirac { x0 } => {
                if x0.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution("non-finite Dirac location".into()))
                }
            }
            AnalyticDistribution::LineDelta { p } => {
                if p.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution("non-finite slope".into()))
                }
            }
            AnalyticDistribution::PolygonIndicator { vertices } => validate_polygon(vertices),
            AnalyticDistribution::DiscIndicator { center, radius } => {
                if !center.iter().all(|c| c.is_finite()) || !radius.is_finite() || *radius <= 0.0 {
                    Err(Error::InvalidDistribution(
                        "disc needs finite center and positive radius".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            AnalyticDistribution::BandlimitedBump {
                center,
                halfwidth,
                amplitude,
                sharpness,
            } => {
                let ok = center.iter().chain(halfwidth.iter()).all(|c| c.is_finite())
                    && halfwidth.iter().all(|h| *h > 0.0)
                    && amplitude.is_finite()
                    && *sharpness > 0.0;
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution("invalid bump parameters".into()))
                }
            }
            AnalyticDistribution::SampledField {
                samples,
                height,
                width,
                extent,
            } => {
                if samples.len() != height * width {
                    return Err(Error::InvalidDistribution("sample count mismatch".into()));
                }
                if !(*extent > 0.0 && extent.is_finite()) {
                    return Err(Error::InvalidDistribution("extent must be positive".into()));
                }
                if samples.iter().any(|s| !s.is_finite()) {
                    return Err(Error::InvalidDistribution("non-finite samples".into()));
                }
                Ok(())
            }
        }
    }

    /// True when the spatial distribution is real-valued, i.e. the spectrum
    /// is conjugate-symmetric.
    pub fn is_real(&self) -> bool {
        match self {
            AnalyticDistribution::BandlimitedBump { center, .. } => {
                center[0] == 0.0 && center[1] == 0.0
            }
            _ => true,
        }
    }

    /// Componentwise bound on the spectrum's phase gradient (divided by
    /// 2 pi), used by the oscillation budgeter.
    pub fn oscillation_radius(&self) -> [f64; 2] {
        match self {
            AnalyticDistribution::Dirac { x0 } => [x0[0].abs(), x0[1].abs()],
            AnalyticDistribution::LineDelta { .. } => [0.0, 0.0],
            AnalyticDistribution::PolygonIndicator { vertices } => vertices.iter().fold(
                [0.0f64, 0.0],
                |m, v| [m[0].max(v[0].abs()), m[1].max(v[1].abs())],
            ),
            AnalyticDistribution::DiscIndicator { center, radius } => {
                [center[0].abs() + radius, center[1].abs() + radius]
            }
            AnalyticDistribution::BandlimitedBump { .. } => [0.0, 0.0],
            AnalyticDistribution::SampledField { extent, .. } => [*extent, *extent],
        }
    }

    /// Frequency support box for band-limited inputs, as
    /// [[xi1_lo, xi1_hi], [xi2_lo, xi2_hi]].
    pub fn frequency_box(&self) -> Option<[[f64; 2]; 2]> {
        match self {
            AnalyticDistribution::BandlimitedBump {
                center, halfwidth, ..
            } => Some([
                [center[0] - halfwidth[0], center[0] + halfwidth[0]],
                [center[1] - halfwidth[1], center[1] + halfwidth[1]],
            ]),
            _ => None,
        }
    }

    /// Pointwise spectrum value. Errors for the line measure, which has no
    /// pointwise density.
    pub fn spectrum(&self, xi: [f64; 2]) -> Result<Complex64> {
        match self {
            AnalyticDistribution::Dirac { x0 } => Ok(phase(-dot(xi, *x0))),
            AnalyticDistribution::LineDelta { .. } => Err(Error::NoPointwiseSpectrum),
            AnalyticDistribution::PolygonIndicator { vertices } => {
                Ok(polygon_spectrum(vertices, xi))
            }
            AnalyticDistribution::DiscIndicator { center, radius } => {
                let rho = radius * (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                Ok(phase(-dot(xi, *center)) * (radius * radius * jinc(rho)))
            }
            AnalyticDistribution::BandlimitedBump {
                center,
                halfwidth,
                amplitude,
                sharpness,
            } => Ok(Complex64::new(
                amplitude
                    * raw_bump2((xi[0] - center[0]) / halfwidth[0], *sharpness)
                    * raw_bump2((xi[1] - center[1]) / halfwidth[1], *sharpness),
                0.0,
            )),
            AnalyticDistribution::SampledField {
                samples,
                height,
                width,
                extent,
            } => {
                let dx = extent / *width as f64;
                let dy = extent / *height as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..*height {
                    let y = (i as f64 + 0.5) * dy;
                    // separable phase: accumulate a row factor once per row
                    let row_phase = phase(-xi[1] * y);
                    let mut row = Complex64::new(0.0, 0.0);
                    for j in 0..*width {
                        let x = (j as f64 + 0.5) * dx;
                        row += phase(-xi[0] * x) * samples[i * width + j];
                    }
                    acc += row * row_phase;
                }
                Ok(acc * (dx * dy))
            }
        }
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn phase(arg: f64) -> Complex64 {
    let t = 2.0 * PI * arg;
    Complex64::new(t.cos(), t.sin())
}

/// E(theta) = int_0^1 e^(i theta tau) d tau with the removable singularity
/// filled by a series for small arguments.
fn edge_e(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        let it = Complex64::new(0.0, theta);
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(1.0, 0.0);
        for k in 1..=6 {
            term = term * it / (k as f64 + 1.0);
            acc += term;
        }
        // Sum of (i theta)^k / (k+1)!.
        acc
    } else {
        let it = Complex64::new(0.0, theta);
        (it.exp() - 1.0) / it
    }
}

/// Closed-form spectrum of a polygon indicator via the divergence theorem:
/// the area integral reduces to a signed sum of per-edge terms.
pub fn polygon_spectrum(vertices: &[[f64; 2]], xi: [f64; 2]) -> Complex64 {
    let norm2 = xi[0] * xi[0] + xi[1] * xi[1];
    if norm2 == 0.0 {
        return Complex64::new(polygon_area(vertices), 0.0);
    }
    let n = vertices.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for e in 0..n {
        let v = vertices[e];
        let w = vertices[(e + 1) % n];
        let d = [w[0] - v[0], w[1] - v[1]];
        // (xi . n_e) L_e for the outward normal of a CCW polygon
        let flux = xi[0] * d[1] - xi[1] * d[0];
        if flux == 0.0 {
            continue;
        }
        let theta = -2.0 * PI * dot(xi, d);
        acc += phase(-dot(xi, v)) * edge_e(theta) * flux;
    }
    acc / Complex64::new(0.0, -2.0 * PI * norm2)
}

pub fn polygon_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * twice
}

fn validate_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    if vertices.len() < 3 {
        return Err(Error::InvalidDistribution(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidDistribution("non-finite vertex".into()));
    }
    let area = polygon_area(vertices);
    if area <= 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "vertices must be counterclockwise with positive area (signed area {area})"
        )));
    }
    let n = vertices.len();
    let seg = |i: usize| (vertices[i], vertices[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = seg(i);
        if a == b {
            return Err(Error::InvalidDistribution("zero-length edge".into()));
        }
        for j in i + 1..n {
            // adjacent edges share an endpoint by construction
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = seg(j);
            if segments_intersect(a, b, c, d) {
                return Err(Error::InvalidDistribution(
                    "polygon is self-intersecting".into(),
                ));
            }
        }
    }
    Ok(())
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let cross = |o: [f64; 2], p: [f64; 2], q: [f64; 2]| {
        (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])
    };
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// jinc(rho) = J1(2 pi rho) / rho, with jinc(0) = pi.
pub fn jinc(rho: f64) -> f64 {
    if rho < 1e-3 {
        let z2 = (PI * rho) * (PI * rho);
        // pi * sum (-1)^m z^(2m) / (m! (m+1)!)
        PI * (1.0 - z2 / 2.0 + z2 * z2 / 12.0 - z2 * z2 * z2 / 144.0)
    } else {
        bessel_j1(2.0 * PI * rho).expect("non-negative argument") / rho
    }
}

/// Bessel function of the first kind, order one. Power series below x = 14,
/// Hankel asymptotic expansion above; absolute accuracy ~1e-12 on [0, 200]
/// and beyond.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::NegativeBesselArgument(x));
    }
    if x < 14.0 {
        let q = x * x / 4.0;
        let mut term = x / 2.0;
        let mut acc = term;
        for m in 1..90 {
            term *= -q / (m as f64 * (m as f64 + 1.0));
            acc += term;
            if term.abs() < 1e-18 * acc.abs().max(1e-30) {
                break;
            }
        }
        Ok(acc)
    } else {
        // J1(x) = sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)), chi = x - 3 pi/4
        let mu = 4.0;
        let inv8x = 1.0 / (8.0 * x);
        let mut p = 1.0;
        let mut q = 0.0;
        let mut num = 1.0;
        let mut fact = 1.0;
        let mut prev_mag = f64::INFINITY;
        for k in 1..30 {
            let odd = (2 * k - 1) as f64;
            num *= mu - odd * odd;
            fact *= k as f64;
            let term = num / fact * inv8x.powi(k as i32);
            if term.abs() >= prev_mag {
                break; // asymptotic series: stop at the smallest term
            }
            prev_mag = term.abs();
            match k % 4 {
                1 => q += term,
                2 => p -= term,
                3 => q -= term,
                _ => p += term,
            }
            if term.abs() < 1e-17 {
                break;
            }
        }
        let chi = x - 0.75 * PI;
        Ok((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
    }
}

/// The cone {x1 >= 0, q x1 <= x2 <= p x1} clipped at x1 = extent, as a
/// triangle indicator. Analysis is valid for locations |t| well below the
/// truncation extent.
pub fn truncated_cone(p: f64, q: f64, extent: f64) -> Result<AnalyticDistribution> {
    if !(q > 0.0 && q < p && p.is_finite()) {
        return Err(Error::InvalidDistribution(format!(
            "cone slopes must satisfy 0 < q < p < inf, got q={q}, p={p}"
        )));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::InvalidDistribution(
            "truncation extent must be positive".into(),
        ));
    }
    let dist = AnalyticDistribution::PolygonIndicator {
        vertices: vec![[0.0, 0.0], [extent, q * extent], [extent, p * extent]],
    };
    dist.validate()?;
    Ok(dist)
}

/// Parses a binary (P5) 8-bit PGM into a sampled field on [0,1]^2 with
/// samples scaled to [0,1] and the origin at the lower-left corner.
pub fn ingest_pgm(bytes: &[u8]) -> Result<AnalyticDistribution> {
    let mut pos = 0usize;
    let magic = read_token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::MalformedPgm(format!(
            "expected binary P5 magic, got {:?}",
            String::from_utf8_lossy(&magic)
        )));
    }
    let width = parse_dim(&read_token(bytes, &mut pos)?, "width")?;
    let height = parse_dim(&read_token(bytes, &mut pos)?, "height")?;
    let maxval = parse_dim(&read_token(bytes, &mut pos)?, "maxval")?;
    if maxval != 255 {
        return Err(Error::MalformedPgm(format!(
            "only 8-bit images supported (maxval 255), got {maxval}"
        )));
    }
    // exactly one whitespace byte separates the header from the payload
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::MalformedPgm("missing header terminator".into()));
    }
    pos += 1;
    let need = width * height;
    let payload = &bytes[pos..];
    if payload.len() < need {
        return Err(Error::MalformedPgm(format!(
            "truncated payload: need {need} bytes, have {}",
            payload.len()
        )));
    }
    let mut samples = vec![0.0f64; need];
    for row in 0..height {
        let src = row * width;
        let dst = (height - 1 - row) * width;
        for col in 0..width {
            samples[dst + col] = payload[src + col] as f64 / 255.0;
        }
    }
    Ok(AnalyticDistribution::SampledField {
        samples,
        height,
        width,
        extent: 1.0,
    })
}

fn read_token(bytes: &[u8], pos: &mut usize) -> Result<Vec<u8>> {
    // skip whitespace and '#' comment lines
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    if *pos >= bytes.len() {
        return Err(Error::MalformedPgm("unexpected end of header".into()));
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Ok(bytes[start..*pos].to_vec())
}

fn parse_dim(token: &[u8], what: &str) -> Result<usize> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|v| *v > 0)
        .ok_or_else(|| Error::MalformedPgm(format!("bad {what}: {:?}", String::from_utf8_lossy(token))))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-rule oracle for indicator spectra over a bounding box.
    fn riemann_polygon(vertices: &[[f64; 2]], xi: [f64; 2], n: usize) -> Complex64 {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for v in vertices {
            x0 = x0.min(v[0]);
            x1 = x1.max(v[0]);
            y0 = y0.min(v[1]);
            y1 = y1.max(v[1]);
        }
        let dx = (x1 - x0) / n as f64;
        let dy = (y1 - y0) / n as f64;
        let inside = |p: [f64; 2]| -> bool {
            // ray casting
            let m = vertices.len();
            let mut odd = false;
            for i in 0..m {
                let a = vertices[i];
                let b = vertices[(i + 1) % m];
                if (a[1] > p[1]) != (b[1] > p[1]) {
                    let t = (p[1] - a[1]) / (b[1] - a[1]);
                    if p[0] < a[0] + t * (b[0] - a[0]) {
                        odd = !odd;
                    }
                }
            }
            odd
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let x = x0 + (i as f64 + 0.5) * dx;
            for j in 0..n {
                let y = y0 + (j as f64 + 0.5) * dy;
                if inside([x, y]) {
                    let t = -2.0 * PI * (xi[0] * x + xi[1] * y);
                    acc += Complex64::new(t.cos(), t.sin());
                }
            }
        }
        acc * dx * dy
    }

    fn j1_integral_oracle(x: f64) -> f64 {
        crate::quad::adaptive(0.0, PI, 1e-13, &|theta| (theta - x * theta.sin()).cos()) / PI
    }

    #[test]
    fn dirac_spectrum_is_unit_phase() {
        let d = AnalyticDistribution::Dirac { x0: [0.0, 0.0] };
        for &xi in &[[0.0, 0.0], [3.0, -1.0], [0.5, 0.25]] {
            let v = d.spectrum(xi).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let d = AnalyticDistribution::Dirac { x0: [0.25, -0.5] };
        let v = d.spectrum([1.0, 2.0]).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let want = -2.0 * PI * (1.0 * 0.25 + 2.0 * (-0.5));
        assert!((v.arg() - wrap(want)).abs() < 1e-12);
    }

    fn wrap(t: f64) -> f64 {
        let mut t = t % (2.0 * PI);
        if t > PI {
            t -= 2.0 * PI;
        }
        if t < -PI {
            t += 2.0 * PI;
        }
        t
    }

    #[test]
    fn line_delta_has_no_pointwise_spectrum() {
        let d = AnalyticDistribution::LineDelta { p: 0.5 };
        assert_eq!(d.spectrum([1.0, 0.0]), Err(Error::NoPointwiseSpectrum));
    }

    #[test]
    fn disc_spectrum_values() {
        let d = AnalyticDistribution::DiscIndicator {
            center: [0.0, 0.0],
            radius: 1.0,
        };
        let v = d.spectrum([0.0, 0.0]).unwrap();
        assert!((v.re - PI).abs() < 1e-14, "area of unit disc, got {}", v.re);
        assert!(v.im.abs() < 1e-16);
        // radial: depends only on |xi|
        let r = 3.7f64;
        let a = d.spectrum([r, 0.0]).unwrap();
        for &ang in &[0.3, 1.1, 2.0, 4.4] {
            let b = d.spectrum([r * f64::cos(ang), r * f64::sin(ang)]).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
        // against the 2-D Riemann oracle via a polygon approximation is slow;
        // check against the 1-D radial integral 2 int sqrt(1-x^2) e^(2pi i rho x) dx
        let rho = 2.3;
        let oracle = crate::quad::adaptive(-1.0, 1.0, 1e-12, &|x: f64| {
            (1.0 - x * x).sqrt() * (2.0 * PI * rho * x).cos()
        }) * 2.0;
        let got = d.spectrum([rho, 0.0]).unwrap();
        assert!((got.re - oracle).abs() < 1e-10, "{} vs {}", got.re, oracle);
    }

    /// Exact inner y-integration over the section [ya(x), yb(x)], outer
    /// composite GL in x: an independent reduction route for triangles.
    fn slice_oracle(
        x_range: (f64, f64),
        section: impl Fn(f64) -> (f64, f64),
        xi: [f64; 2],
    ) -> Complex64 {
        let inner = |x: f64| -> Complex64 {
            let (ya, yb) = section(x);
            if xi[1] == 0.0 {
                return Complex64::new(yb - ya, 0.0);
            }
            let c = Complex64::new(0.0, -2.0 * PI * xi[1]);
            ((c * yb).exp() - (c * ya).exp()) / c
        };
        let cycles = (x_range.1 - x_range.0) * (xi[0].abs() + 3.0 * xi[1].abs()) + 4.0;
        let nodes = ((16.0 * cycles) as usize).max(256);
        crate::quad::composite_complex(x_range.0, x_range.1, nodes, |x| {
            let t = -2.0 * PI * xi[0] * x;
            inner(x) * Complex64::new(t.cos(), t.sin())
        })
    }

    #[test]
    fn polygon_spectrum_area_and_oracle() {
        let tri = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let d = AnalyticDistribution::PolygonIndicator { vertices: tri.clone() };
        d.validate().unwrap();
        let v = d.spectrum([0.0, 0.0]).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15);
        // the midpoint oracle carries its own O(n^(-3/2)) boundary error, so
        // the comparison tolerance reflects the oracle, not the closed form
        let got = d.spectrum([2.0, 3.0]).unwrap();
        let oracle = riemann_polygon(&tri, [2.0, 3.0], 2000);
        assert!((got - oracle).norm() < 1e-4, "{got} vs {oracle}");
        // exact-in-y slice reduction pins the closed form tightly,
        // including at edge-orthogonal frequencies (series switchover)
        for &xi in &[
            [2.0, 3.0],
            [1.5, 1.5],
            [0.7, -1.3],
            [4.2, 0.0],
            [0.0, 2.6],
        ] {
            let got = d.spectrum(xi).unwrap();
            let strong = slice_oracle((0.0, 1.0), |x| (0.0, 1.0 - x), xi);
            assert!(
                (got - strong).norm() < 1e-9,
                "slice oracle at {xi:?}: {got} vs {strong}"
            );
        }
    }

    #[test]
    fn polygon_triangulation_additivity() {
        let square = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t1 = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        let t2 = vec![[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        for &xi in &[[0.7, -0.4], [2.0, 3.0], [0.0, 1.3], [5.5, 0.0]] {
            let whole = polygon_spectrum(&square, xi);
            let parts = polygon_spectrum(&t1, xi) + polygon_spectrum(&t2, xi);
            assert!((whole - parts).norm() < 1e-10, "at {xi:?}");
        }
    }

    #[test]
    fn polygon_validation() {
        // clockwise
        let cw = AnalyticDistribution::PolygonIndicator {
            vertices: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
        };
        assert!(cw.validate().is_err());
        // bowtie
        let bow = AnalyticDistribution::PolygonIndicator {
            vertices: vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
        };
        assert!(bow.validate().is_err());
        let two = AnalyticDistribution::PolygonIndicator {
            vertices: vec![[0.0, 0.0], [1.0, 1.0]],
        };
        assert!(two.validate().is_err());
    }

    #[test]
    fn bessel_j1_values() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!(bessel_j1(-1.0).is_err());
        // first positive zero, located by bisection on the integral oracle
        let mut lo = 3.0;
        let mut hi = 4.5;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if j1_integral_oracle(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let zero = 0.5 * (lo + hi);
        assert!((zero - 3.8317059702075123).abs() < 1e-9);
        assert!(bessel_j1(3.8317059702075123).unwrap().abs() < 1e-10);
        // oracle agreement across the series/asymptotic boundary
        for &x in &[0.5, 2.0, 7.9, 8.0, 8.1, 15.0, 50.0, 120.0, 200.0] {
            let got = bessel_j1(x).unwrap();
            let want = j1_integral_oracle(x);
            assert!((got - want).abs() < 1e-10, "J1({x}) = {got} vs {want}");
        }
    }

    #[test]
    fn truncated_cone_construction() {
        let c = truncated_cone(2.0, 1.0, 10.0).unwrap();
        match &c {
            AnalyticDistribution::PolygonIndicator { vertices } => {
                assert_eq!(vertices.as_slice(), &[[0.0, 0.0], [10.0, 10.0], [10.0, 20.0]]);
            }
            _ => panic!("expected polygon"),
        }
        assert!(truncated_cone(2.0, 2.0, 10.0).is_err());
        assert!(truncated_cone(1.0, 2.0, 10.0).is_err());
        assert!(truncated_cone(2.0, 1.0, -1.0).is_err());
        // spectrum against the midpoint oracle (oracle-limited tolerance)
        let cone = truncated_cone(3.0, 1.0, 20.0).unwrap();
        if let AnalyticDistribution::PolygonIndicator { vertices } = &cone {
            let got = cone.spectrum([1.0, 1.0]).unwrap();
            let oracle = riemann_polygon(vertices, [1.0, 1.0], 2400);
            assert!((got - oracle).norm() < 2e-2, "{got} vs {oracle}");
        }
        // slice reduction pins it tightly: sections y in [q x, p x]
        for &xi in &[[1.0, 1.0], [0.6, -0.35], [1.37, 0.22]] {
            let got = cone.spectrum(xi).unwrap();
            let strong = slice_oracle((0.0, 20.0), |x| (1.0 * x, 3.0 * x), xi);
            assert!(
                (got - strong).norm() < 1e-8 * strong.norm().max(1e-3),
                "cone slice oracle at {xi:?}: {got} vs {strong}"
            );
        }
    }

    #[test]
    fn pgm_ingestion() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 255, 255, 255]);
        let field = ingest_pgm(&bytes).unwrap();
        match &field {
            AnalyticDistribution::SampledField {
                samples,
                height,
                width,
                extent,
            } => {
                assert_eq!((*height, *width), (2, 2));
                assert_eq!(*extent, 1.0);
                assert!(samples.iter().all(|s| (*s - 1.0).abs() < 1e-15));
            }
            _ => panic!(),
        }
        // mean value = f_hat(0)
        let v = field.spectrum([0.0, 0.0]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);

        let ascii = b"P2\n2 2\n255\n0 0 0 0".to_vec();
        assert!(matches!(ingest_pgm(&ascii), Err(Error::MalformedPgm(_))));

        let mut truncated = b"P5\n4 4\n255\n".to_vec();
        truncated.extend_from_slice(&[0u8; 7]);
        assert!(matches!(ingest_pgm(&truncated), Err(Error::MalformedPgm(_))));

        let mut wrong_max = b"P5\n1 1\n65535\n".to_vec();
        wrong_max.extend_from_slice(&[0, 0]);
        assert!(matches!(ingest_pgm(&wrong_max), Err(Error::MalformedPgm(_))));

        // orientation: bottom row of the image is the first sample row
        let mut oriented = b"P5\n1 2\n255\n".to_vec();
        oriented.extend_from_slice(&[255, 0]); // top pixel bright, bottom dark
        if let AnalyticDistribution::SampledField { samples, .. } = ingest_pgm(&oriented).unwrap()
        {
            assert_eq!(samples[0], 0.0); // lower-left first
            assert_eq!(samples[1], 1.0);
        } else {
            panic!();
        }
    }

    #[test]
    fn step_image_mean() {
        // 64x64, left half 0, right half 1
        let (h, w) = (64usize, 64usize);
        let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
        for _row in 0..h {
            for col in 0..w {
                bytes.push(if col < w / 2 { 0 } else { 255 });
            }
        }
        let field = ingest_pgm(&bytes).unwrap();
        let v = field.spectrum([0.0, 0.0]).unwrap();
        assert!((v.re - 0.5).abs() < 1e-12, "step mean {}", v.re);
    }

    #[test]
    fn conjugate_symmetry_spot_checks() {
        let dists = vec![
            AnalyticDistribution::Dirac { x0: [0.3, -0.2] },
            AnalyticDistribution::DiscIndicator {
                center: [0.5, 0.5],
                radius: 2.0,
            },
            truncated_cone(2.0, 0.5, 4.0).unwrap_or(AnalyticDistribution::Dirac { x0: [0.0, 0.0] }),
            AnalyticDistribution::BandlimitedBump {
                center: [0.0, 0.0],
                halfwidth: [1.0, 2.0],
                amplitude: 3.0,
                sharpness: 1.0,
            },
        ];
        for d in &dists {
            assert!(d.is_real());
            for &xi in &[[1.2, 0.4], [-0.3, 2.2], [5.0, -1.0]] {
                let a = d.spectrum(xi).unwrap();
                let b = d.spectrum([-xi[0], -xi[1]]).unwrap();
                assert!((a.conj() - b).norm() < 1e-12, "symmetry at {xi:?}");
            }
        }
    }
}
