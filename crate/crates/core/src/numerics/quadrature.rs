use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Tighter tolerances used when an integral feeds a difference of
    /// nearly equal quantities.
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::invalid(format!("bad quadrature spec {self:?}")));
        }
        Ok(())
    }
}

// 15-point Kronrod abscissae (positive half, descending) with the embedded
// 7-point Gauss rule on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let value = k * half;
    let mut error = ((k - g) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        error = f64::INFINITY;
    }
    Segment { a, b, value, error }
}

/// Globally adaptive Gauss–Kronrod (7/15) on a finite interval: the segment
/// with the largest error estimate is halved until the summed estimate drops
/// below the tolerance.
fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec, budget: &mut usize) -> Result<(f64, f64)> {
    let first = kronrod(f, a, b);
    let mut heap = BinaryHeap::new();
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    let mut used = 0usize;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= tol {
            break;
        }
        if *budget == 0 {
            if error <= 10.0 * tol && error.is_finite() {
                // roundoff floor reached; accept within an order of magnitude
                break;
            }
            return Err(Error::NonConvergent {
                error,
                tolerance: tol,
                subdivisions: used,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Segment { error: 0.0, ..worst });
            error -= worst.error;
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let left = kronrod(f, worst.a, mid);
        let right = kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        *budget -= 1;
        used += 1;
        if used % 64 == 0 || !worst.error.is_finite() {
            // resum to shed accumulated cancellation in the running totals
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok((value, error))
}

/// Integrates `f` over `(lo, hi)`; either endpoint may be infinite.
///
/// A semi-infinite piece `[a, ∞)` is mapped to `[0, 1)` by `x = a + t/(1-t)`
/// (mirrored for `(-∞, b]`); a doubly infinite range is split at zero.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_breaks(f, lo, hi, &[], spec)
}

/// Like [`integrate`] but splits the range at the given interior points
/// first. Use it for integrands with kinks or jumps at known locations.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::invalid("NaN integration limit"));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return integrate_with_breaks(f, hi, lo, breaks, spec).map(|v| -v);
    }
    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    if lo.is_infinite() && hi.is_infinite() && points.is_empty() {
        points.push(0.0);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut edges = Vec::with_capacity(points.len() + 2);
    edges.push(lo);
    edges.extend(points);
    edges.push(hi);

    let pieces = edges.len() - 1;
    // split the tolerance across pieces
    let piece_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / pieces as f64,
        ..*spec
    };
    let mut budget = spec.max_subdivisions;
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (v, _) = match (a.is_infinite(), b.is_infinite()) {
            (false, false) => adapt(&f, a, b, &piece_spec, &mut budget)?,
            (false, true) => {
                let g = |t: f64| {
                    let s = 1.0 - t;
                    let v = f(a + t / s);
                    if v == 0.0 { 0.0 } else { v / (s * s) }
                };
                adapt(&g, 0.0, 1.0, &piece_spec, &mut budget)?
            }
            (true, false) => {
                let g = |t: f64| {
                    let s = 1.0 - t;
                    let v = f(b - t / s);
                    if v == 0.0 { 0.0 } else { v / (s * s) }
                };
                adapt(&g, 0.0, 1.0, &piece_spec, &mut budget)?
            }
            (true, true) => unreachable!("doubly infinite ranges are split above"),
        };
        total += v;
    }
    Ok(total)
}
