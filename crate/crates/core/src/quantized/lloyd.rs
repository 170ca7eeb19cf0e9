use super::Partition;
use crate::distributions::Distribution;
use crate::{Error, Result};

/// Stop once no level moves by more than this.
pub const LLOYD_MAX_TOL: f64 = 1e-10;
pub const LLOYD_MAX_ITERATIONS: usize = 10_000;

/// Minimum-distortion scalar quantizer of a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydMax {
    pub partition: Partition,
    pub levels: Vec<f64>,
    /// Mean squared quantization error after each centroid update.
    pub distortion_history: Vec<f64>,
    pub iterations: usize,
}

impl LloydMax {
    pub fn distortion(&self) -> f64 {
        *self.distortion_history.last().expect("at least one iteration")
    }
}

fn midpoints(levels: &[f64]) -> Vec<f64> {
    levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

// centroids of the cells bounded by `t`, plus the distortion they achieve
fn centroids(law: &Distribution, t: &[f64], previous: &[f64]) -> (Vec<f64>, f64) {
    let n = t.len() + 1;
    let mut levels = Vec::with_capacity(n);
    let mut explained = 0.0;
    for i in 0..n {
        let lo = if i == 0 { f64::NEG_INFINITY } else { t[i - 1] };
        let hi = if i == n - 1 { f64::INFINITY } else { t[i] };
        let p = law.interval_prob(lo, hi);
        if p > 0.0 {
            let c = law.partial_first_moment(lo, hi) / p;
            explained += p * c * c;
            levels.push(c);
        } else {
            levels.push(previous[i]);
        }
    }
    let mean = law.mean();
    (levels, law.variance() + mean * mean - explained)
}

// Lloyd steps taken before switching to Newton on the same fixed point
const LLOYD_STEPS_BEFORE_NEWTON: usize = 500;

// t_j - (c_j + c_{j+1})/2 for every threshold
fn residual(t: &[f64], c: &[f64]) -> Vec<f64> {
    t.iter().enumerate().map(|(j, &tj)| tj - 0.5 * (c[j] + c[j + 1])).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// One Newton step on the threshold fixed point, with backtracking so that
// neither the residual nor the distortion grows. None when no step helps.
fn newton_step(law: &Distribution, t: &[f64], c: &[f64], distortion: f64) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let m = t.len();
    let n = m + 1;
    let bound = |i: usize| -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { t[i - 1] };
        let hi = if i == n - 1 { f64::INFINITY } else { t[i] };
        (lo, hi)
    };
    let p: Vec<f64> = (0..n).map(|i| {
        let (lo, hi) = bound(i);
        law.interval_prob(lo, hi)
    })
    .collect();
    if p.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let f: Vec<f64> = t.iter().map(|&x| law.pdf(x)).collect();
    let r = residual(t, c);
    // tridiagonal Jacobian: sub[j] = dr_j/dt_{j-1}, diag[j], sup[j] = dr_j/dt_{j+1}
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    for j in 0..m {
        diag[j] = 1.0 - 0.5 * f[j] * ((t[j] - c[j]) / p[j] + (c[j + 1] - t[j]) / p[j + 1]);
        if j > 0 {
            sub[j] = -0.5 * f[j - 1] * (c[j] - t[j - 1]) / p[j];
        }
        if j + 1 < m {
            sup[j] = -0.5 * f[j + 1] * (t[j + 1] - c[j + 1]) / p[j + 1];
        }
    }
    // Thomas algorithm for J d = -r
    let mut cp = vec![0.0; m];
    let mut dp = vec![0.0; m];
    for j in 0..m {
        let den = diag[j] - if j > 0 { sub[j] * cp[j - 1] } else { 0.0 };
        if den == 0.0 || !den.is_finite() {
            return None;
        }
        cp[j] = sup[j] / den;
        dp[j] = (-r[j] - if j > 0 { sub[j] * dp[j - 1] } else { 0.0 }) / den;
    }
    let mut d = vec![0.0; m];
    for j in (0..m).rev() {
        d[j] = dp[j] - if j + 1 < m { cp[j] * d[j + 1] } else { 0.0 };
    }
    let r0 = norm(&r);
    let mut step = 1.0;
    while step > 1e-6 {
        let trial: Vec<f64> = t.iter().zip(&d).map(|(a, b)| a + step * b).collect();
        if trial.windows(2).all(|w| w[0] < w[1]) {
            let (levels, dist) = centroids(law, &trial, c);
            if norm(&residual(&trial, &levels)) < r0 && dist <= distortion + 1e-15 * distortion.abs() {
                return Some((trial, levels, dist));
            }
        }
        step *= 0.5;
    }
    None
}

/// Alternates nearest-level thresholds and centroid levels, starting from
/// levels at the quantiles `i/(N+1)`. Large quantizers converge slowly under
/// plain alternation, so after a few hundred rounds the same fixed point is
/// polished by Newton steps that never increase the distortion.
pub fn lloyd_max(law: &Distribution, cells: usize) -> Result<LloydMax> {
    if cells == 0 {
        return Err(Error::invalid("a quantizer needs at least one cell"));
    }
    let mut levels = (1..=cells)
        .map(|i| law.quantile(i as f64 / (cells + 1) as f64))
        .collect::<Result<Vec<_>>>()?;
    let mut t = midpoints(&levels);
    let mut history = Vec::new();
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < LLOYD_MAX_ITERATIONS {
        iterations += 1;
        let polished = if iterations > LLOYD_STEPS_BEFORE_NEWTON {
            newton_step(law, &t, &levels, *history.last().unwrap_or(&f64::INFINITY))
        } else {
            None
        };
        let (next_t, next, distortion) = match polished {
            Some(v) => v,
            None => {
                let nt = midpoints(&levels);
                let (nl, d) = centroids(law, &nt, &levels);
                (nt, nl, d)
            }
        };
        change = next.iter().zip(&levels).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        levels = next;
        t = next_t;
        history.push(distortion);
        if change < LLOYD_MAX_TOL {
            break;
        }
    }
    if change > 1e-6 {
        return Err(Error::IterationLimit(format!(
            "Lloyd-Max with {cells} cells still moving by {change:e} after {iterations} iterations"
        )));
    }
    let partition = Partition::new(midpoints(&levels))?;
    Ok(LloydMax {
        partition,
        levels,
        distortion_history: history,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{GaussianLaw, LaplaceLaw};

    fn laplace() -> Distribution {
        LaplaceLaw::new(1.0).unwrap().into()
    }

    #[test]
    fn one_and_two_cells() {
        let q = lloyd_max(&laplace(), 1).unwrap();
        assert_eq!(q.levels, vec![0.0]);
        let q = lloyd_max(&laplace(), 2).unwrap();
        assert!(q.partition.thresholds()[0].abs() < 1e-12);
        assert!((q.levels[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        assert!((q.levels[0] + q.levels[1]).abs() < 1e-12);
    }

    #[test]
    fn distortion_never_increases() {
        for n in [3, 8, 17, 65] {
            let q = lloyd_max(&laplace(), n).unwrap();
            assert!(q.distortion_history.windows(2).all(|w| w[1] <= w[0] + 1e-14), "{n}");
        }
    }

    #[test]
    fn gaussian_four_levels() {
        // classic table values for the unit Gaussian: thresholds 0, ±0.9816; levels ±0.4528, ±1.510
        let q = lloyd_max(&GaussianLaw::new(1.0).unwrap().into(), 4).unwrap();
        assert!((q.partition.thresholds()[2] - 0.9816).abs() < 1e-4);
        assert!((q.levels[3] - 1.510).abs() < 1e-3);
        assert!((q.levels[2] - 0.4528).abs() < 1e-4);
    }

    // optimal contiguous clustering of a fine grid, by dynamic programming
    fn grid_dp_distortion(law: &Distribution, cells: usize) -> f64 {
        let (lo, hi, m) = (-16.0, 16.0, 3200);
        let h = (hi - lo) / m as f64;
        let xs: Vec<f64> = (0..m).map(|i| lo + (i as f64 + 0.5) * h).collect();
        let mut s0 = vec![0.0; m + 1];
        let mut s1 = vec![0.0; m + 1];
        let mut s2 = vec![0.0; m + 1];
        for (i, &x) in xs.iter().enumerate() {
            let w = law.interval_prob(x - 0.5 * h, x + 0.5 * h);
            s0[i + 1] = s0[i] + w;
            s1[i + 1] = s1[i] + w * x;
            s2[i + 1] = s2[i] + w * x * x;
        }
        let cost = |a: usize, b: usize| {
            let w = s0[b] - s0[a];
            if w <= 0.0 {
                0.0
            } else {
                let m1 = s1[b] - s1[a];
                s2[b] - s2[a] - m1 * m1 / w
            }
        };
        let mut best = vec![f64::INFINITY; m + 1];
        for b in 1..=m {
            best[b] = cost(0, b);
        }
        for _ in 1..cells {
            let mut next = vec![f64::INFINITY; m + 1];
            for b in 1..=m {
                for a in 1..b {
                    let v = best[a] + cost(a, b);
                    if v < next[b] {
                        next[b] = v;
                    }
                }
            }
            best = next;
        }
        best[m]
    }

    #[test]
    fn eight_cells_match_grid_dp() {
        let law = laplace();
        let q = lloyd_max(&law, 8).unwrap();
        let dp = grid_dp_distortion(&law, 8);
        assert!((q.distortion() - dp).abs() < 1e-4, "{} {}", q.distortion(), dp);
    }

    #[test]
    fn large_quantizers_converge() {
        for n in [65, 127] {
            let q = lloyd_max(&laplace(), n).unwrap();
            assert_eq!(q.partition.cells(), n);
            assert!(q.iterations < LLOYD_MAX_ITERATIONS);
            assert!(q.distortion_history.windows(2).all(|w| w[1] <= w[0] + 1e-14));
            // fixed point: thresholds halfway between levels, levels at centroids
            let law = laplace();
            for i in 0..n {
                let (lo, hi) = q.partition.bounds(i);
                assert!((law.conditional_mean(lo, hi) - q.levels[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_cells_rejected() {
        assert!(lloyd_max(&laplace(), 0).is_err());
    }
}
