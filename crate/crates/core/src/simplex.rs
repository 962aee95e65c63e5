//! Maximisation over the probability simplex.
//!
//! Projected gradient ascent with Armijo backtracking, restarted from the
//! uniform point and from a fixed number of seeded random points. A
//! golden-section search covers the one-dimensional (binary alphabet) case.

use crate::sampler::{Sampler, Seed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Random starts in addition to the uniform start.
    pub restarts: usize,
    /// Stop once an accepted step improves the objective by less than this.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            tol: 1e-10,
            max_iter: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptimum {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Euclidean projection onto `{p ≥ 0, Σ p = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn ascend<F, G>(start: Vec<f64>, f: &F, grad: &G, opts: &SimplexOptions) -> SimplexOptimum
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    const ARMIJO: f64 = 1e-4;
    let mut x = start;
    let mut fx = f(&x);
    let mut step = 1.0;
    for _ in 0..opts.max_iter {
        let g = grad(&x);
        let mut accepted = None;
        let mut t = step;
        while t > 1e-16 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + t * gi).collect();
            let y = project_to_simplex(&trial);
            let fy = f(&y);
            let dir: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum();
            if fy.is_finite() && fy >= fx + ARMIJO * dir {
                accepted = Some((y, fy, t));
                break;
            }
            t *= 0.5;
        }
        let Some((y, fy, t)) = accepted else { break };
        let gain = fy - fx;
        x = y;
        fx = fy;
        step = (2.0 * t).min(1e6);
        if gain < opts.tol {
            break;
        }
    }
    SimplexOptimum { point: x, value: fx }
}

/// Maximises `f` over the simplex in `n` letters; returns the best point
/// over all starts (ties keep the earliest start).
pub fn maximize<F, G>(n: usize, f: F, grad: G, opts: &SimplexOptions) -> SimplexOptimum
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut best = ascend(vec![1.0 / n as f64; n], &f, &grad, opts);
    if n == 1 {
        return best;
    }
    for r in 0..opts.restarts {
        let start = Sampler::new(Seed::new(opts.seed, r as u64)).probability(n).into_vec();
        let cand = ascend(start, &f, &grad, opts);
        if cand.value > best.value {
            best = cand;
        }
    }
    if n == 2 {
        let (p, v) = golden_section_max(|p| f(&[p, 1.0 - p]), 0.0, 1.0, 1e-12);
        if v > best.value {
            best = SimplexOptimum {
                point: vec![p, 1.0 - p],
                value: v,
            };
        }
    }
    best
}

/// Golden-section search for the maximum of a unimodal function on
/// `[lo, hi]`; the endpoints are also compared so boundary maxima are found.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projection_examples() {
        assert_eq!(project_to_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        let p = project_to_simplex(&[2.0, 0.0]);
        assert_abs_diff_eq!(p[0], 1.0);
        assert_abs_diff_eq!(p[1], 0.0);
        let p = project_to_simplex(&[0.5, 0.5, 0.5]);
        for x in p {
            assert_abs_diff_eq!(x, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn maximises_concave_quadratic() {
        // max −|p − c|² with c inside the simplex
        let c = [0.2, 0.5, 0.3];
        let opt = maximize(
            3,
            |p| -p.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
            |p| p.iter().zip(&c).map(|(a, b)| -2.0 * (a - b)).collect(),
            &SimplexOptions::default(),
        );
        for (a, b) in opt.point.iter().zip(&c) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-5);
        }
    }

    #[test]
    fn boundary_optimum() {
        let opt = maximize(3, |p| p[2], |_| vec![0.0, 0.0, 1.0], &SimplexOptions::default());
        assert_abs_diff_eq!(opt.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_section_examples() {
        let (x, v) = golden_section_max(|x| -(x - 0.3f64).powi(2), 0.0, 1.0, 1e-12);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-6);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(x, 1.0);
    }
}
