//! Small statistics toolkit: confidence intervals, exact oracles for run
//! events, goodness-of-fit tests and correlation inequalities on tiny windows.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Exact probability that n i.i.d. Bernoulli(q) sites contain a run of at
/// least w ones, by dynamic programming over the current run length.
pub fn w_run_probability(n: usize, w: usize, q: f64) -> f64 {
    if w == 0 {
        return 1.0;
    }
    // state[r] = P(no run yet, current run length r)
    let mut state = vec![0.0; w];
    state[0] = 1.0;
    let mut hit = 0.0;
    for _ in 0..n {
        let mut next = vec![0.0; w];
        for (r, &p) in state.iter().enumerate() {
            next[0] += p * (1.0 - q);
            if r + 1 == w {
                hit += p * q;
            } else {
                next[r + 1] += p * q;
            }
        }
        state = next;
    }
    hit
}

/// 1 − (1 − q^w)^{⌊n/w⌋}: disjoint blocks of w sites, one of them full.
pub fn w_run_lower_bound(n: usize, w: usize, q: f64) -> f64 {
    if w == 0 {
        return 1.0;
    }
    1.0 - (1.0 - q.powi(w as i32)).powi((n / w) as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of observed counts against cell probabilities.
/// Cells with zero probability must be empty.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("observed and expected lengths differ".into()));
    }
    let n: u64 = observed.iter().sum();
    let total_p: f64 = probs.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        let p = p / total_p;
        if p <= 0.0 {
            if o > 0 {
                return Ok(ChiSquareTest { statistic: f64::INFINITY, dof: 0, p_value: 0.0 });
            }
            continue;
        }
        let e = p * n as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dof = cells.saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(ChiSquareTest { statistic: stat, dof, p_value: 1.0 - dist.cdf(stat) })
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lam = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lam < 0.2 {
        return (d, 1.0);
    }
    // Kolmogorov tail Σ (-1)^{k-1} 2 e^{-2k²λ²}
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-2.0 * (k * k) as f64 * lam * lam).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BkCheck {
    pub p_a: f64,
    pub p_b: f64,
    pub p_disjoint: f64,
}

/// Exact P(A), P(B) and P(A∘B) over all configurations of `n` sites
/// (bit set = infected, probability q each) for events increasing in the
/// infected set. A∘B holds when the infected set splits into disjoint parts
/// witnessing A and B.
pub fn bk_exhaustive(n: u32, q: f64, a: impl Fn(u32) -> bool, b: impl Fn(u32) -> bool) -> Result<BkCheck> {
    if n > 16 {
        return Err(Error::InvalidArgument("exhaustive enumeration is limited to 16 sites".into()));
    }
    let (mut pa, mut pb, mut pd) = (0.0, 0.0, 0.0);
    for s in 0u32..1 << n {
        let k = s.count_ones() as i32;
        let w = q.powi(k) * (1.0 - q).powi(n as i32 - k);
        if a(s) {
            pa += w;
        }
        if b(s) {
            pb += w;
        }
        // enumerate submasks K of s: A on K and B on s \ K
        let mut sub = s;
        loop {
            if a(sub) && b(s & !sub) {
                pd += w;
                break;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & s;
        }
    }
    Ok(BkCheck { p_a: pa, p_b: pb, p_disjoint: pd })
}
