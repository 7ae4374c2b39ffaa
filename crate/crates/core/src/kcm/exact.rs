use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::family::UpdateFamily;
use crate::lattice::{BoundaryCondition, Site, Window};

use super::network::Network;

const MAX_SITES: usize = 20;
const DENSE_LIMIT: usize = 1024;
const TOL: f64 = 1e-10;

/// The full Markov chain of the dynamics on a tiny window, states encoded as
/// bitmasks over window indices (bit set = infected).
#[derive(Debug, Clone)]
pub struct ExactSystem {
    net: Network,
    pub boundary: BoundaryCondition,
    pub q: f64,
}

impl ExactSystem {
    pub fn new(family: &UpdateFamily, window: Window, boundary: BoundaryCondition, q: f64) -> Result<Self> {
        if window.len() > MAX_SITES {
            return Err(Error::InvalidArgument(format!(
                "{} sites exceed the exact limit of {MAX_SITES}",
                window.len()
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidArgument(format!("q = {q} outside (0,1)")));
        }
        let net = Network::new(family, window, &boundary)?;
        Ok(ExactSystem { net, boundary, q })
    }

    /// East chain on sites 0..n of the x axis, driven by an infected left boundary.
    pub fn east_chain(n: usize, q: f64) -> Result<Self> {
        let w = Window::new(0, n as i64 - 1, 0, 0)?;
        ExactSystem::new(&crate::family::zoo::east_chain(), w, BoundaryCondition::AllInfected, q)
    }

    pub fn window(&self) -> &Window {
        self.net.window()
    }

    pub fn sites(&self) -> usize {
        self.net.len()
    }

    pub fn states(&self) -> usize {
        1 << self.sites()
    }

    pub fn site_bit(&self, s: Site) -> Result<usize> {
        self.window().index(s).ok_or_else(|| Error::InvalidArgument(format!("site {s} outside the system")))
    }

    /// Product Bernoulli(q) weight of a state.
    pub fn mu(&self, state: usize) -> f64 {
        let k = state.count_ones() as i32;
        self.q.powi(k) * (1.0 - self.q).powi(self.sites() as i32 - k)
    }

    /// Off-diagonal generator entries out of `state`: a constrained site
    /// becomes infected at rate q and healthy at rate 1 − q.
    pub fn transitions(&self, state: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.sites()).filter(move |&i| self.net.constraint_mask(state as u64, i)).map(move |i| {
            let next = state ^ (1 << i);
            let rate = if state >> i & 1 == 1 { 1.0 - self.q } else { self.q };
            (next, rate)
        })
    }

    pub fn exit_rate(&self, state: usize) -> f64 {
        self.transitions(state).map(|(_, r)| r).sum()
    }

    /// Largest |row sum| of the assembled generator.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.states())
            .map(|s| {
                let off: f64 = self.transitions(s).map(|(_, r)| r).sum();
                (off - self.exit_rate(s)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// States communicating with `start`. Every move flips one site whose
    /// constraint does not read that site, so moves are reversible and the
    /// transition graph is undirected.
    pub fn component(&self, start: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.states()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in start {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for (n, _) in self.transitions(s) {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Expected hitting time of {target infected} from every state.
    pub fn hitting_times(&self, target: Site) -> Result<Vec<f64>> {
        let bit = self.site_bit(target)?;
        let n = self.states();
        let targets: Vec<usize> = (0..n).filter(|s| s >> bit & 1 == 1).collect();
        let reach = self.component(&targets);
        let stuck = reach.iter().filter(|&&r| !r).count();
        if stuck > 0 {
            return Err(Error::Unreachable(stuck));
        }
        // unknowns: states with the target healthy
        let free: Vec<usize> = (0..n).filter(|s| s >> bit & 1 == 0).collect();
        let mut slot = vec![usize::MAX; n];
        for (k, &s) in free.iter().enumerate() {
            slot[s] = k;
        }
        let h_free = if free.len() <= DENSE_LIMIT {
            let m = free.len();
            let mut a = vec![0.0; m * m];
            let b = vec![1.0; m];
            for (r, &s) in free.iter().enumerate() {
                for (t, rate) in self.transitions(s) {
                    a[r * m + r] += rate;
                    if slot[t] != usize::MAX {
                        a[r * m + slot[t]] -= rate;
                    }
                }
            }
            solve_dense(a, b, m)?
        } else {
            self.gauss_seidel(&free, &slot)?
        };
        let mut h = vec![0.0; n];
        for (k, &s) in free.iter().enumerate() {
            h[s] = h_free[k];
        }
        Ok(h)
    }

    fn gauss_seidel(&self, free: &[usize], slot: &[usize]) -> Result<Vec<f64>> {
        let rows: Vec<Vec<(usize, f64)>> = free.iter().map(|&s| self.transitions(s).collect()).collect();
        let mut h = vec![0.0; free.len()];
        for _ in 0..200_000 {
            for (k, row) in rows.iter().enumerate() {
                let (mut num, mut den) = (1.0, 0.0);
                for &(t, r) in row {
                    den += r;
                    if slot[t] != usize::MAX {
                        num += r * h[slot[t]];
                    }
                }
                h[k] = num / den;
            }
            let mut res: f64 = 0.0;
            for (k, row) in rows.iter().enumerate() {
                let mut acc = 1.0;
                for &(t, r) in row {
                    let ht = if slot[t] != usize::MAX { h[slot[t]] } else { 0.0 };
                    acc += r * (ht - h[k]);
                }
                res = res.max(acc.abs());
            }
            if res < TOL {
                return Ok(h);
            }
            if !res.is_finite() {
                break;
            }
        }
        Err(Error::Solver("Gauss-Seidel did not reach the residual tolerance".into()))
    }

    /// E_μ[τ] for the first infection of `target` from the product law.
    pub fn exact_tau0(&self, target: Site) -> Result<f64> {
        let h = self.hitting_times(target)?;
        Ok(h.iter().enumerate().map(|(s, &v)| self.mu(s) * v).sum())
    }

    /// Law at time t from `p0` by uniformization: with Λ ≥ every exit rate,
    /// e^{tL} = Σ_k Pois(k; Λt) P^k where P = I + L/Λ.
    pub fn distribution_at(&self, p0: &[f64], t: f64) -> Result<Vec<f64>> {
        let n = self.states();
        if p0.len() != n {
            return Err(Error::InvalidArgument("initial law has the wrong length".into()));
        }
        let lam = (0..n).map(|s| self.exit_rate(s)).fold(0.0, f64::max);
        if lam == 0.0 || t == 0.0 {
            return Ok(p0.to_vec());
        }
        let rows: Vec<Vec<(usize, f64)>> = (0..n).map(|s| self.transitions(s).collect()).collect();
        // keep each chunk's Poisson mean small enough that e^{-Λt} is representable
        let chunks = (lam * t / 200.0).ceil().max(1.0) as usize;
        let dt = t / chunks as f64;
        let mut p = p0.to_vec();
        for _ in 0..chunks {
            let mut term = p.clone();
            let mut weight = (-lam * dt).exp();
            let mut acc: Vec<f64> = term.iter().map(|x| x * weight).collect();
            let mut mass = weight;
            let mut k = 0usize;
            while 1.0 - mass > 1e-15 && k < 10_000 {
                k += 1;
                let mut next = vec![0.0; n];
                for (s, row) in rows.iter().enumerate() {
                    let mut stay = term[s];
                    for &(d, r) in row {
                        next[d] += term[s] * r / lam;
                        stay -= term[s] * r / lam;
                    }
                    next[s] += stay;
                }
                term = next;
                weight *= lam * dt / k as f64;
                mass += weight;
                for (a, x) in acc.iter_mut().zip(&term) {
                    *a += weight * x;
                }
            }
            p = acc;
        }
        Ok(p)
    }

    /// Stationary law of the chain restricted to the class of `start`,
    /// solved from πL = 0 with Σπ = 1. Returns (class members, π).
    pub fn stationary_on_class(&self, start: usize) -> Result<(Vec<usize>, Vec<f64>)> {
        let seen = self.component(&[start]);
        let class: Vec<usize> = (0..self.states()).filter(|&s| seen[s]).collect();
        let m = class.len();
        if m > DENSE_LIMIT {
            return Err(Error::InvalidArgument(format!("class of {m} states is too large for a dense solve")));
        }
        let mut slot = vec![usize::MAX; self.states()];
        for (k, &s) in class.iter().enumerate() {
            slot[s] = k;
        }
        // rows of Lᵀ, last equation replaced by normalisation
        let mut a = vec![0.0; m * m];
        for (c, &s) in class.iter().enumerate() {
            for (t, r) in self.transitions(s) {
                a[slot[t] * m + c] += r;
                a[c * m + c] -= r;
            }
        }
        for c in 0..m {
            a[(m - 1) * m + c] = 1.0;
        }
        let mut b = vec![0.0; m];
        b[m - 1] = 1.0;
        let pi = solve_dense(a, b, m)?;
        Ok((class, pi))
    }

    /// max |(πL)(η)| over the class.
    pub fn balance_residual(&self, class: &[usize], pi: &[f64]) -> f64 {
        let mut flow = vec![0.0; self.states()];
        for (k, &s) in class.iter().enumerate() {
            for (t, r) in self.transitions(s) {
                flow[t] += pi[k] * r;
                flow[s] -= pi[k] * r;
            }
        }
        flow.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Gaussian elimination with partial pivoting on a row-major m×m matrix.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, m: usize) -> Result<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(1.0);
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs())).unwrap();
        if a[piv * m + col].abs() < 1e-13 * scale {
            return Err(Error::Solver("singular system".into()));
        }
        if piv != col {
            for c in 0..m {
                a.swap(piv * m + c, col * m + c);
            }
            b.swap(piv, col);
        }
        let d = a[col * m + col];
        for r in col + 1..m {
            let f = a[r * m + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..m {
                a[r * m + c] -= f * a[col * m + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let mut s = b[r];
        for c in r + 1..m {
            s -= a[r * m + c] * x[c];
        }
        x[r] = s / a[r * m + r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::zoo;

    #[test]
    fn single_site_closed_form() {
        let s = ExactSystem::east_chain(1, 0.3).unwrap();
        assert!((s.exact_tau0(Site::ORIGIN).unwrap() - 7.0 / 3.0).abs() < 1e-10);
        let s = ExactSystem::east_chain(1, 0.5).unwrap();
        assert!((s.exact_tau0(Site::ORIGIN).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_site_east_by_hand() {
        // target = site 1, site 0 always free. From (0,0): rate q to (1,0).
        // From (1,0): rate 1−q back, rate q to hit. h10 = (1 + (1−q) h00)/1,
        // h00 = 1/q + h10, so h00 = (1/q + 1)/q and h10 = h00 − 1/q.
        let q = 0.4;
        let s = ExactSystem::east_chain(2, q).unwrap();
        let h = s.hitting_times(Site::new(1, 0)).unwrap();
        let h00 = (1.0 / q + 1.0) / q;
        assert!((h[0] - h00).abs() < 1e-10);
        assert!((h[1] - (h00 - 1.0 / q)).abs() < 1e-10);
        assert_eq!(h[2], 0.0);
    }

    #[test]
    fn solvers_agree() {
        // 12 sites put the unknowns above the dense limit
        let big = ExactSystem::east_chain(12, 0.5).unwrap();
        let small = ExactSystem::east_chain(10, 0.5).unwrap();
        let t = Site::new(4, 0);
        let a = big.exact_tau0(t).unwrap();
        let b = small.exact_tau0(t).unwrap();
        // sites to the right of the target do not influence it
        assert!((a - b).abs() < 1e-8 * a, "{a} vs {b}");
    }

    #[test]
    fn unreachable_target_is_reported() {
        let w = Window::new(0, 1, 0, 0).unwrap();
        let s = ExactSystem::new(&zoo::east_chain(), w, BoundaryCondition::AllHealthy, 0.3).unwrap();
        assert!(matches!(s.exact_tau0(Site::new(1, 0)), Err(Error::Unreachable(_))));
    }

    #[test]
    fn generator_and_stationarity() {
        let s = ExactSystem::east_chain(3, 0.3).unwrap();
        assert!(s.max_row_sum() < 1e-15);
        let (class, pi) = s.stationary_on_class(0).unwrap();
        assert_eq!(class.len(), 8);
        for (k, &st) in class.iter().enumerate() {
            assert!((pi[k] - s.mu(st)).abs() < 1e-10);
        }
        assert!(s.balance_residual(&class, &pi) < 1e-10);
        let p0: Vec<f64> = (0..8).map(|st| s.mu(st)).collect();
        let pt = s.distribution_at(&p0, 3.0).unwrap();
        for (a, b) in p0.iter().zip(&pt) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut e0 = vec![0.0; 8];
        e0[0] = 1.0;
        let far = s.distribution_at(&e0, 400.0).unwrap();
        for (a, b) in p0.iter().zip(&far) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
