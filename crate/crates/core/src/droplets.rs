//! Droplet geometry over a quasi-stable frame: polygons Λ(r), tubes,
//! segment decompositions and desk-scale length schedules.
//!
//! Radii are stored scaled: `R_i = r_i·λ_i`, so that membership is the exact
//! integer test `⟨x,u_i⟩ ≤ R_i` with the primitive vector `u_i`. Extending by
//! `l = t·λ_i` in direction `u_i` adds `t·⟨u_i,u_j⟩` to `R_j`, an integer.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::bootstrap::LineFrame;
use crate::error::{Error, Result};
use crate::family::{ClassificationReport, Difficulty, INFINITE};
use crate::lattice::{compare_clockwise, direction_metrics, Direction, DirectionMetrics, Site, Window};

/// The clockwise list u_0, …, u_{4k-1} of quasi-stable directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionFrame {
    pub directions: Vec<Direction>,
    pub metrics: Vec<DirectionMetrics>,
    pub difficulties: Vec<Difficulty>,
    /// α(u_i) > α
    pub hard: Vec<bool>,
    pub alpha: u64,
}

impl DirectionFrame {
    pub fn new(directions: Vec<Direction>, difficulties: Vec<Difficulty>, alpha: u64) -> Result<Self> {
        let n = directions.len();
        if n == 0 || n % 4 != 0 || difficulties.len() != n {
            return Err(Error::InvalidArgument(format!("a frame needs 4k directions, got {n}")));
        }
        let k = n / 4;
        for i in 0..n {
            let (a, b) = (directions[i], directions[(i + 1) % n]);
            if a.vector().cross(b.vector()) >= 0 {
                return Err(Error::InvalidArgument(format!("{a} and {b} are not in clockwise order")));
            }
            if directions[(i + k) % n] != a.rot_cw() {
                return Err(Error::InvalidArgument("frame is not closed under quarter turns".into()));
            }
        }
        // consecutive clockwise steps below a half turn could still wind twice
        for i in 1..n {
            if compare_clockwise(directions[i - 1], directions[i], directions[0]) != std::cmp::Ordering::Less {
                return Err(Error::InvalidArgument("frame winds more than once".into()));
            }
        }
        let hard = difficulties.iter().map(|d| d.lower() > alpha).collect();
        Ok(DirectionFrame {
            metrics: directions.iter().map(|&d| direction_metrics(d)).collect(),
            directions,
            difficulties,
            hard,
            alpha,
        })
    }

    /// Pure geometry: every direction treated as unstable.
    pub fn geometric(directions: Vec<Direction>) -> Result<Self> {
        let n = directions.len();
        DirectionFrame::new(directions, vec![Difficulty::Zero; n], 0)
    }

    /// West, north, east, south.
    pub fn axes() -> Self {
        DirectionFrame::geometric(vec![Direction::WEST, Direction::NORTH, Direction::EAST, Direction::SOUTH])
            .expect("axes form a frame")
    }

    /// The eight directions of the π/4 grid, starting west.
    pub fn octagonal() -> Self {
        let d = |x, y| Direction::new(x, y).unwrap();
        DirectionFrame::geometric(vec![d(-1, 0), d(-1, 1), d(0, 1), d(1, 1), d(1, 0), d(1, -1), d(0, -1), d(-1, -1)])
            .expect("octagon forms a frame")
    }

    pub fn from_report(directions: Vec<Direction>, report: &ClassificationReport) -> Result<Self> {
        let alpha =
            report.alpha.exact().ok_or_else(|| Error::Precondition("family difficulty is unresolved".into()))?;
        let diffs = directions.iter().map(|&d| report.difficulty_of(d)).collect();
        DirectionFrame::new(directions, diffs, alpha)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn k(&self) -> usize {
        self.directions.len() / 4
    }

    /// Index reduced modulo 4k.
    pub fn idx(&self, i: i64) -> usize {
        i.rem_euclid(self.len() as i64) as usize
    }

    pub fn u(&self, i: i64) -> Direction {
        self.directions[self.idx(i)]
    }

    pub fn index_of(&self, d: Direction) -> Option<usize> {
        self.directions.iter().position(|&u| u == d)
    }

    /// α(u_i), with `INFINITE` for infinity; unresolved entries give their lower bound.
    pub fn alpha_of(&self, i: usize) -> u64 {
        self.difficulties[i].lower()
    }

    pub fn is_finite(&self, i: usize) -> bool {
        self.alpha_of(i) != INFINITE
    }

    pub fn all_finite(&self) -> bool {
        (0..self.len()).all(|i| self.is_finite(i))
    }

    /// Is j in the open window (i−k, i+k)?
    pub fn in_window(&self, i: usize, j: usize) -> bool {
        let n = self.len() as i64;
        let off = (j as i64 - i as i64).rem_euclid(n);
        let k = self.k() as i64;
        off < k || off > n - k
    }

    /// Indices of the window (i−k, i+k), clockwise from i−k+1.
    pub fn window(&self, i: usize) -> Vec<usize> {
        let k = self.k() as i64;
        (-k + 1..k).map(|o| self.idx(i as i64 + o)).collect()
    }

    /// ⟨u_i, u_j⟩ for the primitive integer vectors.
    pub fn dot(&self, i: usize, j: usize) -> i64 {
        self.directions[i].vector().dot(self.directions[j].vector())
    }
}

/// Coefficients of v_i on the basis e_0, …, e_{4k-1}.
pub fn extension_vector(frame: &DirectionFrame, i: usize) -> Vec<f64> {
    (0..frame.len())
        .map(|j| {
            if frame.in_window(i, j) {
                frame.dot(i, j) as f64 / (frame.metrics[i].lambda * frame.metrics[j].lambda)
            } else {
                0.0
            }
        })
        .collect()
}

fn floor_rat(r: Rational64) -> i64 {
    r.floor().to_integer()
}

/// Λ(r) = ⋂ H̄_{u_i}(r_i).
#[derive(Debug, Clone)]
pub struct Droplet {
    frame: Arc<DirectionFrame>,
    radii: Vec<Rational64>,
    bounds: Vec<i64>,
}

impl PartialEq for Droplet {
    fn eq(&self, other: &Self) -> bool {
        self.radii == other.radii && self.frame.directions == other.frame.directions
    }
}

impl Droplet {
    /// From scaled radii R_i = r_i·λ_i. The lattice set must be nonempty.
    pub fn new(frame: Arc<DirectionFrame>, scaled: Vec<Rational64>) -> Result<Self> {
        if scaled.len() != frame.len() {
            return Err(Error::InvalidArgument(format!("{} radii for a frame of {}", scaled.len(), frame.len())));
        }
        let bounds = scaled.iter().map(|&r| floor_rat(r)).collect();
        let d = Droplet { frame, radii: scaled, bounds };
        if d.bounding_window().is_none() {
            return Err(Error::EmptyDroplet);
        }
        Ok(d)
    }

    pub fn from_integer_radii(frame: Arc<DirectionFrame>, scaled: &[i64]) -> Result<Self> {
        Droplet::new(frame, scaled.iter().map(|&r| Rational64::from_integer(r)).collect())
    }

    pub fn frame(&self) -> &Arc<DirectionFrame> {
        &self.frame
    }

    pub fn scaled_radii(&self) -> &[Rational64] {
        &self.radii
    }

    /// Euclidean radius r_i.
    pub fn radius(&self, i: usize) -> f64 {
        *self.radii[i].numer() as f64 / *self.radii[i].denom() as f64 / self.frame.metrics[i].lambda
    }

    /// Largest ⟨x,u_i⟩ allowed for lattice points.
    pub fn bound(&self, i: usize) -> i64 {
        self.bounds[i]
    }

    pub fn contains(&self, x: Site) -> bool {
        self.frame.directions.iter().zip(&self.bounds).all(|(u, &b)| u.dot(x) <= b)
    }

    /// Vertices of the real polygon with the lattice-tight bounds.
    fn vertices(&self) -> Vec<(f64, f64)> {
        let n = self.frame.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (self.frame.directions[i].vector(), self.frame.directions[j].vector());
                let det = a.cross(b) as f64;
                if det == 0.0 {
                    continue;
                }
                let (bi, bj) = (self.bounds[i] as f64, self.bounds[j] as f64);
                let x = (bi * b.y as f64 - bj * a.y as f64) / det;
                let y = (a.x as f64 * bj - b.x as f64 * bi) / det;
                let ok = self.frame.directions.iter().zip(&self.bounds).all(|(u, &bd)| {
                    let v = u.dx() as f64 * x + u.dy() as f64 * y;
                    v <= bd as f64 + 1e-7 * (1.0 + bd.abs() as f64)
                });
                if ok {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Smallest window holding every lattice point, or None when there are none.
    pub fn bounding_window(&self) -> Option<Window> {
        let v = self.vertices();
        if v.is_empty() {
            return None;
        }
        let fx = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| v.iter().map(sel).fold(init, f);
        let x0 = fx(f64::min, f64::INFINITY, |p| p.0).floor() as i64 - 1;
        let x1 = fx(f64::max, f64::NEG_INFINITY, |p| p.0).ceil() as i64 + 1;
        let y0 = fx(f64::min, f64::INFINITY, |p| p.1).floor() as i64 - 1;
        let y1 = fx(f64::max, f64::NEG_INFINITY, |p| p.1).ceil() as i64 + 1;
        let pts: Vec<Site> = Window::new(x0, x1, y0, y1).ok()?.sites().filter(|&s| self.contains(s)).collect();
        Window::bounding(pts)
    }

    /// Lattice points, row-major over the bounding window.
    pub fn points(&self) -> Vec<Site> {
        match self.bounding_window() {
            Some(w) => w.sites().filter(|&s| self.contains(s)).collect(),
            None => vec![],
        }
    }

    /// Euclidean length of the side with outer normal u_i, for the real radii.
    pub fn side_lengths(&self) -> Vec<f64> {
        let n = self.frame.len();
        let unit = |i: usize| {
            let u = self.frame.directions[i];
            let l = self.frame.metrics[i].lambda;
            (u.dx() as f64 / l, u.dy() as f64 / l)
        };
        let r: Vec<f64> = (0..n).map(|i| self.radius(i)).collect();
        (0..n)
            .map(|i| {
                let (ux, uy) = unit(i);
                let p0 = (r[i] * ux, r[i] * uy);
                let d = (uy, -ux);
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let (vx, vy) = unit(j);
                    let a = d.0 * vx + d.1 * vy;
                    let b = r[j] - (p0.0 * vx + p0.1 * vy);
                    if a.abs() < 1e-12 {
                        if b < -1e-9 {
                            return 0.0;
                        }
                    } else if a > 0.0 {
                        hi = hi.min(b / a);
                    } else {
                        lo = lo.max(b / a);
                    }
                }
                (hi - lo).max(0.0)
            })
            .collect()
    }

    /// Λ(r + l·v_i) with l = t·λ_i.
    pub fn extend(&self, i: usize, t: i64) -> Droplet {
        let mut radii = self.radii.clone();
        for j in self.frame.window(i) {
            radii[j] += Rational64::from_integer(t * self.frame.dot(i, j));
        }
        self.with_radii(radii)
    }

    /// x + Λ(r).
    pub fn translate(&self, x: Site) -> Droplet {
        let radii = self
            .radii
            .iter()
            .zip(&self.frame.directions)
            .map(|(&r, u)| r + Rational64::from_integer(u.dot(x)))
            .collect();
        self.with_radii(radii)
    }

    fn with_radii(&self, radii: Vec<Rational64>) -> Droplet {
        let bounds = radii.iter().map(|&r| floor_rat(r)).collect();
        Droplet { frame: self.frame.clone(), radii, bounds }
    }

    /// Lattice points of Λ(r) \ Λ(r − w·1).
    pub fn ring(&self, width: i64) -> Vec<Site> {
        let inner: Vec<i64> = (0..self.frame.len())
            .map(|i| {
                let r = self.radii[i];
                let lam = self.frame.metrics[i].lambda;
                let v = *r.numer() as f64 / *r.denom() as f64 - width as f64 * lam;
                if self.frame.directions[i].lambda_sq() == 1 {
                    floor_rat(r) - width
                } else {
                    v.floor() as i64
                }
            })
            .collect();
        self.points()
            .into_iter()
            .filter(|&x| !self.frame.directions.iter().zip(&inner).all(|(u, &b)| u.dot(x) <= b))
            .collect()
    }

    /// Doubled centre 2x when Λ(r) = x + Λ(r') with r'_i = r'_{i+2k} and 2x integral.
    pub fn symmetric_center(&self) -> Option<Site> {
        let n = self.frame.len();
        let k = self.frame.k();
        // ⟨2x,u_i⟩ = R_i − R_{i+2k}
        let diff = |i: usize| self.radii[i] - self.radii[(i + 2 * k) % n];
        if (0..n).any(|i| !diff(i).is_integer()) {
            return None;
        }
        let (u0, uk) = (self.frame.directions[0].vector(), self.frame.directions[k].vector());
        let lam2 = u0.norm_sq();
        let (a, b) = (diff(0).to_integer(), diff(k).to_integer());
        let num = u0 * a + uk * b;
        if num.x % lam2 != 0 || num.y % lam2 != 0 {
            return None;
        }
        let c = Site::new(num.x / lam2, num.y / lam2);
        (0..n).all(|i| self.frame.directions[i].dot(c) == diff(i).to_integer()).then_some(c)
    }
}

/// T(r, l, i) = Λ(r + l·v_i) \ Λ(r) with l = steps·λ_i.
#[derive(Debug, Clone, PartialEq)]
pub struct Tube {
    pub base: Droplet,
    pub direction: usize,
    pub steps: i64,
}

/// S_{j,m}: one lattice line perpendicular to u_j, sites ordered along u_{j+k}.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub direction: usize,
    /// ⟨x,u_j⟩ on the segment
    pub line: i64,
    /// m/λ_i at which the segment is taken
    pub m: Rational64,
    /// lateral coordinates along rot_cw(u_j), inclusive
    pub lateral: (i64, i64),
    pub sites: Vec<Site>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

impl Tube {
    pub fn new(base: Droplet, direction: usize, steps: i64) -> Result<Self> {
        if steps <= 0 {
            return Err(Error::InvalidArgument("tube length must be positive".into()));
        }
        if direction >= base.frame.len() {
            return Err(Error::InvalidArgument(format!("direction index {direction} out of range")));
        }
        Ok(Tube { base, direction, steps })
    }

    pub fn length(&self) -> f64 {
        self.steps as f64 * self.base.frame.metrics[self.direction].lambda
    }

    pub fn outer(&self) -> Droplet {
        self.base.extend(self.direction, self.steps)
    }

    pub fn translate(&self, x: Site) -> Tube {
        Tube { base: self.base.translate(x), direction: self.direction, steps: self.steps }
    }

    pub fn contains(&self, x: Site) -> bool {
        !self.base.contains(x) && self.outer().contains(x)
    }

    pub fn points(&self) -> Vec<Site> {
        self.outer().points().into_iter().filter(|&x| !self.base.contains(x)).collect()
    }

    /// Segments S_{j,m} ⊆ T for one j in (i−k, i+k).
    ///
    /// Each lattice line ⟨x,u_j⟩ = c met by the tube gives one segment,
    /// taken at the least m ≥ 0 for which the line lies in
    /// Λ(r + m v_i + ρ_j e_j) \ Λ(r + m v_i).
    pub fn segments(&self, j: usize) -> Result<Vec<Segment>> {
        let f = &self.base.frame;
        let i = self.direction;
        if j >= f.len() || !f.in_window(i, j) {
            return Err(Error::InvalidArgument(format!("segment direction {j} outside the window of {i}")));
        }
        let dij = f.dot(i, j);
        let rj = self.base.radii[j];
        let c_min = floor_rat(rj) + 1;
        let c_max = floor_rat(rj + Rational64::from_integer(self.steps * dij));
        let lf = LineFrame::new(f.directions[j]);
        let win = f.window(i);
        let mut out = Vec::new();
        for c in c_min..=c_max {
            let m = ((Rational64::from_integer(c - 1) - rj) / Rational64::from_integer(dij))
                .max(Rational64::from_integer(0));
            let (mut lo, mut hi) = (i64::MIN, i64::MAX);
            let mut empty = false;
            for l in 0..f.len() {
                if l == j {
                    continue;
                }
                let r = if win.contains(&l) {
                    self.base.radii[l] + m * Rational64::from_integer(f.dot(i, l))
                } else {
                    self.base.radii[l]
                };
                let b = floor_rat(r) - c * f.directions[l].dot(lf.w);
                let a = f.directions[l].dot(lf.p);
                match a.signum() {
                    1 => hi = hi.min(Integer::div_floor(&b, &a)),
                    -1 => lo = lo.max(Integer::div_ceil(&b, &a)),
                    _ => empty |= b < 0,
                }
            }
            if empty || lo > hi {
                continue;
            }
            let sites = (lo..=hi).map(|s| lf.to_global(Site::new(c, s))).collect();
            out.push(Segment { direction: j, line: c, m, lateral: (lo, hi), sites });
        }
        Ok(out)
    }

    /// Segments for every j in the window, in window order.
    pub fn all_segments(&self) -> Vec<Segment> {
        let f = &self.base.frame;
        f.window(self.direction).into_iter().flat_map(|j| self.segments(j).expect("window index")).collect()
    }
}

/// Optional replacements for the default desk constants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOverrides {
    pub w: Option<u64>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    /// no level length may exceed this
    pub max_length: Option<u64>,
    pub max_levels: Option<usize>,
}

/// Constants and length scales at desk scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSchedule {
    pub q: f64,
    pub alpha: u64,
    pub w: u64,
    pub c: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// ℓ^i = C² log(1/q) / q^α
    pub ell_i: f64,
    /// ℓ^m = q^{-C}
    pub ell_m: f64,
    pub ell_m_plus: f64,
    pub ell_m_minus: f64,
    /// min{n : W^n ≥ q^{-α}}
    pub n_c: usize,
    /// first n with ℓ^(n) ≥ ε·ℓ^i
    pub n_i: usize,
    /// ℓ^(0), ℓ^(1), … up to N^i or the cap
    pub levels: Vec<u64>,
    pub cap: u64,
    /// true when the cap cut the level list short
    pub capped: bool,
}

pub const DEFAULT_LENGTH_CAP: u64 = 1 << 20;

/// Level lengths ℓ^(n) = W^n up to N^c, then ⌈W^{exp(n−N^c)} / q^α⌉.
pub fn desk_schedule(q: f64, alpha: u64, min_w: u64, o: ScheduleOverrides) -> Result<ScaleSchedule> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} outside (0,1)")));
    }
    let w = o.w.unwrap_or(min_w.max(alpha + 1));
    if w < 2 {
        return Err(Error::InvalidArgument("W must be at least 2 for the level schedule".into()));
    }
    let c = o.c.unwrap_or(4.0 * w as f64);
    let delta = o.delta.unwrap_or(1.0 / (4.0 * c));
    let epsilon = o.epsilon.unwrap_or(delta / 4.0);
    if !(w as f64 <= c && c <= 1.0 / delta && 1.0 / delta <= 1.0 / epsilon) {
        return Err(Error::InvalidArgument("constants must satisfy W ≤ C ≤ 1/δ ≤ 1/ε".into()));
    }
    let cap = o.max_length.unwrap_or(DEFAULT_LENGTH_CAP);
    let a = alpha as f64;
    let inv_qa = q.powf(-a);
    let ell_i = c * c * (1.0 / q).ln() / q.powf(a);
    let ell_m = q.powf(-c);
    let wf = w as f64;
    let mut n_c = 0usize;
    let mut p = 1u128;
    while (p as f64) < inv_qa {
        p *= w as u128;
        n_c += 1;
    }
    let ell = |n: usize| -> f64 {
        if n <= n_c {
            wf.powi(n as i32)
        } else {
            (wf.powf(((n - n_c) as f64).exp()) * inv_qa).ceil()
        }
    };
    let target = epsilon * ell_i;
    let n_i = (n_c..).find(|&n| ell(n) >= target || !ell(n).is_finite()).unwrap();
    let max_levels = o.max_levels.unwrap_or(usize::MAX);
    let mut levels = Vec::new();
    let mut capped = false;
    for n in 0..=n_i.max(n_c) {
        let v = ell(n);
        if n >= max_levels || !v.is_finite() || v > cap as f64 {
            capped = true;
            break;
        }
        levels.push(v as u64);
    }
    Ok(ScaleSchedule {
        q,
        alpha,
        w,
        c,
        delta,
        epsilon,
        ell_i,
        ell_m,
        ell_m_plus: ell_m / delta.sqrt(),
        ell_m_minus: ell_m * delta.sqrt(),
        n_c,
        n_i,
        levels,
        cap,
        capped,
    })
}
