//! U-bootstrap percolation: closures, certified infinite growth from a
//! half-plane, helping-set generators and the W-run threshold.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{is_unstable, UpdateFamily};
use crate::lattice::{BoundaryCondition, Configuration, Direction, Offset, Site, Window};

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureResult {
    pub final_config: Configuration,
    /// in order of infection: round by round, row-major (y, then x) within a round
    pub newly_infected: Vec<Site>,
    pub rounds: usize,
}

/// Padded grid on which closures run. The padding holds the boundary
/// condition (or torus ghost copies) so that rule lookups never branch.
#[derive(Debug, Clone)]
pub(crate) struct Engine {
    window: Window,
    pad: i64,
    pw: i64,
    ph: i64,
    cells: Vec<bool>,
    /// padded index -> padded index of the window cell it represents (usize::MAX if fixed)
    canon: Vec<usize>,
    rules: Vec<Vec<isize>>,
    deps: Vec<isize>,
    torus: bool,
}

impl Engine {
    pub(crate) fn new(family: &UpdateFamily, config: &Configuration) -> Result<Self> {
        let pad = family.range().max(1);
        let window = *config.window();
        let torus = *config.boundary() == BoundaryCondition::Torus;
        if let Some(r) = config.boundary().collar_radius() {
            if r < family.range() {
                return Err(Error::Precondition(format!(
                    "explicit collar radius {r} is below the family range {}",
                    family.range()
                )));
            }
        }
        let pw = window.width() as i64 + 2 * pad;
        let ph = window.height() as i64 + 2 * pad;
        let n = (pw * ph) as usize;
        let mut e = Engine {
            window,
            pad,
            pw,
            ph,
            cells: vec![false; n],
            canon: vec![usize::MAX; n],
            rules: vec![],
            deps: vec![],
            torus,
        };
        e.rules = family.rules.iter().map(|r| r.iter().map(|v| (v.y * pw + v.x) as isize).collect()).collect();
        e.deps = family.vectors().map(|v| -(v.y * pw + v.x) as isize).collect();
        for p in 0..n {
            let s = e.site(p);
            if window.contains(s) {
                e.canon[p] = p;
                e.cells[p] = config.get(s)?;
            } else if torus {
                let c = e.pidx(window.wrap(s));
                e.canon[p] = c;
                e.cells[p] = config.get(s)?;
            } else {
                e.cells[p] = config.boundary().outside(&window, s)?;
            }
        }
        Ok(e)
    }

    pub(crate) fn pidx(&self, s: Site) -> usize {
        ((s.y - self.window.y_min + self.pad) * self.pw + (s.x - self.window.x_min + self.pad)) as usize
    }

    pub(crate) fn site(&self, p: usize) -> Site {
        let p = p as i64;
        Site::new(p % self.pw - self.pad + self.window.x_min, p / self.pw - self.pad + self.window.y_min)
    }

    pub(crate) fn get(&self, s: Site) -> bool {
        self.cells[self.pidx(s)]
    }

    fn satisfied(&self, p: usize) -> bool {
        self.rules.iter().any(|r| r.iter().all(|&o| self.cells[(p as isize + o) as usize]))
    }

    /// Set a window cell (and its torus ghosts).
    pub(crate) fn set(&mut self, p: usize, v: bool) {
        self.cells[p] = v;
        if self.torus {
            let s = self.site(p);
            let (w, h) = (self.window.width() as i64, self.window.height() as i64);
            let kx = self.pad / w + 1;
            let ky = self.pad / h + 1;
            for i in -kx..=kx {
                for j in -ky..=ky {
                    let g = Site::new(s.x + i * w, s.y + j * h);
                    let (gx, gy) = (g.x - self.window.x_min + self.pad, g.y - self.window.y_min + self.pad);
                    if (i, j) != (0, 0) && gx >= 0 && gx < self.pw && gy >= 0 && gy < self.ph {
                        let q = (gy * self.pw + gx) as usize;
                        self.cells[q] = v;
                    }
                }
            }
        }
    }

    fn push_dependents(&self, p: usize, out: &mut Vec<usize>) {
        if self.torus {
            // dependents of every ghost copy as well
            let s = self.site(p);
            let (w, h) = (self.window.width() as i64, self.window.height() as i64);
            let kx = self.pad / w + 1;
            let ky = self.pad / h + 1;
            for i in -kx..=kx {
                for j in -ky..=ky {
                    let g = Site::new(s.x + i * w, s.y + j * h);
                    let (gx, gy) = (g.x - self.window.x_min + self.pad, g.y - self.window.y_min + self.pad);
                    if gx < 0 || gx >= self.pw || gy < 0 || gy >= self.ph {
                        continue;
                    }
                    let q = (gy * self.pw + gx) as isize;
                    for &o in &self.deps {
                        let x = q + o;
                        if x >= 0 && (x as usize) < self.cells.len() {
                            let c = self.canon[x as usize];
                            if c != usize::MAX && !self.cells[c] {
                                out.push(c);
                            }
                        }
                    }
                }
            }
        } else {
            for &o in &self.deps {
                let x = (p as isize + o) as usize;
                if self.canon[x] == x && !self.cells[x] {
                    out.push(x);
                }
            }
        }
    }

    /// Run synchronous rounds starting from the given candidates. Every site
    /// whose constraint could have become satisfied must be among them.
    pub(crate) fn run(&mut self, mut cand: Vec<usize>, newly: &mut Vec<usize>) -> usize {
        let mut rounds = 0;
        let mut fire = Vec::new();
        loop {
            cand.sort_unstable();
            cand.dedup();
            fire.clear();
            fire.extend(cand.iter().copied().filter(|&p| !self.cells[p] && self.satisfied(p)));
            if fire.is_empty() {
                return rounds;
            }
            rounds += 1;
            for &p in &fire {
                self.set(p, true);
            }
            newly.extend_from_slice(&fire);
            cand.clear();
            for &p in &fire {
                self.push_dependents(p, &mut cand);
            }
        }
    }

    pub(crate) fn window_cells(&self) -> Vec<usize> {
        self.window.sites().map(|s| self.pidx(s)).collect()
    }

    fn to_configuration(&self, boundary: BoundaryCondition) -> Configuration {
        let cells = self.window.sites().map(|s| self.get(s)).collect();
        Configuration::from_cells(self.window, cells, boundary).expect("sizes agree")
    }
}

/// The closure [A]_U of the infected set of `config`, restricted to its window.
pub fn closure(family: &UpdateFamily, config: &Configuration) -> Result<ClosureResult> {
    let mut e = Engine::new(family, config)?;
    let cand = e.window_cells();
    let mut newly = Vec::new();
    let rounds = e.run(cand, &mut newly);
    Ok(ClosureResult {
        final_config: e.to_configuration(config.boundary().clone()),
        newly_infected: newly.into_iter().map(|p| e.site(p)).collect(),
        rounds,
    })
}

/// Coordinates adapted to a direction u: depth d = ⟨x,u⟩ and lateral
/// position t along P = rot_cw(u), via the unimodular basis (w, P) with
/// ⟨w,u⟩ = 1. In these coordinates H_u is {d < 0}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineFrame {
    pub u: Direction,
    pub w: Site,
    pub p: Site,
}

impl LineFrame {
    pub fn new(u: Direction) -> Self {
        let (a, b) = (u.dx(), u.dy());
        let g = a.extended_gcd(&b);
        let sign = g.gcd.signum();
        let mut w = Site::new(g.x * sign, g.y * sign);
        let p = u.rot_cw().vector();
        // shortest representative of w modulo P
        let k = (-(w.dot(p)) as f64 / p.norm_sq() as f64).round() as i64;
        w = w + p * k;
        debug_assert_eq!(u.dot(w), 1);
        LineFrame { u, w, p }
    }

    /// (depth, lateral) packed as a Site (x = depth, y = lateral).
    pub fn to_local(&self, x: Site) -> Site {
        Site::new(self.u.dot(x), -self.w.cross(x))
    }

    pub fn to_global(&self, l: Site) -> Site {
        self.w * l.x + self.p * l.y
    }

    pub fn local_family(&self, family: &UpdateFamily) -> UpdateFamily {
        family.map(&format!("{}@{}", family.name, self.u), |x| self.to_local(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthVerdict {
    /// the closure of H_u ∪ Z contains Z + shift, with shift parallel to the line
    Infinite {
        shift: Site,
    },
    Finite,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LocalVerdict {
    Infinite(i64),
    Finite,
    Inconclusive,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Probe {
    pub verdict: LocalVerdict,
    /// some infected site at depth ≥ 1 lies near a lateral edge
    pub deep_growth_at_edge: bool,
}

/// Reusable closure of H_u ∪ Z in local coordinates on the window
/// [0, depth] × [-half_span, half_span].
#[derive(Debug, Clone)]
pub(crate) struct LineProbe {
    pub range: i64,
    pub half_span: i64,
    engine: Engine,
    newly: Vec<usize>,
}

impl LineProbe {
    pub(crate) fn new(family: &UpdateFamily, u: Direction, depth: i64, half_span: i64) -> Result<Self> {
        let frame = LineFrame::new(u);
        let local = frame.local_family(family);
        let window = Window::new(0, depth, -half_span, half_span)?;
        let config = Configuration::healthy(
            window,
            BoundaryCondition::HalfPlaneInfected { normal: Direction::EAST, offset: Offset::zero() },
        );
        Ok(LineProbe { range: local.range(), half_span, engine: Engine::new(&local, &config)?, newly: Vec::new() })
    }

    /// Closure verdict for Z given in local coordinates (inside the window).
    pub(crate) fn probe(&mut self, z: &[Site]) -> Probe {
        let zp: Vec<usize> = z.iter().map(|&s| self.engine.pidx(s)).collect();
        let mut cand = Vec::new();
        for &p in &zp {
            self.engine.set(p, true);
        }
        for &p in &zp {
            self.engine.push_dependents(p, &mut cand);
        }
        self.newly.clear();
        let mut newly = std::mem::take(&mut self.newly);
        self.engine.run(cand, &mut newly);
        let edge = self.half_span - self.range;
        let mut touched = false;
        let mut deep = false;
        for &p in &newly {
            let s = self.engine.site(p);
            if s.y.abs() > edge {
                touched = true;
                deep |= s.x >= 1;
            }
        }
        let mut verdict = if touched { LocalVerdict::Inconclusive } else { LocalVerdict::Finite };
        if !newly.is_empty() && !z.is_empty() {
            'shift: for s in 1..=self.half_span {
                for sh in [s, -s] {
                    let ok = z.iter().all(|&q| {
                        let t = q.y + sh;
                        t.abs() <= self.half_span && self.engine.get(Site::new(q.x, t))
                    });
                    if ok {
                        verdict = LocalVerdict::Infinite(sh);
                        break 'shift;
                    }
                }
            }
        }
        for &p in zp.iter().chain(&newly) {
            self.engine.set(p, false);
        }
        self.newly = newly;
        Probe { verdict, deep_growth_at_edge: deep }
    }
}

/// Translate local Z laterally so that its lateral extent is centred at 0.
pub(crate) fn center_lateral(z: &[Site]) -> (Vec<Site>, i64) {
    if z.is_empty() {
        return (vec![], 0);
    }
    let lo = z.iter().map(|s| s.y).min().unwrap();
    let hi = z.iter().map(|s| s.y).max().unwrap();
    let c = (lo + hi).div_euclid(2);
    (z.iter().map(|s| Site::new(s.x, s.y - c)).collect(), c)
}

fn chebyshev_diameter(z: &[Site]) -> i64 {
    let mut d = 0;
    for a in z {
        for b in z {
            d = d.max((*a - *b).chebyshev());
        }
    }
    d
}

/// Does H_u ∪ Z infect infinitely many sites outside H_u?
///
/// Growth is confined to {0 ≤ ⟨x,u⟩ ≤ max_z ⟨z,u⟩} when u is stable, so the
/// closure is computed on that strip, `lateral_span` sites wide (counted
/// along the line). Infinite is certified by Z + x ⊆ closure for some x ≠ 0
/// parallel to the line; Finite only if nothing was infected within the
/// family range of the lateral edges.
pub fn infinite_growth(family: &UpdateFamily, u: Direction, z: &[Site], lateral_span: i64) -> Result<GrowthVerdict> {
    if is_unstable(family, u) {
        return Err(Error::Precondition(format!("direction {u} is unstable")));
    }
    let frame = LineFrame::new(u);
    let local: Vec<Site> = z.iter().map(|&s| frame.to_local(s)).collect();
    if let Some(s) = local.iter().find(|s| s.x < 0) {
        return Err(Error::Precondition(format!("{} lies in the open half-plane", frame.to_global(*s))));
    }
    let range = frame.local_family(family).range();
    let need = 8 * (range + chebyshev_diameter(&local));
    if lateral_span < need {
        return Err(Error::InvalidArgument(format!("lateral span {lateral_span} below {need}")));
    }
    let depth = local.iter().map(|s| s.x).max().unwrap_or(0);
    let (centered, _) = center_lateral(&local);
    let mut probe = LineProbe::new(family, u, depth, lateral_span / 2)?;
    Ok(match probe.probe(&centered).verdict {
        LocalVerdict::Infinite(s) => GrowthVerdict::Infinite { shift: frame.p * s },
        LocalVerdict::Finite => GrowthVerdict::Finite,
        LocalVerdict::Inconclusive => GrowthVerdict::Inconclusive,
    })
}

/// Default lateral span used by the searches for a box of radius `b`.
pub(crate) fn search_span(local_range: i64, b: i64) -> i64 {
    8 * (local_range + 2 * b)
}

/// Canonical enumeration of candidate sets of size n in the local box
/// [0,b] × [-b,b], up to lateral translation: the first element in
/// (depth, lateral) order sits at lateral position 0.
pub(crate) fn for_each_candidate_chunk(b: i64, n: usize, chunk: usize, mut f: impl FnMut(&[Vec<Site>]) -> bool) {
    if n == 0 {
        f(&[vec![]]);
        return;
    }
    let cells: Vec<Site> = (0..=b).flat_map(|d| (-b..=b).map(move |t| Site::new(d, t))).collect();
    let mut buf: Vec<Vec<Site>> = Vec::with_capacity(chunk);
    for d0 in 0..=b {
        let anchor = Site::new(d0, 0);
        let rest: Vec<Site> = cells.iter().copied().filter(|&c| c > anchor).collect();
        let k = n - 1;
        if rest.len() < k {
            continue;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mut z = Vec::with_capacity(n);
            z.push(anchor);
            z.extend(idx.iter().map(|&i| rest[i]));
            buf.push(z);
            if buf.len() == chunk {
                if f(&buf) {
                    return;
                }
                buf.clear();
            }
            // next combination in lexicographic order
            let mut advanced = false;
            let mut i = k;
            while i > 0 {
                i -= 1;
                if idx[i] < rest.len() - k + i {
                    idx[i] += 1;
                    for j in i + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    if !buf.is_empty() {
        f(&buf);
    }
}

/// A set Z of size α(u) whose translates by multiples of x grow along the line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelpingGenerator {
    pub direction: Direction,
    pub z: Vec<Site>,
    /// shift parallel to the line with Z + x ⊆ [Z ∪ H_u]
    pub x: Site,
    /// period: x is Q lattice steps along the line
    pub q: i64,
    /// max ⟨z,u⟩ over Z, in lattice lines
    pub depth: i64,
}

impl HelpingGenerator {
    /// Generator in local coordinates (depth, lateral), lateral shift signed.
    pub fn local(&self) -> (Vec<Site>, i64) {
        let f = LineFrame::new(self.direction);
        let z = self.z.iter().map(|&s| f.to_local(s)).collect();
        (z, f.to_local(self.x).y)
    }
}

/// Choose a generator of size n for u, minimising depth, then period.
pub fn find_helping_generator(
    family: &UpdateFamily,
    u: Direction,
    n: usize,
    box_radius: i64,
) -> Result<HelpingGenerator> {
    if is_unstable(family, u) {
        return Err(Error::Precondition(format!("direction {u} is unstable")));
    }
    let frame = LineFrame::new(u);
    let range = frame.local_family(family).range();
    let half = search_span(range, box_radius) / 2;
    let base = LineProbe::new(family, u, box_radius, half)?;
    let mut best: Option<(i64, i64, Vec<Site>, i64)> = None;
    for_each_candidate_chunk(box_radius, n, 4096, |chunk| {
        let found: Vec<(i64, i64, Vec<Site>, i64)> = chunk
            .par_iter()
            .map_init(
                || base.clone(),
                |p, z| {
                    let (c, shift) = center_lateral(z);
                    let r = p.probe(&c);
                    match r.verdict {
                        LocalVerdict::Infinite(s) if !r.deep_growth_at_edge => {
                            let depth = z.iter().map(|q| q.x).max().unwrap_or(0);
                            let zz: Vec<Site> = c.iter().map(|q| Site::new(q.x, q.y + shift)).collect();
                            Some((depth, s.abs(), zz, s))
                        }
                        _ => None,
                    }
                },
            )
            .flatten()
            .collect();
        for cand in found {
            let better = match &best {
                None => true,
                Some(b) => (cand.0, cand.1) < (b.0, b.1),
            };
            if better {
                best = Some(cand);
            }
        }
        false
    });
    let (depth, q, z, s) = best.ok_or_else(|| {
        Error::SearchFailed(format!("no generator of size {n} for {u} within box radius {box_radius}"))
    })?;
    Ok(HelpingGenerator { direction: u, z: z.iter().map(|&l| frame.to_global(l)).collect(), x: frame.p * s, q, depth })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinW {
    pub per_direction: Vec<(Direction, usize)>,
    pub max: usize,
}

/// Least W such that W consecutive infected sites on the boundary line of
/// H_u, together with H_u, infect the whole line.
///
/// The run Z at lateral positions 0..W is accepted once the closure
/// contains Z+1 and Z-1; by translation invariance this forces the whole
/// line.
pub fn min_w(family: &UpdateFamily, directions: &[Direction], cap: usize) -> Result<MinW> {
    if cap == 0 {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    let mut per = Vec::new();
    for &u in directions {
        let frame = LineFrame::new(u);
        let range = frame.local_family(family).range();
        let half = 4 * (range + cap as i64);
        let mut probe = LineProbe::new(family, u, 0, half)?;
        let mut found = None;
        for w in 1..=cap {
            let z: Vec<Site> = (0..w as i64).map(|t| Site::new(0, t)).collect();
            let (c, _) = center_lateral(&z);
            if probe_covers_neighbours(&mut probe, &c) {
                found = Some(w);
                break;
            }
        }
        match found {
            Some(w) => per.push((u, w)),
            None => {
                return Err(Error::SearchFailed(format!("W exceeds the cap {cap} for direction {u}")));
            }
        }
    }
    let max = per.iter().map(|p| p.1).max().unwrap_or(1);
    Ok(MinW { per_direction: per, max })
}

fn probe_covers_neighbours(probe: &mut LineProbe, z: &[Site]) -> bool {
    // rerun and inspect the final state directly
    let zp: Vec<usize> = z.iter().map(|&s| probe.engine.pidx(s)).collect();
    let mut cand = Vec::new();
    for &p in &zp {
        probe.engine.set(p, true);
    }
    for &p in &zp {
        probe.engine.push_dependents(p, &mut cand);
    }
    let mut newly = Vec::new();
    probe.engine.run(cand, &mut newly);
    let ok = [1, -1].iter().all(|&sh| z.iter().all(|q| probe.engine.get(Site::new(q.x, q.y + sh))));
    for &p in zp.iter().chain(&newly) {
        probe.engine.set(p, false);
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::zoo;

    fn brute_closure(f: &UpdateFamily, c: &Configuration) -> (Configuration, usize) {
        let mut cur = c.clone();
        let mut rounds = 0;
        loop {
            let mut next = cur.clone();
            let mut changed = false;
            for s in c.window().sites() {
                if cur.get(s).unwrap() {
                    continue;
                }
                if f.rules.iter().any(|r| r.iter().all(|&v| cur.get(s + v).unwrap())) {
                    next.set(s, true).unwrap();
                    changed = true;
                }
            }
            if !changed {
                return (cur, rounds);
            }
            rounds += 1;
            cur = next;
        }
    }

    fn sites(v: &[(i64, i64)]) -> Vec<Site> {
        v.iter().map(|&(x, y)| Site::new(x, y)).collect()
    }

    #[test]
    fn closure_examples() {
        let w = Window::centered(5);
        let f = zoo::fa2f();
        let empty = Configuration::healthy(w, BoundaryCondition::AllHealthy);
        assert!(closure(&f, &empty).unwrap().newly_infected.is_empty());
        let c = Configuration::from_sites(w, BoundaryCondition::AllHealthy, sites(&[(0, 0), (1, 1)])).unwrap();
        let r = closure(&f, &c).unwrap();
        let mut got = r.final_config.infected_sites();
        got.sort();
        assert_eq!(got, sites(&[(0, 0), (0, 1), (1, 0), (1, 1)]));
        assert_eq!(r.rounds, 1);
        assert_eq!(r.newly_infected, sites(&[(1, 0), (0, 1)]));

        let col = Window::new(0, 0, -20, 20).unwrap();
        let hp = BoundaryCondition::HalfPlaneInfected { normal: Direction::EAST, offset: Offset::zero() };
        let c = Configuration::from_sites(col, hp, [Site::ORIGIN]).unwrap();
        let r = closure(&zoo::duarte(), &c).unwrap();
        assert_eq!(r.final_config.count_infected(), 41);
    }

    #[test]
    fn closure_matches_synchronous_rounds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for name in zoo::NAMES {
            let f = zoo::get(name).unwrap();
            for trial in 0..30 {
                let w = Window::new(0, 11, 0, 9).unwrap();
                let b = match trial % 4 {
                    0 => BoundaryCondition::AllHealthy,
                    1 => BoundaryCondition::AllInfected,
                    2 => BoundaryCondition::Torus,
                    _ => BoundaryCondition::HalfPlaneInfected {
                        normal: Direction::new(1, 2).unwrap(),
                        offset: Offset::Real(1.5),
                    },
                };
                let q = rng.random_range(0.05..0.4);
                let cells = (0..w.len()).map(|_| rng.random_bool(q)).collect();
                let c = Configuration::from_cells(w, cells, b).unwrap();
                let r = closure(&f, &c).unwrap();
                let (bf, rounds) = brute_closure(&f, &c);
                assert_eq!(r.final_config, bf, "{name} trial {trial}");
                assert_eq!(r.rounds, rounds);
                assert_eq!(r.newly_infected.len(), bf.count_infected() - c.count_infected());
                assert_eq!(closure(&f, &r.final_config).unwrap().newly_infected.len(), 0);
            }
        }
    }

    #[test]
    fn explicit_collar_must_cover_range() {
        let w = Window::centered(2);
        let c = Configuration::healthy(w, BoundaryCondition::explicit(3, []));
        assert!(closure(&zoo::intricate_isotropic(), &c).is_err());
        assert!(closure(&zoo::fa2f(), &c).is_ok());
    }

    #[test]
    fn line_frame_is_unimodular() {
        for x in -6..=6 {
            for y in -6..=6 {
                if let Ok(u) = Direction::new(x, y) {
                    let f = LineFrame::new(u);
                    for s in [Site::new(3, -2), Site::new(-7, 5), Site::new(1, 1)] {
                        let l = f.to_local(s);
                        assert_eq!(l.x, u.dot(s));
                        assert_eq!(f.to_global(l), s);
                    }
                }
            }
        }
    }

    #[test]
    fn growth_examples() {
        let du = zoo::duarte();
        assert_eq!(
            infinite_growth(&du, Direction::EAST, &[Site::ORIGIN], 64).unwrap(),
            GrowthVerdict::Infinite { shift: Site::new(0, -1) }
        );
        assert_eq!(infinite_growth(&zoo::fa2f(), Direction::EAST, &[], 64).unwrap(), GrowthVerdict::Finite);
        let fig = zoo::intricate_isotropic();
        let z = sites(&[(0, 0), (-2, 0), (-4, 0)]);
        match infinite_growth(&fig, Direction::SOUTH, &z, 120).unwrap() {
            GrowthVerdict::Infinite { shift } => assert_eq!(shift.chebyshev(), 2),
            v => panic!("{v:?}"),
        }
        // two sites are not enough for that line
        assert_ne!(infinite_growth(&fig, Direction::SOUTH, &z[..2], 120).unwrap(), GrowthVerdict::Inconclusive);
        assert!(infinite_growth(&du, Direction::EAST, &[Site::ORIGIN], 6).is_err());
        assert!(infinite_growth(&du, Direction::new(1, 1).unwrap(), &[], 64).is_err());
    }

    #[test]
    fn generators() {
        let g = find_helping_generator(&zoo::duarte(), Direction::EAST, 1, 3).unwrap();
        assert_eq!((g.z.clone(), g.q), (vec![Site::ORIGIN], 1));
        assert_eq!(g.x.chebyshev(), 1);
        let g = find_helping_generator(&zoo::fa2f(), Direction::NORTH, 1, 3).unwrap();
        assert_eq!((g.z.clone(), g.q), (vec![Site::ORIGIN], 1));
        assert!(find_helping_generator(&zoo::fa2f(), Direction::NORTH, 0, 3).is_err());
    }

    #[test]
    fn w_thresholds() {
        let axes = [Direction::NORTH, Direction::EAST, Direction::SOUTH, Direction::WEST];
        let fa = min_w(&zoo::fa2f(), &axes, 4).unwrap();
        assert!(fa.per_direction.iter().all(|p| p.1 == 1) && fa.max == 1);
        assert_eq!(min_w(&zoo::duarte(), &[Direction::EAST], 4).unwrap().max, 1);
        let fig = min_w(&zoo::intricate_isotropic(), &[Direction::SOUTH], 16).unwrap();
        assert!(fig.max >= 4, "{fig:?}");
        assert!(min_w(&zoo::intricate_isotropic(), &[Direction::SOUTH], 2).is_err());
    }

    #[test]
    fn candidate_enumeration_counts() {
        let mut total = 0;
        for_each_candidate_chunk(2, 2, 7, |c| {
            total += c.len();
            false
        });
        // anchor (d0,0); rest strictly after it in the 3x5 box
        let expect: usize = (0..=2).map(|d0| 15 - (d0 * 5 + 3)).sum();
        assert_eq!(total, expect);
        let mut one = 0;
        for_each_candidate_chunk(2, 1, 100, |c| {
            one += c.len();
            false
        });
        assert_eq!(one, 3);
    }
}
