use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::family::UpdateFamily;
use crate::lattice::{BoundaryCondition, Window};

/// The constraint structure of a family on a finite window, compiled to site
/// indices. Boundary sites are frozen: rules reading a healthy boundary site
/// are dropped, infected boundary sites are removed from their rule.
#[derive(Debug, Clone)]
pub struct Network {
    window: Window,
    /// clauses of site i: clause_ptr[site_ptr[i]..site_ptr[i+1]]
    site_ptr: Vec<u32>,
    /// literals of clause c: lits[clause_ptr[c]..clause_ptr[c+1]]
    clause_ptr: Vec<u32>,
    lits: Vec<u32>,
    /// some rule is fully inside the infected boundary
    always: Vec<bool>,
    /// sites whose constraint reads site i
    dep_ptr: Vec<u32>,
    deps: Vec<u32>,
}

impl Network {
    pub fn new(family: &UpdateFamily, window: Window, boundary: &BoundaryCondition) -> Result<Self> {
        let n = window.len();
        if n >= u32::MAX as usize {
            return Err(Error::InvalidArgument("window too large".into()));
        }
        let torus = *boundary == BoundaryCondition::Torus;
        if torus {
            let r = family.range();
            if (window.width() as i64) < 2 * r + 1 || (window.height() as i64) < 2 * r + 1 {
                return Err(Error::Precondition(format!("torus side must be at least {}", 2 * r + 1)));
            }
        }
        let mut site_ptr = Vec::with_capacity(n + 1);
        let mut clause_ptr = vec![0u32];
        let mut lits = Vec::new();
        let mut always = vec![false; n];
        let mut edges: Vec<(u32, u32)> = Vec::new();
        site_ptr.push(0);
        for i in 0..n {
            let x = window.site(i);
            'rule: for rule in &family.rules {
                let start = lits.len();
                for &v in rule {
                    let y = x + v;
                    let idx = if let Some(j) = window.index(y) {
                        j
                    } else if torus {
                        window.index(window.wrap(y)).unwrap()
                    } else if boundary.outside(&window, y)? {
                        continue;
                    } else {
                        lits.truncate(start);
                        continue 'rule;
                    };
                    lits.push(idx as u32);
                }
                if lits.len() == start {
                    always[i] = true;
                } else {
                    for &j in &lits[start..] {
                        edges.push((j, i as u32));
                    }
                    clause_ptr.push(lits.len() as u32);
                }
            }
            site_ptr.push((clause_ptr.len() - 1) as u32);
        }
        edges.sort_unstable();
        edges.dedup();
        let mut dep_ptr = vec![0u32; n + 1];
        for &(j, _) in &edges {
            dep_ptr[j as usize + 1] += 1;
        }
        for i in 0..n {
            dep_ptr[i + 1] += dep_ptr[i];
        }
        let deps = edges.into_iter().map(|(_, i)| i).collect();
        Ok(Network { window, site_ptr, clause_ptr, lits, always, dep_ptr, deps })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.always.len()
    }

    pub fn is_empty(&self) -> bool {
        self.always.is_empty()
    }

    /// c_x(η): some rule translate at site i is fully infected.
    #[inline]
    pub fn constraint(&self, cells: &[bool], i: usize) -> bool {
        if self.always[i] {
            return true;
        }
        let (a, b) = (self.site_ptr[i] as usize, self.site_ptr[i + 1] as usize);
        (a..b).any(|c| {
            let (s, e) = (self.clause_ptr[c] as usize, self.clause_ptr[c + 1] as usize);
            self.lits[s..e].iter().all(|&j| cells[j as usize])
        })
    }

    /// Sites whose constraint depends on site i.
    #[inline]
    pub fn dependents(&self, i: usize) -> &[u32] {
        &self.deps[self.dep_ptr[i] as usize..self.dep_ptr[i + 1] as usize]
    }

    /// Constraint of site i on a bitmask state (windows of at most 64 sites).
    pub fn constraint_mask(&self, state: u64, i: usize) -> bool {
        if self.always[i] {
            return true;
        }
        let (a, b) = (self.site_ptr[i] as usize, self.site_ptr[i + 1] as usize);
        (a..b).any(|c| {
            let (s, e) = (self.clause_ptr[c] as usize, self.clause_ptr[c + 1] as usize);
            self.lits[s..e].iter().all(|&j| state >> j & 1 == 1)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunEnd {
    TargetInfected,
    TimeLimit,
    /// no site can update and the target is healthy
    Frozen,
}

/// Rejection-free event-driven dynamics. Rings at sites with unsatisfied
/// constraints change nothing, so only the active set A = {x: c_x = 1} is
/// tracked: the next legal ring comes after Exp(|A|) at a uniform site of A.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    net: &'a Network,
    cells: Vec<bool>,
    active: Vec<u32>,
    pos: Vec<u32>,
    time: f64,
    events: u64,
    probe: Option<(usize, f64, f64)>,
}

const ABSENT: u32 = u32::MAX;

impl<'a> Simulator<'a> {
    pub fn new(net: &'a Network, cells: Vec<bool>) -> Self {
        assert_eq!(cells.len(), net.len());
        let mut s = Simulator {
            net,
            cells,
            active: Vec::new(),
            pos: vec![ABSENT; net.len()],
            time: 0.0,
            events: 0,
            probe: None,
        };
        for i in 0..net.len() {
            if net.constraint(&s.cells, i) {
                s.insert(i);
            }
        }
        s
    }

    /// Track the time site i spends infected.
    pub fn with_probe(mut self, i: usize) -> Self {
        self.probe = Some((i, 0.0, self.time));
        self
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn active_len(&self) -> usize {
        self.active.len()
    }

    /// Time the probe site has spent infected up to the current time.
    pub fn probe_occupation(&self) -> Option<f64> {
        self.probe.map(|(i, acc, last)| if self.cells[i] { acc + self.time - last } else { acc })
    }

    fn insert(&mut self, i: usize) {
        if self.pos[i] == ABSENT {
            self.pos[i] = self.active.len() as u32;
            self.active.push(i as u32);
        }
    }

    fn remove(&mut self, i: usize) {
        let p = self.pos[i];
        if p != ABSENT {
            let last = self.active.pop().unwrap();
            if last as usize != i {
                self.active[p as usize] = last;
                self.pos[last as usize] = p;
            }
            self.pos[i] = ABSENT;
        }
    }

    fn flip(&mut self, x: usize, infected: bool) {
        if let Some((p, acc, last)) = &mut self.probe {
            if *p == x {
                if self.cells[x] {
                    *acc += self.time - *last;
                }
                *last = self.time;
            }
        }
        self.cells[x] = infected;
        let net = self.net;
        for &y in net.dependents(x) {
            let y = y as usize;
            if net.constraint(&self.cells, y) {
                self.insert(y);
            } else {
                self.remove(y);
            }
        }
    }

    /// Advance until `until`, or until the target becomes infected when one is
    /// given. When the clock passes `until` the pending ring is discarded,
    /// which by memorylessness leaves the law of the continuation unchanged.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, q: f64, until: f64, target: Option<usize>) -> RunEnd {
        if let Some(t) = target {
            if self.cells[t] {
                return RunEnd::TargetInfected;
            }
        }
        loop {
            let a = self.active.len();
            if a == 0 {
                if target.is_some() {
                    return RunEnd::Frozen;
                }
                self.time = self.time.max(until);
                return RunEnd::TimeLimit;
            }
            let dt: f64 = Exp1.sample(rng);
            let next = self.time + dt / a as f64;
            if next > until {
                self.time = self.time.max(until);
                return RunEnd::TimeLimit;
            }
            self.time = next;
            let x = self.active[rng.random_range(0..a)] as usize;
            let infected = rng.random_bool(q);
            self.events += 1;
            if infected != self.cells[x] {
                self.flip(x, infected);
            }
            if Some(x) == target && infected {
                return RunEnd::TargetInfected;
            }
        }
    }
}

/// Literal graphical construction: every site rings at rate 1 and illegal
/// rings are discarded. Kept as a reference for the event-driven simulator.
pub fn run_naive<R: Rng + ?Sized>(
    net: &Network,
    cells: &mut [bool],
    rng: &mut R,
    q: f64,
    until: f64,
    target: Option<usize>,
) -> (RunEnd, f64, u64) {
    let n = net.len();
    let mut t = 0.0;
    let mut legal = 0;
    if let Some(x) = target {
        if cells[x] {
            return (RunEnd::TargetInfected, 0.0, 0);
        }
    }
    loop {
        let dt: f64 = Exp1.sample(rng);
        t += dt / n as f64;
        if t > until {
            return (RunEnd::TimeLimit, until, legal);
        }
        let x = rng.random_range(0..n);
        if !net.constraint(cells, x) {
            continue;
        }
        legal += 1;
        let infected = rng.random_bool(q);
        cells[x] = infected;
        if Some(x) == target && infected {
            return (RunEnd::TargetInfected, t, legal);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::zoo;
    use crate::lattice::{SeededStream, Site};

    #[test]
    fn compiled_constraints_match_the_family() {
        let f = zoo::fa2f();
        let w = Window::new(0, 5, 0, 5).unwrap();
        let net = Network::new(&f, w, &BoundaryCondition::Torus).unwrap();
        let mut cells = vec![false; w.len()];
        cells[w.index(Site::new(1, 0)).unwrap()] = true;
        assert!(!net.constraint(&cells, 0));
        cells[w.index(Site::new(5, 0)).unwrap()] = true;
        assert!(net.constraint(&cells, 0));
        // the origin's constraint is read by its four neighbours
        let mut d: Vec<Site> = net.dependents(0).iter().map(|&j| w.site(j as usize)).collect();
        d.sort();
        assert_eq!(d, vec![Site::new(0, 1), Site::new(0, 5), Site::new(1, 0), Site::new(5, 0)]);
        assert!(Network::new(&f, Window::new(0, 1, 0, 1).unwrap(), &BoundaryCondition::Torus).is_err());
    }

    #[test]
    fn boundary_is_frozen() {
        let f = zoo::east_chain();
        let w = Window::new(0, 2, 0, 0).unwrap();
        let net = Network::new(&f, w, &BoundaryCondition::AllInfected).unwrap();
        let cells = vec![false; 3];
        assert!(net.constraint(&cells, 0));
        assert!(!net.constraint(&cells, 1));
        let net = Network::new(&f, w, &BoundaryCondition::AllHealthy).unwrap();
        assert!(!net.constraint(&cells, 0));
    }

    #[test]
    fn active_set_stays_consistent() {
        let f = zoo::fa2f();
        let w = Window::new(0, 11, 0, 11).unwrap();
        let net = Network::new(&f, w, &BoundaryCondition::Torus).unwrap();
        let mut rng = SeededStream::new(3, 0).rng();
        let cells = (0..w.len()).map(|_| rng.random_bool(0.4)).collect();
        let mut sim = Simulator::new(&net, cells);
        for step in 1..20 {
            sim.run(&mut rng, 0.4, step as f64, None);
            let expect = (0..w.len()).filter(|&i| net.constraint(sim.cells(), i)).count();
            assert_eq!(sim.active_len(), expect);
            for &i in &sim.active {
                assert!(net.constraint(sim.cells(), i as usize));
            }
        }
        assert!(sim.events() > 0);
    }
}
