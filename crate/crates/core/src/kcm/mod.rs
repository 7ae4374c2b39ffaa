//! Continuous-time kinetically constrained dynamics: each site whose
//! constraint is satisfied resamples its state at rate 1, becoming infected
//! with probability q.

mod east;
mod exact;
mod network;

pub use east::{east_min_infections, east_reach_bfs};
pub use exact::ExactSystem;
pub use network::{run_naive, Network, RunEnd, Simulator};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::UpdateFamily;
use crate::lattice::{BoundaryCondition, Configuration, SeededStream, Site, Window};
use crate::stats::mean_se;

/// c_x(η): is some rule translate x + U fully infected? Sites the
/// configuration cannot resolve count as healthy.
pub fn constraint(family: &UpdateFamily, config: &Configuration, x: Site) -> bool {
    family.rules.iter().any(|r| r.iter().all(|&v| config.get(x + v).unwrap_or(false)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialLaw {
    /// i.i.d. Bernoulli(q) infections
    Stationary,
    Explicit(Configuration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub family: UpdateFamily,
    pub q: f64,
    pub window: Window,
    pub boundary: BoundaryCondition,
    /// site whose infection time is measured
    pub target: Site,
    pub t_max: f64,
    pub seed: u64,
    pub replicates: u64,
    pub initial: InitialLaw,
}

impl SimConfig {
    /// L×L torus with the target at the origin.
    pub fn torus(family: UpdateFamily, q: f64, l: i64, t_max: f64, seed: u64, replicates: u64) -> Result<Self> {
        let window = Window::new(0, l - 1, 0, l - 1)?;
        let cfg = SimConfig {
            family,
            q,
            window,
            boundary: BoundaryCondition::Torus,
            target: Site::ORIGIN,
            t_max,
            seed,
            replicates,
            initial: InitialLaw::Stationary,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Finite window with a frozen boundary.
    pub fn frozen(
        family: UpdateFamily,
        q: f64,
        window: Window,
        boundary: BoundaryCondition,
        target: Site,
        t_max: f64,
        seed: u64,
        replicates: u64,
    ) -> Result<Self> {
        let cfg =
            SimConfig { family, q, window, boundary, target, t_max, seed, replicates, initial: InitialLaw::Stationary };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_initial(mut self, initial: InitialLaw) -> Result<Self> {
        self.initial = initial;
        self.validate()?;
        Ok(self)
    }

    pub fn torus_side(&self) -> Option<i64> {
        (self.boundary == BoundaryCondition::Torus).then_some(self.window.width() as i64)
    }

    /// Hard preconditions; soft ones are reported by [`SimConfig::warnings`].
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::InvalidArgument(format!("q = {} outside [0,1]", self.q)));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidArgument("t_max must be positive".into()));
        }
        if !self.window.contains(self.target) {
            return Err(Error::InvalidArgument(format!("target {} outside the window", self.target)));
        }
        let r = self.family.range();
        if self.boundary == BoundaryCondition::Torus {
            let side = self.window.width().min(self.window.height()) as i64;
            if side < 2 * r + 1 {
                return Err(Error::Precondition(format!("torus side {side} below 2·range + 1 = {}", 2 * r + 1)));
            }
        }
        if let InitialLaw::Explicit(c) = &self.initial {
            if *c.window() != self.window {
                return Err(Error::InvalidArgument("initial configuration window differs".into()));
            }
        }
        Ok(())
    }

    /// Influence travels O(t) sites by time t; on a small torus a replicate
    /// can feel its own wrap-around before t_max.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if let Some(l) = self.torus_side() {
            let need = 8.0 * self.t_max + self.family.range() as f64;
            if (l as f64) < need {
                w.push(format!("torus side {l} is below 8·t_max + range = {need}; finite-size effects possible"));
            }
        }
        w
    }

    pub fn network(&self) -> Result<Network> {
        Network::new(&self.family, self.window, &self.boundary)
    }

    fn initial_cells<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        match &self.initial {
            InitialLaw::Stationary => (0..self.window.len()).map(|_| rng.random_bool(self.q)).collect(),
            InitialLaw::Explicit(c) => c.cells().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TauValue {
    Hit(f64),
    Censored(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSample {
    pub value: TauValue,
    /// legal rings, i.e. effective events, processed
    pub rings_processed: u64,
}

impl TauSample {
    pub fn time(&self) -> f64 {
        match self.value {
            TauValue::Hit(t) | TauValue::Censored(t) => t,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self.value, TauValue::Censored(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stop {
    OriginInfected,
    /// run to t_max, recording the first infection of the target on the way
    TimeLimit,
}

/// One replicate of the dynamics with stream (seed, replicate).
pub fn simulate(cfg: &SimConfig, net: &Network, replicate: u64, stop: Stop) -> TauSample {
    let mut rng = SeededStream::new(cfg.seed, replicate).rng();
    let cells = cfg.initial_cells(&mut rng);
    let target = cfg.window.index(cfg.target).expect("validated target");
    let mut sim = Simulator::new(net, cells);
    let value = match stop {
        Stop::OriginInfected => match sim.run(&mut rng, cfg.q, cfg.t_max, Some(target)) {
            RunEnd::TargetInfected => TauValue::Hit(sim.time()),
            RunEnd::TimeLimit | RunEnd::Frozen => TauValue::Censored(cfg.t_max),
        },
        Stop::TimeLimit => {
            let first = match sim.run(&mut rng, cfg.q, cfg.t_max, Some(target)) {
                RunEnd::TargetInfected => TauValue::Hit(sim.time()),
                _ => TauValue::Censored(cfg.t_max),
            };
            sim.run(&mut rng, cfg.q, cfg.t_max, None);
            first
        }
    };
    TauSample { value, rings_processed: sim.events() }
}

/// Same law as [`simulate`] through the per-site clock construction.
pub fn simulate_naive(cfg: &SimConfig, net: &Network, replicate: u64) -> TauSample {
    let mut rng = SeededStream::new(cfg.seed, replicate).rng();
    let mut cells = cfg.initial_cells(&mut rng);
    let target = cfg.window.index(cfg.target).expect("validated target");
    let (end, t, legal) = run_naive(net, &mut cells, &mut rng, cfg.q, cfg.t_max, Some(target));
    let value = match end {
        RunEnd::TargetInfected => TauValue::Hit(t),
        _ => TauValue::Censored(cfg.t_max),
    };
    TauSample { value, rings_processed: legal }
}

/// State of the window at time t for one replicate.
pub fn evolve(cfg: &SimConfig, net: &Network, replicate: u64, t: f64) -> Configuration {
    let mut rng = SeededStream::new(cfg.seed, replicate).rng();
    let cells = cfg.initial_cells(&mut rng);
    let mut sim = Simulator::new(net, cells);
    sim.run(&mut rng, cfg.q, t, None);
    Configuration::from_cells(cfg.window, sim.cells().to_vec(), cfg.boundary.clone()).expect("same window")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    pub replicates: u64,
    /// censored samples enter at t_max, making the mean a lower bound
    pub mean: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub censored: u64,
    pub lower_bound: bool,
    pub effective_events_total: u64,
}

pub fn summarize(samples: &[TauSample]) -> TauEstimate {
    let times: Vec<f64> = samples.iter().map(TauSample::time).collect();
    let (mean, se) = mean_se(&times);
    let censored = samples.iter().filter(|s| s.is_censored()).count() as u64;
    TauEstimate {
        replicates: samples.len() as u64,
        mean,
        std_err: se,
        ci_low: mean - 1.96 * se,
        ci_high: mean + 1.96 * se,
        censored,
        lower_bound: censored > 0,
        effective_events_total: samples.iter().map(|s| s.rings_processed).sum(),
    }
}

/// Replicate i uses stream (seed, i); results do not depend on scheduling.
pub fn sample_tau0(cfg: &SimConfig) -> Result<Vec<TauSample>> {
    cfg.validate()?;
    let net = cfg.network()?;
    Ok((0..cfg.replicates).into_par_iter().map(|i| simulate(cfg, &net, i, Stop::OriginInfected)).collect())
}

pub fn estimate_tau0(cfg: &SimConfig) -> Result<TauEstimate> {
    if cfg.replicates < 30 {
        return Err(Error::InvalidArgument("at least 30 replicates are required".into()));
    }
    Ok(summarize(&sample_tau0(cfg)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityProbe {
    /// mean over replicates of the fraction of [0, t_max] the probe is infected
    pub time_average: f64,
    pub std_err: f64,
    /// fraction of replicates with the probe infected at each grid time
    pub grid: Vec<(f64, f64)>,
}

pub fn stationarity_probe(cfg: &SimConfig, probe: Site, t_grid: &[f64]) -> Result<StationarityProbe> {
    cfg.validate()?;
    if cfg.initial != InitialLaw::Stationary {
        return Err(Error::Precondition("the probe needs a stationary initial law".into()));
    }
    let p = cfg.window.index(probe).ok_or_else(|| Error::InvalidArgument(format!("probe {probe} outside window")))?;
    if t_grid.windows(2).any(|w| w[0] > w[1]) || t_grid.iter().any(|&t| t < 0.0 || t > cfg.t_max) {
        return Err(Error::InvalidArgument("grid times must be sorted within [0, t_max]".into()));
    }
    let net = cfg.network()?;
    let runs: Vec<(f64, Vec<bool>)> = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededStream::new(cfg.seed, i).rng();
            let cells = cfg.initial_cells(&mut rng);
            let mut sim = Simulator::new(&net, cells).with_probe(p);
            let mut marks = Vec::with_capacity(t_grid.len());
            for &t in t_grid {
                sim.run(&mut rng, cfg.q, t, None);
                marks.push(sim.cells()[p]);
            }
            sim.run(&mut rng, cfg.q, cfg.t_max, None);
            (sim.probe_occupation().unwrap() / cfg.t_max, marks)
        })
        .collect();
    let fracs: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let (time_average, std_err) = mean_se(&fracs);
    let grid = t_grid
        .iter()
        .enumerate()
        .map(|(g, &t)| (t, runs.iter().filter(|r| r.1[g]).count() as f64 / runs.len().max(1) as f64))
        .collect();
    Ok(StationarityProbe { time_average, std_err, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::zoo;
    use crate::stats::ks_two_sample;

    fn single_site(q: f64, reps: u64) -> SimConfig {
        let f = zoo::east_chain();
        let w = Window::new(0, 0, 0, 0).unwrap();
        SimConfig::frozen(f, q, w, BoundaryCondition::AllInfected, Site::ORIGIN, 1e6, 7, reps).unwrap()
    }

    #[test]
    fn constraint_examples() {
        let w = Window::centered(2);
        let fa = zoo::fa2f();
        let c =
            Configuration::from_sites(w, BoundaryCondition::AllHealthy, [Site::new(1, 0), Site::new(0, 1)]).unwrap();
        assert!(constraint(&fa, &c, Site::ORIGIN));
        let c = Configuration::from_sites(w, BoundaryCondition::AllHealthy, [Site::new(1, 0)]).unwrap();
        assert!(!constraint(&fa, &c, Site::ORIGIN));
        let east = UpdateFamily::from_pairs("e", &[&[(1, 0)]]).unwrap();
        assert!(constraint(&east, &c, Site::ORIGIN));
    }

    #[test]
    fn origin_infected_at_start() {
        let w = Window::new(0, 7, 0, 7).unwrap();
        let init = Configuration::from_sites(w, BoundaryCondition::Torus, [Site::ORIGIN]).unwrap();
        let cfg = SimConfig::torus(zoo::fa2f(), 0.3, 8, 10.0, 1, 1)
            .unwrap()
            .with_initial(InitialLaw::Explicit(init))
            .unwrap();
        let s = simulate(&cfg, &cfg.network().unwrap(), 0, Stop::OriginInfected);
        assert_eq!(s.value, TauValue::Hit(0.0));
        assert_eq!(s.rings_processed, 0);
    }

    #[test]
    fn frozen_dynamics_censor_immediately() {
        let w = Window::new(0, 7, 0, 7).unwrap();
        let init = Configuration::healthy(w, BoundaryCondition::Torus);
        let cfg = SimConfig::torus(zoo::fa2f(), 0.3, 8, 10.0, 1, 1)
            .unwrap()
            .with_initial(InitialLaw::Explicit(init))
            .unwrap();
        let s = simulate(&cfg, &cfg.network().unwrap(), 0, Stop::OriginInfected);
        assert_eq!(s.value, TauValue::Censored(10.0));
        let p = stationarity_probe(&SimConfig { initial: InitialLaw::Stationary, q: 0.0, ..cfg }, Site::ORIGIN, &[5.0])
            .unwrap();
        assert_eq!(p.time_average, 0.0);
    }

    #[test]
    fn single_site_mean() {
        // w.p. q the site starts infected; otherwise legal rings arrive at
        // rate 1 and succeed w.p. q, so E τ = (1−q)·(1/q)
        let cfg = single_site(0.3, 40_000);
        let e = estimate_tau0(&cfg).unwrap();
        assert_eq!(e.censored, 0);
        assert!((e.mean - 7.0 / 3.0).abs() < 3.0 * e.std_err, "{e:?}");
    }

    #[test]
    fn replicates_are_reproducible() {
        let cfg = SimConfig::torus(zoo::fa2f(), 0.5, 16, 50.0, 99, 4).unwrap();
        let net = cfg.network().unwrap();
        for i in 0..4 {
            assert_eq!(simulate(&cfg, &net, i, Stop::OriginInfected), simulate(&cfg, &net, i, Stop::OriginInfected));
        }
        assert_eq!(sample_tau0(&cfg).unwrap(), sample_tau0(&cfg).unwrap());
    }

    #[test]
    fn naive_reference_agrees_in_law() {
        let f = zoo::east_chain();
        let w = Window::new(0, 2, 0, 0).unwrap();
        let cfg = SimConfig::frozen(f, 0.4, w, BoundaryCondition::AllInfected, Site::new(2, 0), 1e6, 5, 4000).unwrap();
        let net = cfg.network().unwrap();
        let a: Vec<f64> = (0..4000).map(|i| simulate(&cfg, &net, i, Stop::OriginInfected).time()).collect();
        let b: Vec<f64> = (0..4000).map(|i| simulate_naive(&cfg, &net, 10_000 + i).time()).collect();
        assert!(ks_two_sample(&a, &b).1 > 0.001);
    }

    #[test]
    fn validation() {
        assert!(SimConfig::torus(zoo::fa2f(), 0.3, 2, 1.0, 0, 1).is_err());
        assert!(SimConfig::torus(zoo::fa2f(), 1.3, 8, 1.0, 0, 1).is_err());
        assert!(SimConfig::torus(zoo::fa2f(), 0.3, 8, 0.0, 0, 1).is_err());
        let c = SimConfig::torus(zoo::fa2f(), 0.3, 8, 100.0, 0, 1).unwrap();
        assert_eq!(c.warnings().len(), 1);
        assert!(estimate_tau0(&c).is_err());
        assert!(SimConfig::torus(zoo::fa2f(), 0.3, 801, 100.0, 0, 1).unwrap().warnings().is_empty());
    }
}
