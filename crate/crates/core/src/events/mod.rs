//! Deterministic checkers for helping sets, traversability, super good
//! droplet towers and good boxes, plus Monte Carlo estimation of their
//! probabilities.

mod boxes;
mod correlation;
mod estimate;
mod helping;
mod tower;

pub use boxes::{box_events, BoxOutcome};
pub use correlation::{harris_check, standard_pairs, Event, EventPair, HarrisResult};
pub use estimate::{estimate_probability, sample_configuration, ProbabilityEstimate};
pub use helping::{find_w_run, has_w_helping, is_traversable, HelpingContext};
pub use tower::{
    build_tower, prepare_tower, replay_witness, sg_check, BaseEvent, SgEvaluator, Step, StepKind, TowerKind,
    TowerOptions, TowerSetup, TowerSpec,
};

use serde::{Deserialize, Serialize};

use crate::droplets::Droplet;
use crate::lattice::{Configuration, Site};

/// State of the sites outside a view's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exterior {
    /// ω = 1: everything outside is healthy
    Healthy,
    Infected,
    /// read the configuration, including its own boundary condition
    Inherit,
}

/// η·ω restricted to a droplet: sites inside read the configuration,
/// sites outside follow the exterior rule.
#[derive(Debug, Clone)]
pub struct View<'a> {
    config: &'a Configuration,
    domain: Option<Droplet>,
    exterior: Exterior,
}

impl<'a> View<'a> {
    pub fn new(config: &'a Configuration, domain: Option<Droplet>, exterior: Exterior) -> Self {
        View { config, domain, exterior }
    }

    /// Every site read from the configuration.
    pub fn whole(config: &'a Configuration) -> Self {
        View { config, domain: None, exterior: Exterior::Inherit }
    }

    pub fn domain(&self) -> Option<&Droplet> {
        self.domain.as_ref()
    }

    pub fn exterior(&self) -> Exterior {
        self.exterior
    }

    pub fn config(&self) -> &'a Configuration {
        self.config
    }

    pub fn restrict(&self, domain: Droplet, exterior: Exterior) -> View<'a> {
        View { config: self.config, domain: Some(domain), exterior }
    }

    pub fn infected(&self, x: Site) -> bool {
        let inside = self.domain.as_ref().is_none_or(|d| d.contains(x));
        if inside {
            return self.config.get(x).unwrap_or(false);
        }
        match self.exterior {
            Exterior::Healthy => false,
            Exterior::Infected => true,
            Exterior::Inherit => self.config.get(x).unwrap_or(false),
        }
    }
}

/// A segment that had no helping set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedSegment {
    /// tower level whose tube failed (0 for a bare tube check)
    pub level: usize,
    pub direction: usize,
    pub line: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// (level, offset in lattice steps) for every CBSEP level used
    pub cbsep_offsets: Vec<(usize, i64)>,
    /// sites of the helping set found for each checked segment
    pub helping_positions: Vec<Vec<Site>>,
    pub failed_segment: Option<FailedSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventOutcome {
    pub holds: bool,
    pub witness: Witness,
}
