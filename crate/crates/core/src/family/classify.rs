use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{
    difficulty_with, stable_arcs, Difficulty, DifficultyOptions, StabilityReport, StableComponent, UpdateFamily,
};
use crate::error::Result;
use crate::lattice::{compare_clockwise, Direction};

pub const INFINITE: u64 = u64::MAX;

/// The family difficulty α, as an interval when some direction is unresolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDifficulty {
    pub lower: u64,
    pub upper: u64,
    /// the witness is the open clockwise half-turn starting at `witness_start`
    pub witness_start: Direction,
    pub witness_midpoint: Direction,
}

impl FamilyDifficulty {
    pub fn exact(&self) -> Option<u64> {
        (self.lower == self.upper).then_some(self.lower)
    }

    pub fn render(&self) -> String {
        let f = |v: u64| if v == INFINITE { "inf".to_string() } else { v.to_string() };
        match self.exact() {
            Some(v) => f(v),
            None => format!("[{}, {}]", f(self.lower), f(self.upper)),
        }
    }
}

fn component_bounds(c: &StableComponent, per_direction: &[(Direction, Difficulty)]) -> (u64, u64) {
    match c {
        StableComponent::Isolated(d) => per_direction
            .iter()
            .find(|(u, _)| u == d)
            .map(|(_, v)| (v.lower(), v.upper()))
            // missing entries are unknown: anything from 1 to infinity
            .unwrap_or((1, INFINITE)),
        _ => (INFINITE, INFINITE),
    }
}

/// α = min over open semicircles C of max_{u∈C} α(u).
///
/// The max is piecewise constant in the position of the semicircle, changing
/// only when an endpoint crosses a stable direction, an arc endpoint or an
/// antipode of one; every such event and one point of each gap between
/// events is tried as a starting direction.
pub fn family_difficulty(report: &StabilityReport, per_direction: &[(Direction, Difficulty)]) -> FamilyDifficulty {
    let mut events: Vec<Direction> = Vec::new();
    for c in &report.components {
        match *c {
            StableComponent::Isolated(d) => events.extend([d, d.opposite()]),
            StableComponent::Arc { start, end } => events.extend([start, start.opposite(), end, end.opposite()]),
            StableComponent::FullCircle => {}
        }
    }
    events.sort_by(|a, b| compare_clockwise(*a, *b, Direction::NORTH));
    events.dedup();
    let mut starts = events.clone();
    for i in 0..events.len() {
        starts.push(events[i].cw_midpoint(events[(i + 1) % events.len()]));
    }
    starts.extend([Direction::NORTH, Direction::EAST, Direction::SOUTH, Direction::WEST]);

    let bounds: Vec<(StableComponent, (u64, u64))> =
        report.components.iter().map(|c| (*c, component_bounds(c, per_direction))).collect();
    let mut best: Option<(u64, u64, Direction)> = None;
    let mut lower = INFINITE;
    for a in starts {
        let mut lo = 0;
        let mut hi = 0;
        for (c, (l, h)) in &bounds {
            if c.meets_open_semicircle(a) {
                lo = lo.max(*l);
                hi = hi.max(*h);
            }
        }
        lower = lower.min(lo);
        let mid = |d: Direction| d.rot_cw();
        let better = match best {
            None => true,
            Some((bl, bh, ba)) => {
                (hi, lo)
                    .cmp(&(bh, bl))
                    .then_with(|| mid(a).lambda_sq().cmp(&mid(ba).lambda_sq()))
                    .then_with(|| (mid(a).dx(), mid(a).dy()).cmp(&(mid(ba).dx(), mid(ba).dy())))
                    == Ordering::Less
            }
        };
        if better {
            best = Some((lo, hi, a));
        }
    }
    let (_, upper, a) = best.expect("at least the axes are tried");
    FamilyDifficulty { lower, upper, witness_start: a, witness_midpoint: a.rot_cw() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criticality {
    Supercritical,
    Critical,
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefinedClass {
    SupercriticalRooted,
    SupercriticalUnrooted,
    AUnbalancedInfinite,
    BBalancedInfinite,
    CUnbalancedRootedFinite,
    DUnbalancedUnrooted,
    EBalancedRootedFinite,
    FSemiDirected,
    GIsotropic,
    Subcritical,
}

impl RefinedClass {
    /// Letter of a critical class.
    pub fn letter(self) -> Option<char> {
        Some(match self {
            RefinedClass::AUnbalancedInfinite => 'a',
            RefinedClass::BBalancedInfinite => 'b',
            RefinedClass::CUnbalancedRootedFinite => 'c',
            RefinedClass::DUnbalancedUnrooted => 'd',
            RefinedClass::EBalancedRootedFinite => 'e',
            RefinedClass::FSemiDirected => 'f',
            RefinedClass::GIsotropic => 'g',
            _ => return None,
        })
    }

    /// (β, γ, δ) in E[τ_0] = exp(Θ(1) q^{-αβ} log^γ(1/q) (log log(1/q))^δ).
    pub fn exponents(self) -> Option<(u32, u32, u32)> {
        Some(match self {
            RefinedClass::AUnbalancedInfinite => (2, 4, 0),
            RefinedClass::BBalancedInfinite => (2, 0, 0),
            RefinedClass::CUnbalancedRootedFinite => (1, 3, 0),
            RefinedClass::DUnbalancedUnrooted => (1, 2, 0),
            RefinedClass::EBalancedRootedFinite => (1, 1, 0),
            RefinedClass::FSemiDirected => (1, 0, 1),
            RefinedClass::GIsotropic => (1, 0, 0),
            _ => return None,
        })
    }

    pub fn describe(self) -> &'static str {
        match self {
            RefinedClass::SupercriticalRooted => "supercritical rooted",
            RefinedClass::SupercriticalUnrooted => "supercritical unrooted",
            RefinedClass::AUnbalancedInfinite => "unbalanced, infinitely many stable directions",
            RefinedClass::BBalancedInfinite => "balanced, infinitely many stable directions",
            RefinedClass::CUnbalancedRootedFinite => "unbalanced rooted, finitely many stable directions",
            RefinedClass::DUnbalancedUnrooted => "unbalanced unrooted",
            RefinedClass::EBalancedRootedFinite => "balanced rooted, finitely many stable directions",
            RefinedClass::FSemiDirected => "semi-directed",
            RefinedClass::GIsotropic => "isotropic",
            RefinedClass::Subcritical => "subcritical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardSummary {
    pub isolated: Vec<Direction>,
    pub arcs: Vec<StableComponent>,
    pub rooted: bool,
    pub unbalanced: bool,
}

impl HardSummary {
    pub fn count_isolated(&self) -> usize {
        self.isolated.len()
    }

    pub fn is_empty(&self) -> bool {
        self.isolated.is_empty() && self.arcs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub family: String,
    pub stability: StabilityReport,
    pub difficulties: Vec<(Direction, Difficulty)>,
    pub alpha: FamilyDifficulty,
    /// None when an inconclusive difficulty leaves the answer open
    pub criticality: Option<Criticality>,
    pub refined: Option<RefinedClass>,
    pub exponents: Option<(u32, u32, u32)>,
    pub hard: Option<HardSummary>,
}

impl ClassificationReport {
    pub fn unresolved(&self) -> bool {
        self.refined.is_none()
    }

    pub fn difficulty_of(&self, u: Direction) -> Difficulty {
        if let Some((_, d)) = self.difficulties.iter().find(|(v, _)| *v == u) {
            return d.clone();
        }
        if self.stability.is_stable(u) {
            // non-isolated stable directions
            Difficulty::Infinite
        } else {
            Difficulty::Zero
        }
    }

    /// One-line summary such as "critical, α=1, class (a), exponents (2,4,0)".
    pub fn summary(&self) -> String {
        match (self.criticality, self.refined) {
            (Some(Criticality::Critical), Some(c)) => {
                let (b, g, d) = c.exponents().unwrap();
                format!("critical, α={}, class ({}), exponents ({b},{g},{d})", self.alpha.render(), c.letter().unwrap())
            }
            (Some(Criticality::Supercritical), Some(c)) => c.describe().to_string(),
            (Some(Criticality::Subcritical), _) => "subcritical, no exponents".to_string(),
            _ => format!("unresolved, α in {}", self.alpha.render()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// initial search box radius; defaults to family range + 2
    pub box_radius: Option<i64>,
    /// the radius is doubled on inconclusive searches up to this cap
    pub box_radius_cap: Option<i64>,
    pub n_max: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { box_radius: None, box_radius_cap: None, n_max: 4 }
    }
}

fn hard_summary(report: &StabilityReport, per: &[(Direction, Difficulty)], alpha: u64) -> Option<HardSummary> {
    let mut isolated = vec![];
    let mut arcs = vec![];
    for c in &report.components {
        match c {
            StableComponent::Isolated(d) => {
                let (lo, hi) = component_bounds(c, per);
                if lo > alpha {
                    isolated.push(*d);
                } else if hi > alpha {
                    return None;
                }
            }
            _ => {
                if alpha != INFINITE {
                    arcs.push(*c);
                }
            }
        }
    }
    let comps: Vec<StableComponent> =
        isolated.iter().map(|d| StableComponent::Isolated(*d)).chain(arcs.iter().copied()).collect();
    let rooted = !arcs.is_empty() || isolated.iter().any(|p| isolated.iter().any(|q| q != p && *q != p.opposite()));
    let unbalanced = comps.iter().any(|a| comps.iter().any(|b| a.meets(&b.opposite())));
    Some(HardSummary { isolated, arcs, rooted, unbalanced })
}

/// Stability, difficulties, α and the refined universality class.
pub fn classify(family: &UpdateFamily, options: ClassifyOptions) -> Result<ClassificationReport> {
    let stability = stable_arcs(family);
    let start = options.box_radius.unwrap_or(family.range() + 2).max(family.range());
    let cap = options.box_radius_cap.unwrap_or(4 * (family.range() + 4)).max(start);
    let mut difficulties = Vec::new();
    for &u in &stability.isolated {
        let mut b = start;
        let d = loop {
            let d = difficulty_with(
                family,
                u,
                DifficultyOptions { box_radius: b, lateral_span: None, n_max: options.n_max },
            )?;
            if !d.is_inconclusive() || b >= cap {
                break d;
            }
            b = (2 * b).min(cap);
        };
        difficulties.push((u, d));
    }
    let alpha = family_difficulty(&stability, &difficulties);
    let mut report = ClassificationReport {
        family: family.name.clone(),
        stability,
        difficulties,
        alpha,
        criticality: None,
        refined: None,
        exponents: None,
        hard: None,
    };
    let Some(a) = alpha.exact() else { return Ok(report) };
    let criticality = match a {
        0 => Criticality::Supercritical,
        INFINITE => Criticality::Subcritical,
        _ => Criticality::Critical,
    };
    report.criticality = Some(criticality);
    if criticality == Criticality::Subcritical {
        report.refined = Some(RefinedClass::Subcritical);
        return Ok(report);
    }
    let Some(hard) = hard_summary(&report.stability, &report.difficulties, a) else { return Ok(report) };
    let finite = report.stability.finitely_many();
    let class = match criticality {
        Criticality::Supercritical if hard.rooted => RefinedClass::SupercriticalRooted,
        Criticality::Supercritical => RefinedClass::SupercriticalUnrooted,
        _ if !finite && hard.unbalanced => RefinedClass::AUnbalancedInfinite,
        _ if !finite => RefinedClass::BBalancedInfinite,
        _ if hard.unbalanced && hard.rooted => RefinedClass::CUnbalancedRootedFinite,
        _ if hard.unbalanced => RefinedClass::DUnbalancedUnrooted,
        _ if hard.rooted => RefinedClass::EBalancedRootedFinite,
        _ if hard.count_isolated() == 1 => RefinedClass::FSemiDirected,
        _ => RefinedClass::GIsotropic,
    };
    report.refined = Some(class);
    report.exponents = class.exponents();
    report.hard = Some(hard);
    Ok(report)
}
