use serde::{Deserialize, Serialize};

use super::{is_unstable, UpdateFamily};
use crate::lattice::{arc_contains, compare_clockwise, Direction};

/// A connected component of the (closed) set of stable directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StableComponent {
    Isolated(Direction),
    /// closed arc from `start` clockwise to `end`
    Arc {
        start: Direction,
        end: Direction,
    },
    FullCircle,
}

impl StableComponent {
    pub fn contains(&self, u: Direction) -> bool {
        match *self {
            StableComponent::Isolated(d) => d == u,
            StableComponent::Arc { start, end } => arc_contains(start, end, u),
            StableComponent::FullCircle => true,
        }
    }

    /// Does the component meet the open clockwise half-turn starting at `a`?
    pub fn meets_open_semicircle(&self, a: Direction) -> bool {
        match *self {
            StableComponent::Isolated(d) => a.open_cw_semicircle_contains(d),
            StableComponent::Arc { start, end } => {
                a.open_cw_semicircle_contains(start)
                    || a.open_cw_semicircle_contains(end)
                    || arc_contains(start, end, a.rot_cw())
            }
            StableComponent::FullCircle => true,
        }
    }

    /// Does the component meet the closed clockwise half-turn starting at `a`?
    pub fn meets_closed_semicircle(&self, a: Direction) -> bool {
        match *self {
            StableComponent::Isolated(d) => a.closed_cw_semicircle_contains(d),
            StableComponent::Arc { start, end } => {
                a.closed_cw_semicircle_contains(start)
                    || a.closed_cw_semicircle_contains(end)
                    || arc_contains(start, end, a)
            }
            StableComponent::FullCircle => true,
        }
    }

    /// Do two components share a direction?
    pub fn meets(&self, other: &StableComponent) -> bool {
        match (*self, *other) {
            (StableComponent::FullCircle, _) | (_, StableComponent::FullCircle) => true,
            (StableComponent::Isolated(d), o) | (o, StableComponent::Isolated(d)) => o.contains(d),
            (StableComponent::Arc { start: s1, end: e1 }, StableComponent::Arc { start: s2, .. }) => {
                arc_contains(s1, e1, s2) || other.contains(s1)
            }
        }
    }

    pub fn opposite(&self) -> StableComponent {
        match *self {
            StableComponent::Isolated(d) => StableComponent::Isolated(d.opposite()),
            StableComponent::Arc { start, end } => {
                StableComponent::Arc { start: start.opposite(), end: end.opposite() }
            }
            StableComponent::FullCircle => StableComponent::FullCircle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// components in clockwise order of their first direction, from north
    pub components: Vec<StableComponent>,
    pub isolated: Vec<Direction>,
    pub semi_isolated: Vec<Direction>,
    /// all directions perpendicular to some rule vector, clockwise from north
    pub critical_directions: Vec<Direction>,
}

impl StabilityReport {
    pub fn is_stable(&self, u: Direction) -> bool {
        self.components.iter().any(|c| c.contains(u))
    }

    pub fn is_isolated(&self, u: Direction) -> bool {
        self.isolated.contains(&u)
    }

    /// True when there are finitely many stable directions.
    pub fn finitely_many(&self) -> bool {
        self.components.iter().all(|c| matches!(c, StableComponent::Isolated(_)))
    }

    pub fn arcs(&self) -> impl Iterator<Item = &StableComponent> {
        self.components.iter().filter(|c| !matches!(c, StableComponent::Isolated(_)))
    }
}

fn sort_clockwise(v: &mut Vec<Direction>) {
    v.sort_by(|a, b| compare_clockwise(*a, *b, Direction::NORTH));
    v.dedup();
}

/// Stable set of a family as a union of isolated points and closed arcs.
///
/// Stability can only change at directions orthogonal to a rule vector, so
/// the circle is cut at those directions; each open piece is decided at one
/// interior direction and each cut point on its own.
pub fn stable_arcs(family: &UpdateFamily) -> StabilityReport {
    let mut cuts: Vec<Direction> = family
        .vectors()
        .flat_map(|x| {
            let d = Direction::of(x).expect("rule vectors are nonzero").rot_cw();
            [d, d.opposite()]
        })
        .collect();
    sort_clockwise(&mut cuts);
    let m = cuts.len();
    // elements: cut 0, gap 0, cut 1, gap 1, ...; gap i lies between cut i and cut i+1
    let stable: Vec<bool> = (0..2 * m)
        .map(|e| {
            let u = if e % 2 == 0 { cuts[e / 2] } else { cuts[e / 2].cw_midpoint(cuts[(e / 2 + 1) % m]) };
            !is_unstable(family, u)
        })
        .collect();

    let mut report = StabilityReport {
        components: vec![],
        isolated: vec![],
        semi_isolated: vec![],
        critical_directions: cuts.clone(),
    };
    if stable.iter().all(|&s| s) {
        report.components.push(StableComponent::FullCircle);
        return report;
    }
    let first_unstable = stable.iter().position(|&s| !s).unwrap();
    let mut e = first_unstable + 1;
    let end = first_unstable + 2 * m;
    while e < end {
        if !stable[e % (2 * m)] {
            e += 1;
            continue;
        }
        let start = e;
        while e + 1 < end && stable[(e + 1) % (2 * m)] {
            e += 1;
        }
        debug_assert!(start % 2 == 0 && e % 2 == 0, "stable set is closed");
        let (a, b) = (cuts[(start % (2 * m)) / 2], cuts[(e % (2 * m)) / 2]);
        if start == e {
            report.components.push(StableComponent::Isolated(a));
            report.isolated.push(a);
        } else {
            report.components.push(StableComponent::Arc { start: a, end: b });
            report.semi_isolated.extend([a, b]);
        }
        e += 1;
    }
    let key = |c: &StableComponent| match *c {
        StableComponent::Isolated(d) | StableComponent::Arc { start: d, .. } => d,
        StableComponent::FullCircle => Direction::NORTH,
    };
    report.components.sort_by(|a, b| compare_clockwise(key(a), key(b), Direction::NORTH));
    sort_clockwise(&mut report.isolated);
    sort_clockwise(&mut report.semi_isolated);
    report
}
