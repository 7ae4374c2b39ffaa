use std::cmp::Ordering;

use super::classify::INFINITE;
use super::{classify, ClassificationReport, ClassifyOptions, Criticality, StableComponent, UpdateFamily};
use crate::droplets::DirectionFrame;
use crate::error::{Error, Result};
use crate::lattice::{compare_clockwise, Direction};

const MAX_INSERTIONS: usize = 256;

/// Quasi-stable frame of a family, classifying it first.
pub fn quasi_stable_frame(family: &UpdateFamily) -> Result<DirectionFrame> {
    let report = classify(family, ClassifyOptions::default())?;
    quasi_stable_frame_from(family, &report)
}

/// Largest difficulty met by the open semicircle centred at `c`.
fn semicircle_max(report: &ClassificationReport, c: Direction) -> u64 {
    let a = c.rot_ccw();
    report
        .stability
        .components
        .iter()
        .filter(|comp| comp.meets_open_semicircle(a))
        .map(|comp| match comp {
            StableComponent::Isolated(d) => report.difficulty_of(*d).upper(),
            _ => INFINITE,
        })
        .max()
        .unwrap_or(0)
}

fn is_hard(report: &ClassificationReport, u: Direction, alpha: u64) -> bool {
    report.difficulty_of(u).lower() > alpha
}

/// Can the consecutive pair (u, v) stay adjacent in the frame?
fn pair_ok(family: &UpdateFamily, report: &ClassificationReport, u: Direction, v: Direction) -> bool {
    if family.rules.iter().any(|r| r.iter().all(|&x| u.dot(x) <= 0 && v.dot(x) <= 0)) {
        return true;
    }
    // every direction strictly between u and v stable: the open arc must lie
    // inside one stable component
    if u == v {
        return false;
    }
    report.stability.components.iter().any(|c| match *c {
        StableComponent::FullCircle => true,
        StableComponent::Arc { start, end } => {
            c.contains(u) && c.contains(v) && {
                // u before v inside the arc, measured clockwise from its start
                compare_clockwise(u, v, start) != Ordering::Greater
                    && compare_clockwise(v, end, start) != Ordering::Greater
            }
        }
        StableComponent::Isolated(_) => false,
    })
}

fn rotations(d: Direction) -> [Direction; 4] {
    [d, d.rot_cw(), d.opposite(), d.rot_ccw()]
}

/// Frame built from an existing classification.
pub fn quasi_stable_frame_from(family: &UpdateFamily, report: &ClassificationReport) -> Result<DirectionFrame> {
    let alpha = match (report.criticality, report.alpha.exact()) {
        (Some(Criticality::Subcritical), _) => {
            return Err(Error::Precondition("subcritical families have no quasi-stable frame".into()));
        }
        (Some(_), Some(a)) => a,
        _ => return Err(Error::Precondition("classification is unresolved".into())),
    };
    let stab = &report.stability;

    let key = |d: &Direction| (d.lambda_sq(), d.dx(), d.dy());
    let pick = |cands: &[Direction]| -> Option<Direction> {
        let ok: Vec<Direction> = cands.iter().copied().filter(|&c| semicircle_max(report, c) <= alpha).collect();
        let preferred: Vec<Direction> = ok.iter().copied().filter(|c| is_hard(report, c.rot_ccw(), alpha)).collect();
        let pool = if preferred.is_empty() { ok } else { preferred };
        pool.into_iter().min_by_key(key)
    };

    let axes = [Direction::WEST, Direction::NORTH, Direction::EAST, Direction::SOUTH];
    let on_axes = family.vectors().all(|x| x.x == 0 || x.y == 0);
    if on_axes {
        if let Some(u0) = pick(&axes) {
            return DirectionFrame::from_report(rotations(u0).to_vec(), report);
        }
    }

    // candidate centres: stable directions, their quarter turns, event midpoints
    let mut events: Vec<Direction> = stab.isolated.iter().chain(&stab.semi_isolated).copied().collect();
    events.extend(stab.critical_directions.iter().copied());
    events.extend(axes);
    let mut cands: Vec<Direction> = events.iter().flat_map(|&d| rotations(d)).collect();
    cands.push(report.alpha.witness_midpoint);
    cands.sort_by(|a, b| compare_clockwise(*a, *b, Direction::NORTH));
    cands.dedup();
    let mids: Vec<Direction> = (0..cands.len()).map(|i| cands[i].cw_midpoint(cands[(i + 1) % cands.len()])).collect();
    cands.extend(mids);
    let u0 = pick(&cands).ok_or_else(|| Error::SearchFailed("no centre with all difficulties at most α".into()))?;

    let mut set: Vec<Direction> = stab.isolated.iter().chain(&stab.semi_isolated).copied().collect();
    set.push(u0);
    let mut set: Vec<Direction> = set.into_iter().flat_map(rotations).collect();
    let sort = |v: &mut Vec<Direction>| {
        v.sort_by(|a, b| compare_clockwise(*a, *b, u0));
        v.dedup();
    };
    sort(&mut set);
    let mut inserted = 0;
    loop {
        let n = set.len();
        let bad = (0..n).find(|&i| !pair_ok(family, report, set[i], set[(i + 1) % n]));
        let Some(i) = bad else { break };
        if inserted >= MAX_INSERTIONS {
            return Err(Error::SearchFailed(format!("frame repair needed more than {MAX_INSERTIONS} insertions")));
        }
        let m = set[i].cw_midpoint(set[(i + 1) % n]);
        set.extend(rotations(m));
        sort(&mut set);
        inserted += 1;
    }
    DirectionFrame::from_report(set, report)
}
