use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{is_unstable, stable_arcs, UpdateFamily};
use crate::bootstrap::{center_lateral, for_each_candidate_chunk, search_span, LineFrame, LineProbe, LocalVerdict};
use crate::error::{Error, Result};
use crate::lattice::{Direction, Site, Window};

/// Witness for a finite difficulty n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyCertificate {
    /// |Z| = n, in lattice coordinates
    pub z: Vec<Site>,
    /// Z + shift lies in the closure of H_u ∪ Z
    pub shift: Site,
    pub box_radius: i64,
    pub lateral_span: i64,
    /// (size, candidates examined) for every smaller size, all certified finite
    pub exhausted: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Difficulty {
    Zero,
    Finite {
        n: usize,
        certificate: DifficultyCertificate,
    },
    Infinite,
    /// no certificate in the box; `lower_bound` is the smallest size not
    /// ruled out, `upper_bound` a size known to work (if any)
    Inconclusive {
        lower_bound: usize,
        upper_bound: Option<usize>,
        search_box: Window,
    },
}

impl Difficulty {
    /// Numeric value, with `None` for infinity and for inconclusive searches.
    pub fn value(&self) -> Option<usize> {
        match self {
            Difficulty::Zero => Some(0),
            Difficulty::Finite { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Difficulty::Infinite)
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Difficulty::Inconclusive { .. })
    }

    /// Comparable key: finite values, then infinity. Inconclusive maps to its lower bound.
    pub fn lower(&self) -> u64 {
        match self {
            Difficulty::Zero => 0,
            Difficulty::Finite { n, .. } => *n as u64,
            Difficulty::Infinite => u64::MAX,
            Difficulty::Inconclusive { lower_bound, .. } => *lower_bound as u64,
        }
    }

    pub fn upper(&self) -> u64 {
        match self {
            Difficulty::Inconclusive { upper_bound, .. } => upper_bound.map_or(u64::MAX, |u| u as u64),
            d => d.lower(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyOptions {
    /// local box [0,B] × [-B,B] (depth, lateral) searched for Z
    pub box_radius: i64,
    /// lateral extent of the closure window; defaults to 8·(range + 2B)
    pub lateral_span: Option<i64>,
    /// largest size tried
    pub n_max: usize,
}

impl DifficultyOptions {
    pub fn new(box_radius: i64) -> Self {
        DifficultyOptions { box_radius, lateral_span: None, n_max: 4 }
    }
}

/// Difficulty of `u` with the default size limit.
pub fn difficulty(
    family: &UpdateFamily,
    u: Direction,
    box_radius: i64,
    lateral_span: Option<i64>,
) -> Result<Difficulty> {
    difficulty_with(family, u, DifficultyOptions { box_radius, lateral_span, n_max: 4 })
}

/// Smallest |Z| such that H_u ∪ Z grows infinitely, searched by increasing
/// size over a box next to the boundary line.
///
/// Candidate sets are taken up to translation along the line. A set is
/// accepted only with a translation certificate; a size is ruled out only if
/// every candidate of that size was certified finite.
pub fn difficulty_with(family: &UpdateFamily, u: Direction, opts: DifficultyOptions) -> Result<Difficulty> {
    if is_unstable(family, u) {
        return Ok(Difficulty::Zero);
    }
    let report = stable_arcs(family);
    if !report.is_isolated(u) {
        return Ok(Difficulty::Infinite);
    }
    let frame = LineFrame::new(u);
    let range = frame.local_family(family).range();
    let b = opts.box_radius;
    if b < family.range() {
        return Err(Error::InvalidArgument(format!("box radius {b} below the family range {}", family.range())));
    }
    let span = match opts.lateral_span {
        Some(s) if s < 4 * b => {
            return Err(Error::InvalidArgument(format!("lateral span {s} below 4 x box radius {b}")));
        }
        Some(s) => s.max(search_span(range, b)),
        None => search_span(range, b),
    };
    let search_box = Window::new(0, b, -b, b)?;
    let base = LineProbe::new(family, u, b, span / 2)?;
    let mut exhausted = Vec::new();
    let mut first_unresolved: Option<usize> = None;
    for n in 1..=opts.n_max {
        let mut examined = 0u64;
        let mut inconclusive = 0u64;
        let mut hit: Option<(Vec<Site>, i64)> = None;
        for_each_candidate_chunk(b, n, 2048, |chunk| {
            let verdicts: Vec<LocalVerdict> =
                chunk.par_iter().map_init(|| base.clone(), |p, z| p.probe(&center_lateral(z).0).verdict).collect();
            for (z, v) in chunk.iter().zip(verdicts) {
                examined += 1;
                match v {
                    LocalVerdict::Infinite(s) => {
                        hit = Some((z.clone(), s));
                        return true;
                    }
                    LocalVerdict::Inconclusive => inconclusive += 1,
                    LocalVerdict::Finite => {}
                }
            }
            false
        });
        if let Some((z, s)) = hit {
            if let Some(lower) = first_unresolved {
                return Ok(Difficulty::Inconclusive { lower_bound: lower, upper_bound: Some(n), search_box });
            }
            return Ok(Difficulty::Finite {
                n,
                certificate: DifficultyCertificate {
                    z: z.iter().map(|&l| frame.to_global(l)).collect(),
                    shift: frame.p * s,
                    box_radius: b,
                    lateral_span: span,
                    exhausted,
                },
            });
        }
        if inconclusive > 0 && first_unresolved.is_none() {
            first_unresolved = Some(n);
        }
        exhausted.push((n, examined));
    }
    Ok(Difficulty::Inconclusive {
        lower_bound: first_unresolved.unwrap_or(opts.n_max + 1),
        upper_bound: None,
        search_box,
    })
}
