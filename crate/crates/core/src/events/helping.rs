use std::sync::Arc;

use num_integer::Integer;

use super::{EventOutcome, FailedSegment, View, Witness};
use crate::bootstrap::{find_helping_generator, HelpingGenerator, LineFrame};
use crate::droplets::{DirectionFrame, Segment, Tube};
use crate::error::{Error, Result};
use crate::family::UpdateFamily;
use crate::lattice::Site;

/// Start index of a run of `w` infected segment sites lying at least `d`
/// sites from both ends.
pub fn find_w_run(view: &View, seg: &Segment, w: usize, d: usize) -> Option<usize> {
    let n = seg.sites.len();
    if w == 0 || n < 2 * d + w {
        return None;
    }
    let mut run = 0;
    for p in d..n - d {
        if view.infected(seg.sites[p]) {
            run += 1;
            if run == w {
                return Some(p + 1 - w);
            }
        } else {
            run = 0;
        }
    }
    None
}

pub fn has_w_helping(view: &View, seg: &Segment, w: usize, d: usize) -> bool {
    find_w_run(view, seg, w, d).is_some()
}

/// Per-direction helping data: generators Z_i, the common period Q and the
/// local patterns making up α-helping sets.
#[derive(Debug, Clone)]
pub struct HelpingContext {
    pub frame: Arc<DirectionFrame>,
    pub generators: Vec<Option<HelpingGenerator>>,
    pub w: usize,
    pub period: i64,
    /// None: no α-helping sets; Some(empty): vacuous
    patterns: Vec<Option<Vec<Vec<Site>>>>,
}

fn needs_generator(frame: &DirectionFrame, i: usize) -> bool {
    let a = frame.alpha_of(i);
    a > 0 && a <= frame.alpha
}

impl HelpingContext {
    pub fn new(frame: Arc<DirectionFrame>, generators: Vec<Option<HelpingGenerator>>, w: usize) -> Result<Self> {
        let n = frame.len();
        if generators.len() != n {
            return Err(Error::InvalidArgument(format!("{} generators for {n} directions", generators.len())));
        }
        if w == 0 {
            return Err(Error::InvalidArgument("W must be positive".into()));
        }
        for i in 0..n {
            match (&generators[i], needs_generator(&frame, i)) {
                (None, true) => {
                    return Err(Error::Precondition(format!(
                        "direction {} needs a helping generator",
                        frame.u(i as i64)
                    )))
                }
                (Some(g), true) if g.direction != frame.directions[i] => {
                    return Err(Error::InvalidArgument(format!("generator {i} is for {}", g.direction)));
                }
                _ => {}
            }
        }
        let k2 = 2 * frame.k();
        let mut patterns = Vec::with_capacity(n);
        let mut period = 1i64;
        let mut depth_need = 0.0f64;
        for i in 0..n {
            if frame.alpha_of(i) > frame.alpha {
                patterns.push(None);
                continue;
            }
            let lf = LineFrame::new(frame.directions[i]);
            let mut list = Vec::new();
            let j = (i + k2) % n;
            let mut add = |g: &HelpingGenerator, flip: bool| {
                let cells: Vec<Site> = g.z.iter().map(|&z| lf.to_local(if flip { -z } else { z })).collect();
                period = period.lcm(&g.q.max(1));
                let dmax = cells.iter().map(|c| c.x).max().unwrap_or(0);
                depth_need = depth_need.max(dmax as f64 / frame.metrics[i].lambda);
                list.push(cells);
            };
            if needs_generator(&frame, i) {
                add(generators[i].as_ref().unwrap(), false);
            }
            if needs_generator(&frame, j) {
                add(generators[j].as_ref().unwrap(), true);
            }
            patterns.push(Some(list));
        }
        // the slab ⟨z,u⟩ ∈ [0,Q] must hold the deepest pattern cell
        let base = period;
        while (period as f64) < depth_need - 1e-9 {
            period += base;
        }
        Ok(HelpingContext { frame, generators, w, period, patterns })
    }

    /// Generators found by search for every direction with 0 < α(u_i) ≤ α.
    pub fn for_family(family: &UpdateFamily, frame: Arc<DirectionFrame>, w: usize, box_radius: i64) -> Result<Self> {
        let gens = (0..frame.len())
            .map(|i| {
                if needs_generator(&frame, i) {
                    let n = frame.alpha_of(i) as usize;
                    find_helping_generator(family, frame.directions[i], n, box_radius).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        HelpingContext::new(frame, gens, w)
    }

    /// Local (depth, lateral) patterns of α-helping sets for direction i.
    pub fn alpha_patterns(&self, i: usize) -> Option<&[Vec<Site>]> {
        self.patterns[i].as_deref()
    }

    /// An infected helping set for the segment, trimmed by `d` lattice steps
    /// at both ends. Errors when the segment direction has infinite difficulty.
    pub fn find_helping(&self, view: &View, seg: &Segment, d: i64) -> Result<Option<Vec<Site>>> {
        let j = seg.direction;
        if !self.frame.is_finite(j) {
            return Err(Error::Precondition(format!("direction {} has infinite difficulty", self.frame.directions[j])));
        }
        let du = d.max(0) as usize;
        if let Some(p) = find_w_run(view, seg, self.w, du) {
            return Ok(Some(seg.sites[p..p + self.w].to_vec()));
        }
        let Some(pats) = &self.patterns[j] else { return Ok(None) };
        let lf = LineFrame::new(self.frame.directions[j]);
        let lam2 = self.frame.directions[j].lambda_sq();
        let wp = lf.w.dot(lf.p);
        let (lo, hi) = ((seg.lateral.0 + d) * lam2, (seg.lateral.1 - d) * lam2);
        let mut found = Vec::new();
        for pat in pats {
            // slab: depth ≤ Q·λ
            if pat.iter().any(|c| c.x < 0 || c.x * c.x > self.period * self.period * lam2) {
                return Ok(None);
            }
            let (mut tmin, mut tmax) = (i64::MIN, i64::MAX);
            for c in pat {
                let off = c.x * wp + c.y * lam2;
                tmin = tmin.max(Integer::div_ceil(&(lo - off), &lam2));
                tmax = tmax.min(Integer::div_floor(&(hi - off), &lam2));
            }
            if tmax < tmin || tmax - tmin + 1 < self.period {
                return Ok(None);
            }
            let mut need = self.period;
            let mut done = vec![false; self.period as usize];
            for t in tmin..=tmax {
                let r = t.rem_euclid(self.period) as usize;
                if done[r] {
                    continue;
                }
                let sites: Vec<Site> = pat.iter().map(|c| lf.to_global(Site::new(seg.line + c.x, c.y + t))).collect();
                if sites.iter().all(|&s| view.infected(s)) {
                    done[r] = true;
                    found.extend(sites);
                    need -= 1;
                    if need == 0 {
                        break;
                    }
                }
            }
            if need > 0 {
                return Ok(None);
            }
        }
        Ok(Some(found))
    }

    pub fn has_helping(&self, view: &View, seg: &Segment, d: i64) -> Result<bool> {
        Ok(self.find_helping(view, seg, d)?.is_some())
    }
}

/// (ω,d)-traversability of a tube, with segments trimmed by `trim + d`;
/// `symmetric` also asks for W-runs on segments facing hard directions.
pub fn is_traversable(
    view: &View,
    tube: &Tube,
    ctx: &HelpingContext,
    trim: i64,
    d: i64,
    symmetric: bool,
) -> Result<EventOutcome> {
    let f = tube.base.frame();
    let i = tube.direction;
    let window = f.window(i);
    if let Some(&j) = window.iter().find(|&&j| !f.is_finite(j)) {
        return Err(Error::Precondition(format!("direction {} in the tube window is not finite", f.directions[j])));
    }
    if symmetric && !f.all_finite() {
        return Err(Error::Precondition("symmetric traversability needs finitely many stable directions".into()));
    }
    let n = f.len();
    let k2 = 2 * f.k();
    let t = trim + d;
    let mut witness = Witness::default();
    for seg in tube.all_segments() {
        let fail = |w: &mut Witness| {
            w.failed_segment = Some(FailedSegment { level: 0, direction: seg.direction, line: seg.line });
        };
        match ctx.find_helping(view, &seg, t)? {
            Some(h) => witness.helping_positions.push(h),
            None => {
                fail(&mut witness);
                return Ok(EventOutcome { holds: false, witness });
            }
        }
        let j = seg.direction;
        if symmetric && f.alpha_of(j) <= f.alpha && f.alpha_of((j + k2) % n) > f.alpha {
            match find_w_run(view, &seg, ctx.w, t.max(0) as usize) {
                Some(p) => witness.helping_positions.push(seg.sites[p..p + ctx.w].to_vec()),
                None => {
                    fail(&mut witness);
                    return Ok(EventOutcome { holds: false, witness });
                }
            }
        }
    }
    Ok(EventOutcome { holds: true, witness })
}
