use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::tower::{SgEvaluator, TowerSpec};
use super::{Exterior, View};
use crate::bootstrap::LineFrame;
use crate::error::Result;
use crate::lattice::{Configuration, Site, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxOutcome {
    pub good: bool,
    pub super_good: bool,
    /// translation of the tower's top droplet that is SG¹ inside the box
    pub sg_offset: Option<Site>,
}

/// Lateral range [lo, hi] of the line ⟨x,u⟩ = c inside the box.
fn lateral_range(lf: &LineFrame, c: i64, bx: &Window) -> Option<(i64, i64)> {
    let (mut lo, mut hi) = (i64::MIN, i64::MAX);
    // x = c·w + s·P must satisfy both coordinate bounds
    for (base, p, min, max) in [(c * lf.w.x, lf.p.x, bx.x_min, bx.x_max), (c * lf.w.y, lf.p.y, bx.y_min, bx.y_max)] {
        match p.signum() {
            0 => {
                if base < min || base > max {
                    return None;
                }
            }
            1 => {
                lo = lo.max(Integer::div_ceil(&(min - base), &p));
                hi = hi.min(Integer::div_floor(&(max - base), &p));
            }
            _ => {
                lo = lo.max(Integer::div_ceil(&(max - base), &p));
                hi = hi.min(Integer::div_floor(&(min - base), &p));
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Every discrete segment of `min_len` consecutive sites in the box that is
/// perpendicular to a frame direction holds a W-run.
fn all_segments_helped(view: &View, tower: &TowerSpec, bx: &Window, target: f64) -> bool {
    let f = &tower.frame;
    let w = tower.helping.w;
    for i in 0..2 * f.k() {
        // fewest sites spanning Euclidean length `target`
        let min_len = ((target / f.metrics[i].lambda).ceil().max(0.0) as usize + 1).max(w);
        let u = f.directions[i];
        let lf = LineFrame::new(u);
        let corners = [
            Site::new(bx.x_min, bx.y_min),
            Site::new(bx.x_min, bx.y_max),
            Site::new(bx.x_max, bx.y_min),
            Site::new(bx.x_max, bx.y_max),
        ];
        let cmin = corners.iter().map(|&x| u.dot(x)).min().unwrap();
        let cmax = corners.iter().map(|&x| u.dot(x)).max().unwrap();
        for c in cmin..=cmax {
            let Some((lo, hi)) = lateral_range(&lf, c, bx) else { continue };
            let len = (hi - lo + 1) as usize;
            if len < min_len {
                continue;
            }
            let sites: Vec<Site> = (lo..=hi).map(|s| lf.to_global(Site::new(c, s))).collect();
            let inf: Vec<bool> = sites.iter().map(|&x| view.infected(x)).collect();
            // next_run[p]: first start ≥ p of a W-run
            let mut next_run = vec![usize::MAX; len + 1];
            let mut run = 0;
            let mut starts = vec![false; len];
            for p in 0..len {
                run = if inf[p] { run + 1 } else { 0 };
                if run >= w {
                    starts[p + 1 - w] = true;
                }
            }
            for p in (0..len).rev() {
                next_run[p] = if starts[p] { p } else { next_run[p + 1] };
            }
            for a in 0..=len - min_len {
                if next_run[a] > a + min_len - w {
                    return false;
                }
            }
        }
    }
    true
}

/// Good: every segment in the box perpendicular to a frame direction, of
/// length at least ε·ℓ^{m−}, has a W-helping set. Super good: good and some
/// translate of the tower's top droplet inside the box is SG¹.
pub fn box_events(
    config: &Configuration,
    bx: &Window,
    tower: &TowerSpec,
    eps: f64,
    ell_m_minus: f64,
) -> Result<BoxOutcome> {
    let view = View::new(config, None, Exterior::Inherit);
    let good = all_segments_helped(&view, tower, bx, eps * ell_m_minus);
    let mut out = BoxOutcome { good, super_good: false, sg_offset: None };
    if !good {
        return Ok(out);
    }
    let Some(bw) = tower.top().bounding_window() else { return Ok(out) };
    let mut ev = SgEvaluator::new(config, tower);
    let top = tower.len();
    for dy in bx.y_min - bw.y_min..=bx.y_max - bw.y_max {
        for dx in bx.x_min - bw.x_min..=bx.x_max - bw.x_max {
            let x = Site::new(dx, dy);
            if ev.holds(top, x, Exterior::Healthy)? {
                out.super_good = true;
                out.sg_offset = Some(x);
                return Ok(out);
            }
        }
    }
    Ok(out)
}
