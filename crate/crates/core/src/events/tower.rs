use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::helping::{is_traversable, HelpingContext};
use super::{EventOutcome, Exterior, FailedSegment, View, Witness};
use crate::bootstrap::min_w;
use crate::droplets::{desk_schedule, DirectionFrame, Droplet, ScaleSchedule, ScheduleOverrides, Tube};
use crate::error::{Error, Result};
use crate::family::{
    classify, quasi_stable_frame_from, ClassificationReport, ClassifyOptions, RefinedClass, UpdateFamily,
};
use crate::lattice::{Configuration, Direction, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    East,
    Cbsep,
}

/// One extension by l = steps·λ_i in direction u_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    pub direction: usize,
    pub steps: i64,
    /// the d in (ω,d)-traversability of the step's tubes
    pub offset_d: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseEvent {
    FullyInfected,
    /// Λ \ Λ(r − W·1) infected
    InfectedRing(i64),
}

/// A base droplet event plus an ordered list of extensions.
#[derive(Debug, Clone)]
pub struct TowerSpec {
    pub frame: Arc<DirectionFrame>,
    pub base_event: BaseEvent,
    pub steps: Vec<Step>,
    pub helping: HelpingContext,
    /// C² in the traversability trim
    pub trim: i64,
    pub schedule: Option<ScaleSchedule>,
    levels: Vec<Droplet>,
}

impl TowerSpec {
    pub fn new(
        base: Droplet,
        base_event: BaseEvent,
        steps: Vec<Step>,
        helping: HelpingContext,
        trim: i64,
        schedule: Option<ScaleSchedule>,
    ) -> Result<Self> {
        let frame = base.frame().clone();
        if helping.frame.directions != frame.directions {
            return Err(Error::InvalidArgument("helping context uses another frame".into()));
        }
        if trim < 0 {
            return Err(Error::InvalidArgument("trim must be nonnegative".into()));
        }
        if let BaseEvent::InfectedRing(w) = base_event {
            if w <= 0 {
                return Err(Error::InvalidArgument("ring thickness must be positive".into()));
            }
        }
        let mut levels = vec![base];
        for s in &steps {
            if s.direction >= frame.len() || s.steps <= 0 || s.offset_d < 0 {
                return Err(Error::InvalidArgument(format!("bad step {s:?}")));
            }
            match s.kind {
                StepKind::Cbsep if !frame.all_finite() => {
                    return Err(Error::Precondition(
                        "CBSEP steps need every frame direction to have finite difficulty".into(),
                    ));
                }
                StepKind::East => {
                    if let Some(j) = frame.window(s.direction).into_iter().find(|&j| !frame.is_finite(j)) {
                        return Err(Error::Precondition(format!(
                            "East step towards {} meets the infinite direction {}",
                            frame.directions[s.direction], frame.directions[j]
                        )));
                    }
                }
                _ => {}
            }
            let next = levels.last().unwrap().extend(s.direction, s.steps);
            levels.push(next);
        }
        Ok(TowerSpec { frame, base_event, steps, helping, trim, schedule, levels })
    }

    pub fn levels(&self) -> &[Droplet] {
        &self.levels
    }

    pub fn base(&self) -> &Droplet {
        &self.levels[0]
    }

    pub fn top(&self) -> &Droplet {
        self.levels.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same tower shifted by x.
    pub fn translate(&self, x: Site) -> TowerSpec {
        TowerSpec { levels: self.levels.iter().map(|d| d.translate(x)).collect(), ..self.clone() }
    }
}

/// Memoised evaluation of SG events on one configuration.
///
/// SG¹ at a given level depends only on the translate of the level droplet,
/// so results are cached per (level, offset).
pub struct SgEvaluator<'a> {
    config: &'a Configuration,
    tower: &'a TowerSpec,
    memo: HashMap<(usize, Site), bool>,
}

impl<'a> SgEvaluator<'a> {
    pub fn new(config: &'a Configuration, tower: &'a TowerSpec) -> Self {
        SgEvaluator { config, tower, memo: HashMap::new() }
    }

    fn view(&self, level: usize, offset: Site, exterior: Exterior) -> View<'a> {
        View::new(self.config, Some(self.tower.levels[level].translate(offset)), exterior)
    }

    fn step_vec(&self, i: usize) -> Site {
        self.tower.frame.directions[i].vector()
    }

    /// SG at `level` for the droplet translated by `offset`.
    pub fn holds(&mut self, level: usize, offset: Site, exterior: Exterior) -> Result<bool> {
        if exterior == Exterior::Healthy {
            if let Some(&v) = self.memo.get(&(level, offset)) {
                return Ok(v);
            }
        }
        let v = self.eval(level, offset, exterior, None, None)?;
        if exterior == Exterior::Healthy {
            self.memo.insert((level, offset), v);
        }
        Ok(v)
    }

    fn base_holds(&self, offset: Site) -> bool {
        let d = self.tower.levels[0].translate(offset);
        let view = View::new(self.config, Some(d.clone()), Exterior::Healthy);
        match self.tower.base_event {
            BaseEvent::FullyInfected => d.points().into_iter().all(|x| view.infected(x)),
            BaseEvent::InfectedRing(w) => d.ring(w).into_iter().all(|x| view.infected(x)),
        }
    }

    fn tube_ok(
        &self,
        view: &View,
        tube: &Tube,
        d: i64,
        symmetric: bool,
        level: usize,
        wit: Option<&mut Witness>,
    ) -> Result<bool> {
        let out = is_traversable(view, tube, &self.tower.helping, self.tower.trim, d, symmetric)?;
        if let Some(w) = wit {
            if out.holds {
                w.helping_positions.extend(out.witness.helping_positions);
            } else if w.failed_segment.is_none() {
                w.failed_segment = out.witness.failed_segment.map(|f| FailedSegment { level, ..f });
            }
        }
        Ok(out.holds)
    }

    /// One level; `forced` pins CBSEP offsets, `wit` collects the witness.
    fn eval(
        &mut self,
        level: usize,
        offset: Site,
        exterior: Exterior,
        forced: Option<&HashMap<usize, i64>>,
        mut wit: Option<&mut Witness>,
    ) -> Result<bool> {
        if level == 0 {
            return Ok(self.base_holds(offset));
        }
        let step = self.tower.steps[level - 1];
        let view = self.view(level, offset, exterior);
        let tower = self.tower;
        let inner = |off: Site| tower.levels[level - 1].translate(off);
        match step.kind {
            StepKind::East => {
                let ok = if wit.is_some() || forced.is_some() {
                    self.eval(level - 1, offset, Exterior::Healthy, forced, wit.as_deref_mut())?
                } else {
                    self.holds(level - 1, offset, Exterior::Healthy)?
                };
                if !ok {
                    return Ok(false);
                }
                let tube = Tube::new(inner(offset), step.direction, step.steps)?;
                self.tube_ok(&view, &tube, step.offset_d, false, level, wit)
            }
            StepKind::Cbsep => {
                let k2 = 2 * self.tower.frame.k();
                let n = self.tower.frame.len();
                let back = (step.direction + k2) % n;
                let xs: Vec<i64> = match forced.and_then(|f| f.get(&level)) {
                    Some(&x) => vec![x],
                    None => (0..=step.steps).collect(),
                };
                for x in xs {
                    if !(0..=step.steps).contains(&x) {
                        return Ok(false);
                    }
                    let off = offset + self.step_vec(step.direction) * x;
                    if !self.holds(level - 1, off, Exterior::Healthy)? {
                        continue;
                    }
                    let d = inner(off);
                    let mut ok = true;
                    if step.steps - x > 0 {
                        let t = Tube::new(d.clone(), step.direction, step.steps - x)?;
                        ok = self.tube_ok(&view, &t, step.offset_d, true, level, None)?;
                    }
                    if ok && x > 0 {
                        let t = Tube::new(d.clone(), back, x)?;
                        ok = self.tube_ok(&view, &t, step.offset_d, true, level, None)?;
                    }
                    if !ok {
                        continue;
                    }
                    if let Some(w) = wit.as_deref_mut() {
                        // replay the winning offset to collect its witness
                        w.cbsep_offsets.push((level, x));
                        self.eval(level - 1, off, Exterior::Healthy, forced, Some(w))?;
                        if step.steps - x > 0 {
                            let t = Tube::new(d.clone(), step.direction, step.steps - x)?;
                            self.tube_ok(&view, &t, step.offset_d, true, level, Some(w))?;
                        }
                        if x > 0 {
                            let t = Tube::new(d, back, x)?;
                            self.tube_ok(&view, &t, step.offset_d, true, level, Some(w))?;
                        }
                    } else if forced.is_some() && !self.eval(level - 1, off, Exterior::Healthy, forced, None)? {
                        continue;
                    }
                    return Ok(true);
                }
                Ok(false)
            }
        }
    }
}

/// SG^ω at `level` of the tower, for ω given by `exterior` outside the level
/// droplet. Inner droplets always see the all-healthy exterior.
pub fn sg_check(config: &Configuration, tower: &TowerSpec, level: usize, exterior: Exterior) -> Result<EventOutcome> {
    if level > tower.len() {
        return Err(Error::InvalidArgument(format!("level {level} above the tower height {}", tower.len())));
    }
    let mut ev = SgEvaluator::new(config, tower);
    let holds = ev.holds(level, Site::ORIGIN, exterior)?;
    let mut witness = Witness::default();
    // the witness pass either re-derives success or locates a failing tube
    ev.eval(level, Site::ORIGIN, exterior, None, Some(&mut witness))?;
    if holds {
        witness.failed_segment = None;
    }
    Ok(EventOutcome { holds, witness })
}

/// Re-verify an SG outcome from its witness: CBSEP offsets are pinned and
/// every recorded helping site must be infected.
pub fn replay_witness(
    config: &Configuration,
    tower: &TowerSpec,
    level: usize,
    exterior: Exterior,
    witness: &Witness,
) -> Result<bool> {
    let forced: HashMap<usize, i64> = witness.cbsep_offsets.iter().copied().collect();
    let view = View::new(config, Some(tower.levels[level].clone()), exterior);
    if !witness.helping_positions.iter().flatten().all(|&x| view.infected(x)) {
        return Ok(false);
    }
    let mut ev = SgEvaluator::new(config, tower);
    ev.eval(level, Site::ORIGIN, exterior, Some(&forced), None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TowerKind {
    Iso,
    UnbalancedInternal,
    UnbalancedMeso,
    SemidirectedInternal,
}

impl std::str::FromStr for TowerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "iso" => TowerKind::Iso,
            "unbalanced_internal" => TowerKind::UnbalancedInternal,
            "unbalanced_meso" => TowerKind::UnbalancedMeso,
            "semidirected_internal" => TowerKind::SemidirectedInternal,
            _ => return Err(Error::InvalidArgument(format!("unknown tower kind {s:?}"))),
        })
    }
}

/// Desk-scale knobs for `build_tower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerOptions {
    /// doubling rounds for iso towers
    pub rounds: usize,
    /// scaled radius of the iso base droplet (all directions)
    pub base_radius: i64,
    /// side of the ring base, replacing ℓ^i
    pub ring_side: Option<i64>,
    /// (first, second) pass side targets of the meso tower, replacing ℓ^{m∓}
    pub meso_sides: Option<(f64, f64)>,
    /// no level droplet may have a side longer than this
    pub max_side: f64,
    /// traversability trim, replacing C²
    pub trim: Option<i64>,
    pub generator_box: i64,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            rounds: 2,
            base_radius: 1,
            ring_side: None,
            meso_sides: None,
            max_side: 40.0,
            trim: None,
            generator_box: 4,
        }
    }
}

/// Droplet with about `side` lattice points across each pair of opposite sides.
fn square_like(frame: &Arc<DirectionFrame>, side: i64) -> Result<Droplet> {
    let n = frame.len();
    let k2 = n / 2;
    let mut radii = vec![0i64; n];
    for i in 0..k2 {
        let total = ((side - 1).max(0) as f64 * frame.metrics[i].lambda).round() as i64;
        radii[i] = total / 2;
        radii[i + k2] = total - total / 2;
    }
    Droplet::from_integer_radii(frame.clone(), &radii)
}

fn class_error(report: &ClassificationReport, kind: TowerKind) -> Error {
    Error::Precondition(format!("{kind:?} towers do not apply to {}", report.summary()))
}

fn max_side(d: &Droplet) -> f64 {
    d.side_lengths().into_iter().fold(0.0, f64::max)
}

/// Build the desk-scale tower of the given kind.
pub fn build_tower(
    kind: TowerKind,
    family: &UpdateFamily,
    report: &ClassificationReport,
    frame: Arc<DirectionFrame>,
    schedule: &ScaleSchedule,
    opts: &TowerOptions,
) -> Result<TowerSpec> {
    use RefinedClass::*;
    let class = report.refined.ok_or_else(|| class_error(report, kind))?;
    let ok = match kind {
        TowerKind::Iso => class == GIsotropic,
        TowerKind::UnbalancedInternal => {
            matches!(class, AUnbalancedInfinite | CUnbalancedRootedFinite | DUnbalancedUnrooted)
        }
        TowerKind::UnbalancedMeso => {
            matches!(class, CUnbalancedRootedFinite | DUnbalancedUnrooted) && frame.all_finite()
        }
        TowerKind::SemidirectedInternal => matches!(class, FSemiDirected | EBalancedRootedFinite),
    };
    if !ok {
        return Err(class_error(report, kind));
    }
    let w = schedule.w as usize;
    let helping = HelpingContext::for_family(family, frame.clone(), w, opts.generator_box)?;
    let trim = opts.trim.unwrap_or((schedule.c * schedule.c).round() as i64);
    let k = frame.k();
    let cbsep = |i: usize, t: i64| Step { kind: StepKind::Cbsep, direction: i, steps: t, offset_d: 0 };
    let ring_side = || -> i64 {
        let s = opts.ring_side.unwrap_or(schedule.ell_i.round() as i64);
        s.min(opts.max_side as i64).max(1)
    };
    let (base, event, steps) = match kind {
        TowerKind::Iso => {
            let base = Droplet::from_integer_radii(frame.clone(), &vec![opts.base_radius; frame.len()])?;
            let mut cur = base.clone();
            let mut steps = Vec::new();
            'rounds: for _ in 0..opts.rounds {
                for i in 0..2 * k {
                    // doubling the sides parallel to u_i
                    let s = cur.side_lengths()[(i + k) % frame.len()];
                    let t = ((s / frame.metrics[i].lambda).round() as i64).max(1);
                    let next = cur.extend(i, t);
                    if max_side(&next) > opts.max_side {
                        break 'rounds;
                    }
                    steps.push(cbsep(i, t));
                    cur = next;
                }
            }
            (base, BaseEvent::FullyInfected, steps)
        }
        TowerKind::UnbalancedInternal => (square_like(&frame, ring_side())?, BaseEvent::InfectedRing(w as i64), vec![]),
        TowerKind::UnbalancedMeso => {
            let base = square_like(&frame, ring_side())?;
            let (t1, t2) = opts
                .meso_sides
                .unwrap_or((schedule.ell_m_minus.min(opts.max_side / 2.0), schedule.ell_m_plus.min(opts.max_side)));
            let mut cur = base.clone();
            let mut steps = Vec::new();
            for target in [t1.min(opts.max_side), t2.min(opts.max_side)] {
                for i in 0..2 * k {
                    let s = cur.side_lengths()[(i + k) % frame.len()];
                    let t = ((target - s) / frame.metrics[i].lambda).round() as i64;
                    if t <= 0 {
                        continue;
                    }
                    let next = cur.extend(i, t);
                    if max_side(&next) > opts.max_side + 1e-9 {
                        continue;
                    }
                    steps.push(cbsep(i, t));
                    cur = next;
                }
            }
            (base, BaseEvent::InfectedRing(w as i64), steps)
        }
        TowerKind::SemidirectedInternal => {
            let axes = [Direction::WEST, Direction::NORTH, Direction::EAST, Direction::SOUTH];
            if k != 1 || !frame.directions.iter().all(|d| axes.contains(d)) {
                return Err(Error::Precondition("semi-directed towers need the axes frame".into()));
            }
            let lv = &schedule.levels;
            let base = square_like(&frame, lv[0] as i64)?;
            let mut steps = Vec::new();
            for n in 0..lv.len().saturating_sub(1) {
                if lv[n + 1] as f64 - 1.0 > opts.max_side {
                    break;
                }
                let t = lv[n + 1] as i64 - lv[n] as i64;
                for j in 0..2 {
                    steps.push(Step { kind: StepKind::East, direction: j, steps: t, offset_d: 0 });
                }
            }
            (base, BaseEvent::FullyInfected, steps)
        }
    };
    TowerSpec::new(base, event, steps, helping, trim, Some(schedule.clone()))
}

/// A tower together with the classification and schedule it was built from.
#[derive(Debug, Clone)]
pub struct TowerSetup {
    pub report: ClassificationReport,
    pub frame: Arc<DirectionFrame>,
    pub schedule: ScaleSchedule,
    pub tower: TowerSpec,
}

/// Classify, build the quasi-stable frame, derive W from the frame's finite
/// directions and the desk schedule at density q, then build the tower.
pub fn prepare_tower(
    family: &UpdateFamily,
    kind: TowerKind,
    q: f64,
    opts: &TowerOptions,
    overrides: ScheduleOverrides,
) -> Result<TowerSetup> {
    let report = classify(family, ClassifyOptions::default())?;
    let alpha = report
        .alpha
        .exact()
        .filter(|&a| a != u64::MAX)
        .ok_or_else(|| Error::Precondition(format!("towers need a finite exact α, got {}", report.summary())))?;
    let frame = Arc::new(quasi_stable_frame_from(family, &report)?);
    let finite: Vec<Direction> =
        (0..frame.len()).filter(|&i| frame.is_finite(i)).map(|i| frame.directions[i]).collect();
    let w = if overrides.w.is_some() { 1 } else { min_w(family, &finite, 16)?.max as u64 };
    let schedule = desk_schedule(q, alpha, w, overrides)?;
    let tower = build_tower(kind, family, &report, frame.clone(), &schedule, opts)?;
    Ok(TowerSetup { report, frame, schedule, tower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::droplets::{desk_schedule, ScheduleOverrides};
    use crate::family::{classify, quasi_stable_frame_from, zoo, ClassifyOptions};
    use crate::lattice::{BoundaryCondition, Window};

    fn setup(name: &str) -> (UpdateFamily, ClassificationReport, Arc<DirectionFrame>) {
        let f = zoo::get(name).unwrap();
        let rep = classify(&f, ClassifyOptions::default()).unwrap();
        let frame = Arc::new(quasi_stable_frame_from(&f, &rep).unwrap());
        (f, rep, frame)
    }

    fn full(d: &Droplet) -> Configuration {
        let w = d.bounding_window().unwrap().grow(2);
        Configuration::from_sites(w, BoundaryCondition::AllHealthy, d.points()).unwrap()
    }

    #[test]
    fn fa2f_iso_rounds_double_the_sides() {
        let (f, rep, frame) = setup("fa2f");
        let sched = desk_schedule(0.2, 1, 1, ScheduleOverrides::default()).unwrap();
        let opts = TowerOptions { rounds: 3, max_side: 100.0, trim: Some(1), ..Default::default() };
        let t = build_tower(TowerKind::Iso, &f, &rep, frame, &sched, &opts).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.steps.iter().all(|s| s.kind == StepKind::Cbsep));
        assert_eq!(t.steps.iter().map(|s| s.direction).collect::<Vec<_>>(), vec![0, 1, 0, 1, 0, 1]);
        let widths: Vec<f64> = t.levels().iter().step_by(2).map(|d| d.side_lengths()[1]).collect();
        assert_eq!(widths, vec![2.0, 4.0, 8.0, 16.0]);
        let c = full(t.top());
        for lvl in 0..=t.len() {
            let top = t.translate(Site::ORIGIN);
            assert!(sg_check(&c, &top, lvl, Exterior::Healthy).unwrap().holds);
        }
    }

    #[test]
    fn unbalanced_ring_base() {
        let (f, rep, frame) = setup("duarte");
        let sched = desk_schedule(0.2, 1, 2, ScheduleOverrides { w: Some(2), ..Default::default() }).unwrap();
        let opts = TowerOptions { ring_side: Some(12), ..Default::default() };
        let t = build_tower(TowerKind::UnbalancedInternal, &f, &rep, frame, &sched, &opts).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.base().points().len(), 144);
        let ring = t.base().ring(2);
        assert_eq!(ring.len(), 144 - 64);
        let c = Configuration::from_sites(Window::centered(10), BoundaryCondition::AllHealthy, ring.clone()).unwrap();
        assert!(sg_check(&c, &t, 0, Exterior::Healthy).unwrap().holds);
        let c2 =
            Configuration::from_sites(Window::centered(10), BoundaryCondition::AllHealthy, ring[1..].to_vec()).unwrap();
        assert!(!sg_check(&c2, &t, 0, Exterior::Healthy).unwrap().holds);
        // CBSEP towers need finitely many stable directions
        let err = build_tower(TowerKind::UnbalancedMeso, &f, &rep, t.frame.clone(), &sched, &opts);
        assert!(err.is_err());
        assert!(build_tower(TowerKind::Iso, &f, &rep, t.frame.clone(), &sched, &opts).is_err());
    }

    #[test]
    fn semidirected_levels() {
        let (f, rep, frame) = setup("semi_directed");
        let sched =
            desk_schedule(0.2, rep.alpha.exact().unwrap(), 2, ScheduleOverrides { w: Some(2), ..Default::default() })
                .unwrap();
        let opts = TowerOptions { max_side: 16.0, trim: Some(0), ..Default::default() };
        let t = build_tower(TowerKind::SemidirectedInternal, &f, &rep, frame, &sched, &opts).unwrap();
        assert!(t.steps.iter().all(|s| s.kind == StepKind::East));
        let sides: Vec<usize> = t.levels().iter().step_by(2).map(|d| d.bounding_window().unwrap().width()).collect();
        assert_eq!(&sides[..4], &[1, 2, 4, 8]);
    }

    #[test]
    fn cbsep_witness_offset() {
        let (f, _, frame) = setup("fa2f");
        let base = Droplet::from_integer_radii(frame.clone(), &[0, 0, 0, 0]).unwrap();
        let helping = HelpingContext::for_family(&f, frame.clone(), 2, 3).unwrap();
        let steps = vec![Step { kind: StepKind::Cbsep, direction: 0, steps: 4, offset_d: 0 }];
        let t = TowerSpec::new(base, BaseEvent::FullyInfected, steps, helping, 0, None).unwrap();
        // top droplet: x ∈ [-4, 0], y = 0; offset x puts the core at (-x, 0)
        let mk = |xs: &[i64]| {
            Configuration::from_sites(
                Window::centered(6),
                BoundaryCondition::AllHealthy,
                xs.iter().map(|&x| Site::new(x, 0)),
            )
            .unwrap()
        };
        let c = mk(&[-2, -3, -4, -1, 0]);
        let out = sg_check(&c, &t, 1, Exterior::Healthy).unwrap();
        assert!(out.holds);
        assert_eq!(out.witness.cbsep_offsets, vec![(1, 0)]);
        assert_eq!(out.witness.helping_positions.len(), 4);
        assert!(replay_witness(&c, &t, 1, Exterior::Healthy, &out.witness).unwrap());
        assert!(!sg_check(&mk(&[-2]), &t, 1, Exterior::Healthy).unwrap().holds);
        // helping sets on one side of every possible core only
        assert!(!sg_check(&mk(&[-2, -3, -4, -1]), &t, 1, Exterior::Healthy).unwrap().holds);
        let c = mk(&[-2, -3, -4, -1, 0]);
        let mut w = out.witness.clone();
        w.cbsep_offsets = vec![(1, 2)];
        assert!(replay_witness(&c, &t, 1, Exterior::Healthy, &w).unwrap());
        assert!(!replay_witness(&mk(&[-2, -3, -4, -1]), &t, 1, Exterior::Healthy, &w).unwrap());
    }
}
