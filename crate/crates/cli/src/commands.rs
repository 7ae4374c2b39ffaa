use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use kcmlab_core::bootstrap::closure as run_closure;
use kcmlab_core::droplets::{ScheduleOverrides, Segment};
use kcmlab_core::events::{
    estimate_probability, harris_check, has_w_helping, prepare_tower, sg_check, standard_pairs, BaseEvent, Exterior,
    TowerKind, TowerOptions, View,
};
use kcmlab_core::family::{classify as run_classify, zoo, ClassifyOptions, Difficulty, StableComponent, UpdateFamily};
use kcmlab_core::io::{encode_grid, parse_sites, sites_to_json};
use kcmlab_core::kcm::{estimate_tau0, sample_tau0, ExactSystem, SimConfig, TauEstimate};
use kcmlab_core::stats::{w_run_lower_bound, w_run_probability};
use kcmlab_core::{BoundaryCondition, Configuration, SeededStream, Site, Window};

use crate::manifest::{csv_text, emit, ExperimentManifest};
use crate::{Outcome, SimArgs};

/// A family file path, or the name of a bundled family.
pub fn load_family(name: &str) -> Result<UpdateFamily> {
    let p = Path::new(name);
    if p.exists() {
        let text = fs::read_to_string(p).with_context(|| format!("cannot read {name}"))?;
        return UpdateFamily::from_json(&text).with_context(|| format!("in {name}"));
    }
    zoo::get(name).ok_or_else(|| anyhow!("{name} is neither a file nor a bundled family ({})", zoo::NAMES.join(", ")))
}

fn describe_difficulty(d: &Difficulty) -> (String, String) {
    match d {
        Difficulty::Zero => ("0".into(), "unstable".into()),
        Difficulty::Finite { n, certificate } => {
            let z: Vec<String> = certificate.z.iter().map(Site::to_string).collect();
            (n.to_string(), format!("Z = {{{}}}, shift {}", z.join(", "), certificate.shift))
        }
        Difficulty::Infinite => ("inf".into(), "non-isolated".into()),
        Difficulty::Inconclusive { lower_bound, upper_bound, search_box } => (
            format!("inconclusive [{lower_bound}, {}]", upper_bound.map_or("inf".into(), |u| u.to_string())),
            format!(
                "search box [{}, {}] x [{}, {}]",
                search_box.x_min, search_box.x_max, search_box.y_min, search_box.y_max
            ),
        ),
    }
}

pub fn classify(family: &str, box_radius: Option<i64>, json: bool) -> Result<Outcome> {
    let f = load_family(family)?;
    let rep = run_classify(&f, ClassifyOptions { box_radius, ..Default::default() })?;
    if json {
        println!("{}", serde_json::to_string_pretty(&rep)?);
    } else {
        let mut out = String::new();
        writeln!(out, "family       {}", rep.family)?;
        let arcs: Vec<String> = rep
            .stability
            .components
            .iter()
            .map(|c| match c {
                StableComponent::Isolated(d) => format!("{d}"),
                StableComponent::Arc { start, end } => format!("arc {start} to {end} clockwise"),
                StableComponent::FullCircle => "every direction".to_string(),
            })
            .collect();
        writeln!(out, "stable       {}", if arcs.is_empty() { "none".into() } else { arcs.join("; ") })?;
        for (u, d) in &rep.difficulties {
            let (v, cert) = describe_difficulty(d);
            writeln!(out, "{:<12} {v:<8} {cert}", format!("alpha{u}"))?;
        }
        writeln!(out, "alpha        {}", rep.alpha.render())?;
        writeln!(out, "class        {}", rep.summary())?;
        print!("{out}");
    }
    let inconclusive = rep.unresolved() || rep.difficulties.iter().any(|(_, d)| d.is_inconclusive());
    Ok(if inconclusive { Outcome::Inconclusive } else { Outcome::Ok })
}

pub fn closure(
    family: &str,
    initial: &Path,
    window: Option<Vec<i64>>,
    margin: i64,
    out: Option<&Path>,
) -> Result<Outcome> {
    let f = load_family(family)?;
    let text = fs::read_to_string(initial).with_context(|| format!("cannot read {}", initial.display()))?;
    let sites = parse_sites(&text).with_context(|| format!("in {}", initial.display()))?;
    let w = match window {
        Some(v) => Window::new(v[0], v[1], v[2], v[3])?,
        None => Window::bounding(sites.iter().copied()).unwrap_or(Window::centered(0)).grow(margin.max(0)),
    };
    let config = Configuration::from_sites(w, BoundaryCondition::AllHealthy, sites)?;
    let res = run_closure(&f, &config)?;
    let list = sites_to_json(&res.final_config.infected_sites()) + "\n";
    let grid = encode_grid(&res.final_config);
    match out {
        None => print!("{list}{grid}"),
        Some(p) => {
            let m = ExperimentManifest::new("closure", Some(family), None)
                .param("initial", initial.display())
                .param("window", format!("{} {} {} {}", w.x_min, w.x_max, w.y_min, w.y_max))
                .param("rounds", res.rounds);
            let mut gp = p.as_os_str().to_owned();
            gp.push(".grid");
            fs::write(PathBuf::from(gp), &grid)?;
            emit(m, Some(p), |_| Ok(list))?;
        }
    }
    Ok(Outcome::Ok)
}

fn sim_config(a: &SimArgs, family: &UpdateFamily, q: f64) -> Result<SimConfig> {
    let cfg = match a.system.as_str() {
        "torus" => SimConfig::torus(family.clone(), q, a.l, a.tmax, a.seed, a.replicates)?,
        "single-site" => SimConfig::frozen(
            family.clone(),
            q,
            Window::centered(0),
            BoundaryCondition::AllInfected,
            Site::ORIGIN,
            a.tmax,
            a.seed,
            a.replicates,
        )?,
        s => {
            let n: i64 = s
                .strip_prefix("chain:")
                .and_then(|n| n.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| anyhow!("unknown system {s:?}; expected torus, single-site or chain:N"))?;
            SimConfig::frozen(
                family.clone(),
                q,
                Window::new(0, n - 1, 0, 0)?,
                BoundaryCondition::AllInfected,
                Site::new(n - 1, 0),
                a.tmax,
                a.seed,
                a.replicates,
            )?
        }
    };
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn sim_manifest(kind: &str, a: &SimArgs) -> ExperimentManifest {
    let qs: Vec<String> = a.q.iter().map(f64::to_string).collect();
    ExperimentManifest::new(kind, Some(&a.family), Some(a.seed))
        .param("q", qs.join(","))
        .param("L", a.l)
        .param("t_max", a.tmax)
        .param("replicates", a.replicates)
        .param("system", &a.system)
}

pub fn simulate(a: &SimArgs) -> Result<Outcome> {
    let f = load_family(&a.family)?;
    let mut rows = Vec::new();
    for &q in &a.q {
        let cfg = sim_config(a, &f, q)?;
        for (i, s) in sample_tau0(&cfg)?.iter().enumerate() {
            rows.push(vec![
                f.name.clone(),
                q.to_string(),
                cfg.window.width().to_string(),
                a.tmax.to_string(),
                a.seed.to_string(),
                i.to_string(),
                s.time().to_string(),
                u8::from(s.is_censored()).to_string(),
                s.rings_processed.to_string(),
            ]);
        }
    }
    emit(sim_manifest("simulate", a), a.out.as_deref(), |h| {
        csv_text(
            h,
            "q probability; L sites; t_max and tau in model time; rings_processed count",
            &["family", "q", "L", "t_max", "seed", "replicate", "tau", "censored", "rings_processed"],
            &rows,
        )
    })?;
    Ok(Outcome::Ok)
}

pub const ESTIMATE_HEADER: [&str; 11] = [
    "family",
    "q",
    "L",
    "t_max",
    "replicates",
    "seed",
    "mean_tau",
    "ci_low",
    "ci_high",
    "censored",
    "effective_events_total",
];

pub fn estimate(a: &SimArgs, plot: Option<&Path>) -> Result<Outcome> {
    let f = load_family(&a.family)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &q in &a.q {
        let cfg = sim_config(a, &f, q)?;
        let e: TauEstimate = estimate_tau0(&cfg)?;
        if cfg.boundary != BoundaryCondition::Torus && cfg.window.len() <= 20 && q > 0.0 && q < 1.0 {
            let exact = ExactSystem::new(&f, cfg.window, cfg.boundary.clone(), q)?.exact_tau0(cfg.target);
            match exact {
                Ok(v) => eprintln!("q={q}: exact mean {v}"),
                Err(err) => eprintln!("q={q}: no exact mean ({err})"),
            }
        }
        if e.censored > 0 {
            eprintln!("warning: q={q}: {} censored replicates; the mean is a lower bound", e.censored);
        }
        points.push((q, e.mean));
        rows.push(vec![
            f.name.clone(),
            q.to_string(),
            cfg.window.width().to_string(),
            a.tmax.to_string(),
            e.replicates.to_string(),
            a.seed.to_string(),
            e.mean.to_string(),
            e.ci_low.to_string(),
            e.ci_high.to_string(),
            e.censored.to_string(),
            e.effective_events_total.to_string(),
        ]);
    }
    emit(sim_manifest("estimate", a), a.out.as_deref(), |h| {
        csv_text(
            h,
            "q probability; L sites; t_max, mean_tau, ci_low, ci_high in model time; censored and events counts",
            &ESTIMATE_HEADER,
            &rows,
        )
    })?;
    if let Some(p) = plot {
        let alpha = run_classify(&f, ClassifyOptions::default())?.alpha.exact().filter(|&a| a < u64::MAX).unwrap_or(1);
        fs::write(p, crate::plot::svg(&f.name, alpha, &points))?;
    }
    Ok(Outcome::Ok)
}

pub struct EventArgs {
    pub family: Option<String>,
    pub mode: String,
    pub tower: String,
    pub q: f64,
    pub samples: u64,
    pub seed: u64,
    pub length: usize,
    pub w: Option<usize>,
    pub rounds: usize,
    pub trim: Option<i64>,
    pub ring_side: Option<i64>,
    pub max_side: f64,
    pub out: Option<PathBuf>,
}

pub const EVENTS_HEADER: [&str; 10] =
    ["event", "level", "sites", "q", "samples", "hits", "p_hat", "ci_low", "ci_high", "exact"];

pub fn events(a: EventArgs) -> Result<Outcome> {
    if !(0.0..=1.0).contains(&a.q) {
        bail!("q = {} outside [0,1]", a.q);
    }
    let stream = SeededStream::new(a.seed, 0);
    let mut m = ExperimentManifest::new("events", a.family.as_deref(), Some(a.seed))
        .param("mode", &a.mode)
        .param("q", a.q)
        .param("samples", a.samples);
    let mut failed = false;
    let text_rows: (Vec<&str>, Vec<Vec<String>>, &str) = match a.mode.as_str() {
        "tower" => {
            let fam = a.family.as_deref().ok_or_else(|| anyhow!("tower mode needs a family"))?;
            let f = load_family(fam)?;
            let kind: TowerKind = a.tower.parse()?;
            let opts = TowerOptions {
                rounds: a.rounds,
                trim: a.trim,
                ring_side: a.ring_side,
                max_side: a.max_side,
                ..Default::default()
            };
            let overrides = ScheduleOverrides { w: a.w.map(|w| w as u64), ..Default::default() };
            let setup = prepare_tower(&f, kind, a.q, &opts, overrides)?;
            m = m
                .param("tower", &a.tower)
                .param("rounds", a.rounds)
                .param("w", setup.schedule.w)
                .param("trim", setup.tower.trim)
                .param("max_side", a.max_side);
            let tower = &setup.tower;
            let mut rows = Vec::new();
            for n in 0..=tower.len() {
                let d = &tower.levels()[n];
                let win = d.bounding_window().ok_or_else(|| anyhow!("empty level droplet"))?;
                let est = estimate_probability(
                    win,
                    BoundaryCondition::AllHealthy,
                    a.q,
                    a.samples,
                    stream.substream(n as u64),
                    |c| sg_check(c, tower, n, Exterior::Healthy).map(|o| o.holds).unwrap_or(false),
                )?;
                let exact = match (n, &tower.base_event) {
                    (0, BaseEvent::FullyInfected) => a.q.powi(d.points().len() as i32).to_string(),
                    (0, BaseEvent::InfectedRing(w)) => a.q.powi(d.ring(*w).len() as i32).to_string(),
                    _ => String::new(),
                };
                rows.push(vec![
                    format!("sg-{}", a.tower),
                    n.to_string(),
                    d.points().len().to_string(),
                    a.q.to_string(),
                    est.samples.to_string(),
                    est.hits.to_string(),
                    est.p_hat.to_string(),
                    est.ci_low.to_string(),
                    est.ci_high.to_string(),
                    exact,
                ]);
            }
            (EVENTS_HEADER.to_vec(), rows, "q, p_hat, ci_low, ci_high, exact probabilities; sites and samples counts")
        }
        "segment" => {
            let w = a.w.unwrap_or(2);
            let n = a.length as i64;
            if n < 1 {
                bail!("segment length must be positive");
            }
            m = m.param("length", n).param("w", w);
            let win = Window::new(0, n - 1, 0, 0)?;
            let seg = Segment {
                direction: 1,
                line: 0,
                m: 0.into(),
                lateral: (0, n - 1),
                sites: (0..n).map(|x| Site::new(x, 0)).collect(),
            };
            let est = estimate_probability(win, BoundaryCondition::AllHealthy, a.q, a.samples, stream, |c| {
                has_w_helping(&View::whole(c), &seg, w, 0)
            })?;
            let exact = w_run_probability(a.length, w, a.q);
            eprintln!("lower bound 1-(1-q^W)^floor(n/W) = {}", w_run_lower_bound(a.length, w, a.q));
            let row = vec![
                format!("w-run-{w}"),
                "0".into(),
                a.length.to_string(),
                a.q.to_string(),
                est.samples.to_string(),
                est.hits.to_string(),
                est.p_hat.to_string(),
                est.ci_low.to_string(),
                est.ci_high.to_string(),
                exact.to_string(),
            ];
            (
                EVENTS_HEADER.to_vec(),
                vec![row],
                "q, p_hat, ci_low, ci_high, exact probabilities; sites and samples counts",
            )
        }
        "harris" => {
            let win = Window::new(0, 5, 0, 5)?;
            let mut rows = Vec::new();
            for (i, pair) in standard_pairs().iter().enumerate() {
                let r =
                    harris_check(win, BoundaryCondition::AllHealthy, a.q, a.samples, stream.substream(i as u64), pair)?;
                let ok = r.passes(4.0);
                failed |= !ok;
                rows.push(vec![
                    r.name.clone(),
                    r.p_a.to_string(),
                    r.p_b.to_string(),
                    r.p_ab.to_string(),
                    r.cov.to_string(),
                    r.std_err.to_string(),
                    u8::from(ok).to_string(),
                ]);
            }
            (
                vec!["pair", "p_a", "p_b", "p_ab", "cov", "std_err", "ok"],
                rows,
                "probabilities and covariance; ok is 1 when cov >= -4 std_err",
            )
        }
        other => bail!("unknown events mode {other:?}; expected tower, segment or harris"),
    };
    let (header, rows, units) = text_rows;
    emit(m, a.out.as_deref(), |h| csv_text(h, units, &header, &rows))?;
    Ok(if failed { Outcome::Failed } else { Outcome::Ok })
}
