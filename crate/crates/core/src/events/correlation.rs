use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{has_w_helping, View};
use crate::bootstrap::closure;
use crate::droplets::Segment;
use crate::error::{Error, Result};
use crate::family::zoo;
use crate::lattice::{BoundaryCondition, Configuration, SeededStream, Site, Window};

use super::estimate::sample_configuration;

pub type Event = Box<dyn Fn(&Configuration) -> bool + Sync + Send>;

/// A named pair of events, both increasing in the infected set.
pub struct EventPair {
    pub name: String,
    pub a: Event,
    pub b: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarrisResult {
    pub name: String,
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
    /// p_ab − p_a·p_b
    pub cov: f64,
    pub std_err: f64,
}

impl HarrisResult {
    /// No negative correlation beyond `sigmas` standard errors.
    pub fn passes(&self, sigmas: f64) -> bool {
        self.cov >= -sigmas * self.std_err
    }
}

/// Monte Carlo estimate of Cov(1_A, 1_B) under the product law.
pub fn harris_check(
    window: Window,
    boundary: BoundaryCondition,
    q: f64,
    samples: u64,
    stream: SeededStream,
    pair: &EventPair,
) -> Result<HarrisResult> {
    if samples < 100 {
        return Err(Error::InvalidArgument("at least 100 samples are required".into()));
    }
    let draws: Vec<(bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i).rng();
            let c = sample_configuration(window, boundary.clone(), q, &mut rng);
            ((pair.a)(&c), (pair.b)(&c))
        })
        .collect();
    let n = samples as f64;
    let p_a = draws.iter().filter(|d| d.0).count() as f64 / n;
    let p_b = draws.iter().filter(|d| d.1).count() as f64 / n;
    let p_ab = draws.iter().filter(|d| d.0 && d.1).count() as f64 / n;
    let cov = p_ab - p_a * p_b;
    let terms: Vec<f64> =
        draws.iter().map(|&(a, b)| (f64::from(u8::from(a)) - p_a) * (f64::from(u8::from(b)) - p_b)).collect();
    let var = terms.iter().map(|t| (t - cov).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(HarrisResult { name: pair.name.clone(), p_a, p_b, p_ab, cov, std_err: (var / n).sqrt() })
}

fn row(y: i64, x0: i64, x1: i64) -> Segment {
    Segment {
        direction: 1,
        line: y,
        m: 0.into(),
        lateral: (x0, x1),
        sites: (x0..=x1).map(|x| Site::new(x, y)).collect(),
    }
}

fn column(x: i64, y0: i64, y1: i64) -> Segment {
    Segment {
        direction: 0,
        line: x,
        m: 0.into(),
        lateral: (y0, y1),
        sites: (y0..=y1).map(|y| Site::new(x, y)).collect(),
    }
}

fn run_event(seg: Segment, w: usize) -> Event {
    Box::new(move |c| has_w_helping(&View::whole(c), &seg, w, 0))
}

fn site_event(s: Site) -> Event {
    Box::new(move |c| c.get(s).unwrap_or(false))
}

fn closure_event(family: &str, s: Site) -> Event {
    let f = zoo::get(family).expect("zoo family");
    Box::new(move |c| closure(&f, c).map(|r| r.final_config.get(s).unwrap_or(false)).unwrap_or(false))
}

fn count_event(k: usize) -> Event {
    Box::new(move |c| c.count_infected() >= k)
}

/// Twenty pairs of increasing events on the 6×6 window [0,5]²: runs on
/// rows and columns, single sites, infection counts and bootstrap closures.
pub fn standard_pairs() -> Vec<EventPair> {
    let mut v: Vec<EventPair> = Vec::new();
    let mut push = |name: &str, a: Event, b: Event| v.push(EventPair { name: name.to_string(), a, b });
    push("row0-w2/col0-w2", run_event(row(0, 0, 5), 2), run_event(column(0, 0, 5), 2));
    push("row0-w2/row1-w2", run_event(row(0, 0, 5), 2), run_event(row(1, 0, 5), 2));
    push("row2-w3/col3-w3", run_event(row(2, 0, 5), 3), run_event(column(3, 0, 5), 3));
    push("row0-w2/row0-w3", run_event(row(0, 0, 5), 2), run_event(row(0, 0, 5), 3));
    push("row5-w1/col5-w1", run_event(row(5, 0, 5), 1), run_event(column(5, 0, 5), 1));
    push("row3-w2/col2-w2", run_event(row(3, 0, 5), 2), run_event(column(2, 0, 5), 2));
    push("row0-left-w2/row0-right-w2", run_event(row(0, 0, 3), 2), run_event(row(0, 2, 5), 2));
    push("site(0,0)/row0-w2", site_event(Site::new(0, 0)), run_event(row(0, 0, 5), 2));
    push("site(2,2)/col2-w2", site_event(Site::new(2, 2)), run_event(column(2, 0, 5), 2));
    push("site(1,1)/site(1,2)", site_event(Site::new(1, 1)), site_event(Site::new(1, 2)));
    push("count>=12/row4-w2", count_event(12), run_event(row(4, 0, 5), 2));
    push("count>=10/count>=14", count_event(10), count_event(14));
    push("count>=11/site(3,3)", count_event(11), site_event(Site::new(3, 3)));
    push("fa2f(0,0)/fa2f(5,5)", closure_event("fa2f", Site::new(0, 0)), closure_event("fa2f", Site::new(5, 5)));
    push("fa2f(2,2)/row2-w2", closure_event("fa2f", Site::new(2, 2)), run_event(row(2, 0, 5), 2));
    push("fa2f(3,3)/count>=12", closure_event("fa2f", Site::new(3, 3)), count_event(12));
    push("duarte(0,3)/duarte(5,3)", closure_event("duarte", Site::new(0, 3)), closure_event("duarte", Site::new(5, 3)));
    push("duarte(2,2)/col2-w2", closure_event("duarte", Site::new(2, 2)), run_event(column(2, 0, 5), 2));
    push("fa2f(1,4)/duarte(4,1)", closure_event("fa2f", Site::new(1, 4)), closure_event("duarte", Site::new(4, 1)));
    push("col1-w3/col4-w3", run_event(column(1, 0, 5), 3), run_event(column(4, 0, 5), 3));
    v
}
