//! Integer lattice geometry: sites, rational directions, half-planes,
//! windows, boundary conditions and configurations.
//!
//! Convention used everywhere: `true` means infected (state 0 in the
//! usual KCM notation), `false` means healthy.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl From<[i64; 2]> for Site {
    fn from(v: [i64; 2]) -> Self {
        Site { x: v[0], y: v[1] }
    }
}

impl From<Site> for [i64; 2] {
    fn from(s: Site) -> Self {
        [s.x, s.y]
    }
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    pub fn dot(self, o: Site) -> i64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2d cross product.
    pub fn cross(self, o: Site) -> i64 {
        self.x * o.y - self.y * o.x
    }

    pub fn chebyshev(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn norm_sq(self) -> i64 {
        self.dot(self)
    }

    /// Rotation by -π/2: (x, y) -> (y, -x).
    pub fn rot_cw(self) -> Site {
        Site::new(self.y, -self.x)
    }

    pub fn rot_ccw(self) -> Site {
        Site::new(-self.y, self.x)
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site::new(-self.x, -self.y)
    }
}

impl Mul<i64> for Site {
    type Output = Site;
    fn mul(self, k: i64) -> Site {
        Site::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A rational direction of the circle, stored as its primitive integer vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Direction {
    dx: i64,
    dy: i64,
}

impl TryFrom<[i64; 2]> for Direction {
    type Error = Error;
    fn try_from(v: [i64; 2]) -> Result<Self> {
        Direction::new(v[0], v[1])
    }
}

impl From<Direction> for [i64; 2] {
    fn from(d: Direction) -> Self {
        [d.dx, d.dy]
    }
}

impl Direction {
    pub const NORTH: Direction = Direction { dx: 0, dy: 1 };
    pub const EAST: Direction = Direction { dx: 1, dy: 0 };
    pub const SOUTH: Direction = Direction { dx: 0, dy: -1 };
    pub const WEST: Direction = Direction { dx: -1, dy: 0 };

    /// Rejects the zero vector and non-primitive vectors.
    pub fn new(dx: i64, dy: i64) -> Result<Self> {
        if (dx, dy) == (0, 0) || dx.gcd(&dy) != 1 {
            return Err(Error::NotPrimitive(dx, dy));
        }
        Ok(Direction { dx, dy })
    }

    /// Direction of an arbitrary nonzero vector (divides out the gcd).
    pub fn of(v: Site) -> Result<Self> {
        if v == Site::ORIGIN {
            return Err(Error::NotPrimitive(0, 0));
        }
        let g = v.x.gcd(&v.y);
        Ok(Direction { dx: v.x / g, dy: v.y / g })
    }

    pub fn dx(self) -> i64 {
        self.dx
    }

    pub fn dy(self) -> i64 {
        self.dy
    }

    pub fn vector(self) -> Site {
        Site::new(self.dx, self.dy)
    }

    pub fn opposite(self) -> Direction {
        Direction { dx: -self.dx, dy: -self.dy }
    }

    pub fn rot_cw(self) -> Direction {
        Direction { dx: self.dy, dy: -self.dx }
    }

    pub fn rot_ccw(self) -> Direction {
        Direction { dx: -self.dy, dy: self.dx }
    }

    /// Squared Euclidean norm of the primitive vector, i.e. λ_u².
    pub fn lambda_sq(self) -> i64 {
        self.dx * self.dx + self.dy * self.dy
    }

    pub fn lambda(self) -> f64 {
        (self.lambda_sq() as f64).sqrt()
    }

    /// ⟨x, u⟩ with the integer representative of u.
    pub fn dot(self, x: Site) -> i64 {
        self.vector().dot(x)
    }

    /// Some direction strictly between `self` and `next`, going clockwise.
    /// When they are opposite the clockwise perpendicular is returned.
    pub fn cw_midpoint(self, next: Direction) -> Direction {
        let (a, b) = (self.vector(), next.vector());
        if a.cross(b) < 0 {
            Direction::of(a + b).expect("non-opposite directions have nonzero sum")
        } else if a.cross(b) == 0 && a.dot(b) < 0 {
            self.rot_cw()
        } else if a == b {
            self.opposite()
        } else {
            // more than a half turn apart: the sum bisects the other side
            Direction::of(-(a + b)).expect("non-opposite directions have nonzero sum")
        }
    }

    /// Is `d` in the open clockwise half-turn starting at `self`?
    pub fn open_cw_semicircle_contains(self, d: Direction) -> bool {
        self.vector().cross(d.vector()) < 0
    }

    /// Is `d` in the closed clockwise half-turn starting at `self`?
    pub fn closed_cw_semicircle_contains(self, d: Direction) -> bool {
        self.vector().cross(d.vector()) <= 0
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.dx, self.dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionMetrics {
    /// smallest positive value of ⟨x, u/‖u‖⟩ over lattice points
    pub rho: f64,
    /// smallest λ > 0 with λ·u/‖u‖ in the lattice
    pub lambda: f64,
}

pub fn direction_metrics(u: Direction) -> DirectionMetrics {
    // the primitive vector has norm λ, and ⟨x,u⟩ ranges over all integers
    // (gcd(dx,dy)=1), so the least positive value of ⟨x,u⟩/λ is 1/λ
    let lambda = u.lambda();
    DirectionMetrics { rho: 1.0 / lambda, lambda }
}

/// Metrics for a raw vector; non-primitive input is an error.
pub fn direction_metrics_of(dx: i64, dy: i64) -> Result<DirectionMetrics> {
    Direction::new(dx, dy).map(direction_metrics)
}

fn cw_half(origin: Site, d: Site) -> u8 {
    let c = origin.cross(d);
    if c < 0 || (c == 0 && origin.dot(d) > 0) {
        0
    } else {
        1
    }
}

/// Order by clockwise angle measured from `origin`, exactly.
pub fn compare_clockwise(u: Direction, v: Direction, origin: Direction) -> Ordering {
    let (o, a, b) = (origin.vector(), u.vector(), v.vector());
    let (ha, hb) = (cw_half(o, a), cw_half(o, b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    match a.cross(b) {
        c if c < 0 => Ordering::Less,
        c if c > 0 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// Clockwise angle comparison of two half-turn-bounded arcs: is `d` in the
/// closed clockwise arc from `start` to `end`?
pub fn arc_contains(start: Direction, end: Direction, d: Direction) -> bool {
    compare_clockwise(d, end, start) != Ordering::Greater
}

/// Offset of a half-plane boundary line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Offset {
    /// `l·λ_u` as an exact rational, so that `⟨x,u/‖u‖⟩ < l` ⇔ `⟨x,u⟩ < value`
    /// with the primitive integer vector `u`.
    Lattice(Rational64),
    /// Euclidean offset `l`.
    Real(f64),
}

impl Offset {
    pub fn zero() -> Self {
        Offset::Lattice(Rational64::from_integer(0))
    }

    fn exact_for(self, u: Direction) -> Option<Rational64> {
        match self {
            Offset::Lattice(r) => Some(r),
            Offset::Real(l) => {
                let s = l * u.lambda();
                (1..=64i64).find_map(|den| {
                    let num = (s * den as f64).round();
                    ((s * den as f64 - num).abs() < 1e-9 && num.abs() < 1e15).then(|| Rational64::new(num as i64, den))
                })
            }
        }
    }
}

/// Is `x` in H_u(offset) = {⟨x,u/‖u‖⟩ < offset} (or its closure)?
pub fn half_plane_contains(x: Site, u: Direction, offset: Offset, closed: bool) -> bool {
    match offset.exact_for(u) {
        Some(s) => {
            let p = Rational64::from_integer(u.dot(x));
            if closed {
                p <= s
            } else {
                p < s
            }
        }
        None => {
            let Offset::Real(l) = offset else { unreachable!() };
            let p = u.dot(x) as f64 / u.lambda();
            if closed {
                p <= l
            } else {
                p < l
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl Window {
    pub fn new(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Result<Self> {
        if x_min > x_max || y_min > y_max {
            return Err(Error::BadWindow { x_min, x_max, y_min, y_max });
        }
        Ok(Window { x_min, x_max, y_min, y_max })
    }

    /// Square window [-r, r]².
    pub fn centered(r: i64) -> Self {
        Window { x_min: -r, x_max: r, y_min: -r, y_max: r }
    }

    /// Smallest window containing all given sites (None when empty).
    pub fn bounding<I: IntoIterator<Item = Site>>(sites: I) -> Option<Self> {
        let mut it = sites.into_iter();
        let s = it.next()?;
        let mut w = Window { x_min: s.x, x_max: s.x, y_min: s.y, y_max: s.y };
        for s in it {
            w.x_min = w.x_min.min(s.x);
            w.x_max = w.x_max.max(s.x);
            w.y_min = w.y_min.min(s.y);
            w.y_max = w.y_max.max(s.y);
        }
        Some(w)
    }

    pub fn width(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y_max - self.y_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: Site) -> bool {
        s.x >= self.x_min && s.x <= self.x_max && s.y >= self.y_min && s.y <= self.y_max
    }

    pub fn index(&self, s: Site) -> Option<usize> {
        self.contains(s).then(|| (s.y - self.y_min) as usize * self.width() + (s.x - self.x_min) as usize)
    }

    pub fn site(&self, idx: usize) -> Site {
        let w = self.width();
        Site::new(self.x_min + (idx % w) as i64, self.y_min + (idx / w) as i64)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len()).map(move |i| self.site(i))
    }

    pub fn grow(&self, r: i64) -> Window {
        Window { x_min: self.x_min - r, x_max: self.x_max + r, y_min: self.y_min - r, y_max: self.y_max + r }
    }

    pub fn translate(&self, t: Site) -> Window {
        Window { x_min: self.x_min + t.x, x_max: self.x_max + t.x, y_min: self.y_min + t.y, y_max: self.y_max + t.y }
    }

    /// Chebyshev distance from a site to the window (0 inside).
    pub fn distance(&self, s: Site) -> i64 {
        let dx = (self.x_min - s.x).max(s.x - self.x_max).max(0);
        let dy = (self.y_min - s.y).max(s.y - self.y_max).max(0);
        dx.max(dy)
    }

    /// Wrap a site onto the window seen as a torus.
    pub fn wrap(&self, s: Site) -> Site {
        let w = self.width() as i64;
        let h = self.height() as i64;
        Site::new(self.x_min + (s.x - self.x_min).rem_euclid(w), self.y_min + (s.y - self.y_min).rem_euclid(h))
    }
}

/// State of sites outside a configuration's window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    AllHealthy,
    AllInfected,
    /// infected exactly on the open half-plane H_normal(offset)
    HalfPlaneInfected {
        normal: Direction,
        offset: Offset,
    },
    Torus,
    /// prescribed infected sites in a collar of Chebyshev width `radius`
    /// around the window; all other collar sites are healthy
    Explicit {
        radius: i64,
        infected: BTreeSet<Site>,
    },
}

impl BoundaryCondition {
    pub fn explicit<I: IntoIterator<Item = Site>>(radius: i64, infected: I) -> Self {
        BoundaryCondition::Explicit { radius, infected: infected.into_iter().collect() }
    }

    /// State of a site outside `window`.
    pub fn outside(&self, window: &Window, s: Site) -> Result<bool> {
        match self {
            BoundaryCondition::AllHealthy => Ok(false),
            BoundaryCondition::AllInfected => Ok(true),
            BoundaryCondition::HalfPlaneInfected { normal, offset } => {
                Ok(half_plane_contains(s, *normal, *offset, false))
            }
            BoundaryCondition::Torus => unreachable!("torus sites are wrapped before lookup"),
            BoundaryCondition::Explicit { radius, infected } => {
                if window.distance(s) > *radius {
                    Err(Error::OutsideCollar(s))
                } else {
                    Ok(infected.contains(&s))
                }
            }
        }
    }

    pub fn collar_radius(&self) -> Option<i64> {
        match self {
            BoundaryCondition::Explicit { radius, .. } => Some(*radius),
            _ => None,
        }
    }
}

/// Read access to a (possibly infinite) configuration.
pub trait SiteView {
    fn infected(&self, s: Site) -> Result<bool>;
}

impl<F: Fn(Site) -> bool> SiteView for F {
    fn infected(&self, s: Site) -> Result<bool> {
        Ok(self(s))
    }
}

/// Dense infection grid on a window plus the boundary rule outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    window: Window,
    cells: Vec<bool>,
    boundary: BoundaryCondition,
}

impl Configuration {
    pub fn healthy(window: Window, boundary: BoundaryCondition) -> Self {
        Configuration { window, cells: vec![false; window.len()], boundary }
    }

    pub fn from_cells(window: Window, cells: Vec<bool>, boundary: BoundaryCondition) -> Result<Self> {
        if cells.len() != window.len() {
            return Err(Error::InvalidArgument(format!(
                "{} cells for a window of {} sites",
                cells.len(),
                window.len()
            )));
        }
        Ok(Configuration { window, cells, boundary })
    }

    /// Infected exactly on the given sites; sites outside the window are an error.
    pub fn from_sites<I: IntoIterator<Item = Site>>(
        window: Window,
        boundary: BoundaryCondition,
        sites: I,
    ) -> Result<Self> {
        let mut c = Configuration::healthy(window, boundary);
        for s in sites {
            c.set(s, true)?;
        }
        Ok(c)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.boundary
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn with_boundary(mut self, boundary: BoundaryCondition) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn get(&self, s: Site) -> Result<bool> {
        if let Some(i) = self.window.index(s) {
            return Ok(self.cells[i]);
        }
        if self.boundary == BoundaryCondition::Torus {
            return Ok(self.cells[self.window.index(self.window.wrap(s)).unwrap()]);
        }
        self.boundary.outside(&self.window, s)
    }

    pub fn set(&mut self, s: Site, infected: bool) -> Result<()> {
        let i = self.window.index(s).ok_or_else(|| Error::InvalidArgument(format!("site {s} outside window")))?;
        self.cells[i] = infected;
        Ok(())
    }

    pub fn infected_sites(&self) -> Vec<Site> {
        self.cells.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| self.window.site(i)).collect()
    }

    pub fn count_infected(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    /// Is every window site of `self` infected whenever it is in `other`?
    pub fn contains(&self, other: &Configuration) -> bool {
        self.window == other.window && self.cells.iter().zip(&other.cells).all(|(&a, &b)| a || !b)
    }
}

impl SiteView for Configuration {
    fn infected(&self, s: Site) -> Result<bool> {
        self.get(s)
    }
}

/// Reproducible random stream keyed by (seed, stream id).
///
/// Backed by ChaCha8, whose keystream is a counter-mode construction:
/// the seed selects the key and the stream id the nonce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        SeededStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }

    pub fn substream(&self, id: u64) -> SeededStream {
        SeededStream::new(self.seed, self.stream_id.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id))
    }
}
