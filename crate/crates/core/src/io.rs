//! Text formats: site lists as JSON arrays of [x, y] pairs and configurations
//! as run-length encoded rows.
//!
//! A grid dump starts with `window x_min x_max y_min y_max` and then has one
//! line per row from y_max down to y_min. Each row is a sequence of runs
//! `<count><o|b>` (o infected, b healthy); a count of 1 may be omitted.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::lattice::{BoundaryCondition, Configuration, Site, Window};

pub fn parse_sites(text: &str) -> Result<Vec<Site>> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn sites_to_json(sites: &[Site]) -> String {
    serde_json::to_string(sites).expect("site lists always serialize")
}

pub fn encode_grid(config: &Configuration) -> String {
    let w = config.window();
    let mut out = format!("window {} {} {} {}\n", w.x_min, w.x_max, w.y_min, w.y_max);
    for y in (w.y_min..=w.y_max).rev() {
        let row: Vec<bool> = (w.x_min..=w.x_max).map(|x| config.get(Site::new(x, y)).unwrap()).collect();
        let mut i = 0;
        while i < row.len() {
            let mut j = i;
            while j < row.len() && row[j] == row[i] {
                j += 1;
            }
            let c = if row[i] { 'o' } else { 'b' };
            if j - i == 1 {
                out.push(c);
            } else {
                write!(out, "{}{c}", j - i).unwrap();
            }
            i = j;
        }
        out.push('\n');
    }
    out
}

pub fn decode_grid(text: &str, boundary: BoundaryCondition) -> Result<Configuration> {
    let err = |line: usize, column: usize, message: &str| Error::Parse { line, column, message: message.into() };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| err(1, 1, "empty grid"))?;
    let nums: Vec<i64> = head
        .strip_prefix("window")
        .ok_or_else(|| err(1, 1, "expected `window x_min x_max y_min y_max`"))?
        .split_whitespace()
        .map(|t| t.parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(1, 8, &e.to_string()))?;
    if nums.len() != 4 {
        return Err(err(1, 1, "window needs four bounds"));
    }
    let window = Window::new(nums[0], nums[1], nums[2], nums[3])?;
    let mut config = Configuration::healthy(window, boundary);
    let mut y = window.y_max;
    for (ln, line) in lines {
        if y < window.y_min {
            return Err(err(ln + 1, 1, "more rows than the window holds"));
        }
        let mut x = window.x_min;
        let mut count = String::new();
        for (col, ch) in line.trim().chars().enumerate() {
            match ch {
                '0'..='9' => count.push(ch),
                'o' | 'b' => {
                    let n: i64 = if count.is_empty() {
                        1
                    } else {
                        count.parse().map_err(|_| err(ln + 1, col + 1, "bad count"))?
                    };
                    count.clear();
                    if x + n - 1 > window.x_max {
                        return Err(err(ln + 1, col + 1, "row longer than the window"));
                    }
                    if ch == 'o' {
                        for k in 0..n {
                            config.set(Site::new(x + k, y), true)?;
                        }
                    }
                    x += n;
                }
                _ => return Err(err(ln + 1, col + 1, &format!("unexpected character {ch:?}"))),
            }
        }
        if x != window.x_max + 1 || !count.is_empty() {
            return Err(err(ln + 1, line.len().max(1), "row does not fill the window"));
        }
        y -= 1;
    }
    if y != window.y_min - 1 {
        return Err(err(text.lines().count(), 1, "fewer rows than the window holds"));
    }
    Ok(config)
}
