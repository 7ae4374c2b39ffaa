use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};

/// Fewest simultaneous infections that let the East chain carry an infection
/// L sites away from an anchored one: ⌈log2(L + 1)⌉.
pub fn east_min_infections(l: u64) -> Result<u32> {
    if l == 0 {
        return Err(Error::InvalidArgument("L must be at least 1".into()));
    }
    Ok(64 - l.leading_zeros())
}

/// Farthest site reachable on the East chain from the all-healthy state with
/// site 0 permanently infected, never holding more than n infections among
/// sites 1, 2, …. Site x may flip when x − 1 is infected.
pub fn east_reach_bfs(n: u32) -> Result<u32> {
    if n > 5 {
        return Err(Error::InvalidArgument("breadth-first search is limited to n ≤ 5".into()));
    }
    // the chain is cut at 2^n sites; reaching the last one would show the
    // bound is not tight
    let len = 1u32 << n;
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(0);
    queue.push_back(0u64);
    let mut best = 0;
    while let Some(s) = queue.pop_front() {
        for x in 1..=len {
            let left = x == 1 || s >> (x - 1) & 1 == 1;
            if !left {
                continue;
            }
            let t = s ^ (1 << x);
            if t.count_ones() > n || !seen.insert(t) {
                continue;
            }
            if t >> x & 1 == 1 {
                best = best.max(x);
            }
            queue.push_back(t);
        }
    }
    Ok(best)
}
