//! Update families and their stability/difficulty structure.

mod classify;
mod difficulty;
mod frame;
mod stability;

pub use classify::{
    classify, family_difficulty, ClassificationReport, ClassifyOptions, Criticality, FamilyDifficulty, HardSummary,
    RefinedClass, INFINITE,
};
pub use difficulty::{difficulty, difficulty_with, Difficulty, DifficultyCertificate, DifficultyOptions};
pub use frame::{quasi_stable_frame, quasi_stable_frame_from};
pub use stability::{stable_arcs, StabilityReport, StableComponent};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Direction, Site};

/// A finite collection of update rules; each rule is a finite nonempty set of
/// nonzero lattice vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateFamily {
    pub name: String,
    pub rules: Vec<Vec<Site>>,
}

impl UpdateFamily {
    pub fn new(name: impl Into<String>, rules: Vec<Vec<Site>>) -> Result<Self> {
        let f = UpdateFamily { name: name.into(), rules };
        f.validate()?;
        Ok(f)
    }

    pub fn from_pairs(name: &str, rules: &[&[(i64, i64)]]) -> Result<Self> {
        UpdateFamily::new(name, rules.iter().map(|r| r.iter().map(|&(x, y)| Site::new(x, y)).collect()).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.rules.is_empty() {
            return Err(Error::BadFamily("no rules".into()));
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.is_empty() {
                return Err(Error::BadFamily(format!("rule {i} is empty")));
            }
            if r.contains(&Site::ORIGIN) {
                return Err(Error::BadFamily(format!("rule {i} contains the origin")));
            }
            let mut s = r.clone();
            s.sort();
            s.dedup();
            if s.len() != r.len() {
                return Err(Error::BadFamily(format!("rule {i} repeats a vector")));
            }
        }
        Ok(())
    }

    /// Largest Chebyshev norm of a rule vector.
    pub fn range(&self) -> i64 {
        self.vectors().map(Site::chebyshev).max().unwrap_or(0)
    }

    /// All distinct rule vectors.
    pub fn vectors(&self) -> impl Iterator<Item = Site> + '_ {
        let mut v: Vec<Site> = self.rules.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v.into_iter()
    }

    /// Image of the family under an integer linear map.
    pub fn map(&self, name: &str, f: impl Fn(Site) -> Site) -> UpdateFamily {
        UpdateFamily {
            name: name.to_string(),
            rules: self.rules.iter().map(|r| r.iter().map(|&x| f(x)).collect()).collect(),
        }
    }

    /// Rotation of every rule by -π/2.
    pub fn rotated_cw(&self) -> UpdateFamily {
        self.map(&self.name, Site::rot_cw)
    }

    /// Parse the JSON family format: `{"name": ..., "rules": [[[dx,dy], ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: UpdateFamily = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("families always serialize")
    }
}

/// Is `u` unstable, i.e. does some rule lie in the open half-plane {⟨x,u⟩ < 0}?
pub fn is_unstable(family: &UpdateFamily, u: Direction) -> bool {
    family.rules.iter().any(|r| r.iter().all(|&x| u.dot(x) < 0))
}

/// The bundled model zoo.
pub mod zoo {
    use super::UpdateFamily;

    pub const NAMES: [&str; 10] = [
        "fa2f",
        "duarte",
        "east",
        "one_neighbour",
        "two_sided_subcritical",
        "intricate_isotropic",
        "anisotropic",
        "east_chain",
        "semi_directed",
        "balanced_rooted",
    ];

    pub fn source(name: &str) -> Option<&'static str> {
        Some(match name {
            "fa2f" => include_str!("../../zoo/fa2f.family"),
            "duarte" => include_str!("../../zoo/duarte.family"),
            "east" => include_str!("../../zoo/east.family"),
            "one_neighbour" => include_str!("../../zoo/one_neighbour.family"),
            "two_sided_subcritical" => include_str!("../../zoo/two_sided_subcritical.family"),
            "intricate_isotropic" => include_str!("../../zoo/intricate_isotropic.family"),
            "anisotropic" => include_str!("../../zoo/anisotropic.family"),
            "east_chain" => include_str!("../../zoo/east_chain.family"),
            "semi_directed" => include_str!("../../zoo/semi_directed.family"),
            "balanced_rooted" => include_str!("../../zoo/balanced_rooted.family"),
            _ => return None,
        })
    }

    pub fn get(name: &str) -> Option<UpdateFamily> {
        source(name).map(|s| UpdateFamily::from_json(s).expect("zoo files are valid"))
    }

    pub fn fa2f() -> UpdateFamily {
        get("fa2f").unwrap()
    }

    pub fn duarte() -> UpdateFamily {
        get("duarte").unwrap()
    }

    pub fn east() -> UpdateFamily {
        get("east").unwrap()
    }

    pub fn one_neighbour() -> UpdateFamily {
        get("one_neighbour").unwrap()
    }

    pub fn two_sided_subcritical() -> UpdateFamily {
        get("two_sided_subcritical").unwrap()
    }

    pub fn intricate_isotropic() -> UpdateFamily {
        get("intricate_isotropic").unwrap()
    }

    pub fn anisotropic() -> UpdateFamily {
        get("anisotropic").unwrap()
    }

    pub fn east_chain() -> UpdateFamily {
        get("east_chain").unwrap()
    }

    pub fn semi_directed() -> UpdateFamily {
        get("semi_directed").unwrap()
    }

    pub fn balanced_rooted() -> UpdateFamily {
        get("balanced_rooted").unwrap()
    }
}
