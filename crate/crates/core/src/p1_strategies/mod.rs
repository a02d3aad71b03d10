//! Player 1 placement strategies.

pub mod centerpoint;
pub mod cones;
pub mod ek;
pub mod enclosing;
pub mod nets;
pub mod piercing;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::epsilon_table::{rat, EpsilonTable, JsonRational, Rational};
use crate::error::{Result, VgError};
use crate::geometry::{FacilitySet, UserSet};

pub use centerpoint::centerpoint;
pub use cones::{cone_cover_directions, ConeSet};
pub use ek::build_e_k;
pub use enclosing::{min_k_enclosing_ball, min_k_enclosing_disk};
pub use nets::{build_ball_net, build_disk_net, verify_piercing, PiercingReport};
pub use piercing::{pierce_ball_cluster, pierce_disk_cluster};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Centerpoint,
    MustafaRay,
    DiskNet,
    BallNet,
    Custom,
}

impl StrategyKind {
    /// Accepts both the serialized names and the short command-line names.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "centerpoint" => Ok(StrategyKind::Centerpoint),
            "eknet" | "mustafa_ray" | "ek" => Ok(StrategyKind::MustafaRay),
            "disknet" | "disk_net" => Ok(StrategyKind::DiskNet),
            "ballnet" | "ball_net" => Ok(StrategyKind::BallNet),
            "custom" => Ok(StrategyKind::Custom),
            other => Err(VgError::InvalidInput(format!("unknown strategy kind {other:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyKind::Centerpoint => "centerpoint",
            StrategyKind::MustafaRay => "mustafa_ray",
            StrategyKind::DiskNet => "disk_net",
            StrategyKind::BallNet => "ball_net",
            StrategyKind::Custom => "custom",
        }
    }
}

/// A P1 placement together with its claimed bound: P2 serves at most
/// `guarantee · n` users.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    pub placements: FacilitySet,
    pub kind: StrategyKind,
    pub k: usize,
    pub epsilon: Option<Rational>,
    pub guarantee: Rational,
}

impl Strategy {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "kind": self.kind.as_str(),
            "k": self.k,
            "guarantee": JsonRational(self.guarantee.clone()),
            "points": self.placements.points(),
        });
        if let Some(e) = &self.epsilon {
            v["epsilon"] = serde_json::to_value(JsonRational(e.clone())).expect("serializable");
        }
        v
    }
}

/// Builds any strategy by kind. `k` is the facility budget; `epsilon` is
/// required for the nets unless it can be derived from `k` (ε = 7/k for
/// disks, 21/k for balls). Nets are padded to `k` points when a budget is
/// given.
pub fn build_strategy(
    users: &UserSet,
    kind: StrategyKind,
    k: Option<usize>,
    epsilon: Option<Rational>,
    table: Option<&EpsilonTable>,
) -> Result<Strategy> {
    let d = users.dim();
    match kind {
        StrategyKind::Centerpoint => {
            if k.is_some_and(|k| k != 1) {
                return Err(VgError::InvalidInput("the centerpoint strategy places exactly one facility".into()));
            }
            let c = centerpoint(users)?;
            Ok(Strategy {
                placements: FacilitySet::p1(vec![c])?,
                kind,
                k: 1,
                epsilon: None,
                guarantee: rat(d as i64, d as i64 + 1),
            })
        }
        StrategyKind::MustafaRay => {
            let k = k.ok_or_else(|| VgError::InvalidInput("k is required".into()))?;
            let owned;
            let table = match table {
                Some(t) if t.kmax() >= k && t.dim == 2 => t,
                _ => {
                    owned = crate::epsilon_table::build_table(2, k as i64)?;
                    &owned
                }
            };
            build_e_k(users, k, table)
        }
        StrategyKind::DiskNet | StrategyKind::BallNet => {
            let per_cluster: usize = if kind == StrategyKind::DiskNet { 7 } else { 21 };
            let eps = match (epsilon, k) {
                (Some(e), _) => e,
                (None, Some(k)) if k >= per_cluster => rat(per_cluster as i64, k as i64),
                _ => {
                    return Err(VgError::InvalidInput(format!(
                        "epsilon is required unless k >= {per_cluster}"
                    )))
                }
            };
            let mut s = if kind == StrategyKind::DiskNet {
                build_disk_net(users, &eps)?
            } else {
                build_ball_net(users, &eps)?
            };
            if let Some(k) = k {
                if s.placements.len() > k {
                    return Err(VgError::InvalidInput(format!(
                        "the net needs {} facilities, more than the budget {k}",
                        s.placements.len()
                    )));
                }
                let pts = ek::pad_to_k(users, s.placements.facilities.clone(), k)?;
                s.placements = FacilitySet::p1(pts)?;
                s.k = k;
            }
            Ok(s)
        }
        StrategyKind::Custom => Err(VgError::InvalidInput("custom placements are supplied by the caller".into())),
    }
}
