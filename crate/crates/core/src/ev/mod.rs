//! Charging-stop optimization.
//!
//! The planner runs one A* solve between the trip endpoints, places recharge
//! "bases" along that path every `beta * Q` of cumulative cost, gathers the
//! nearest stations around each base, and connects consecutive columns of
//! candidates with bounded Dijkstra solves. The resulting process graph is
//! small; its shortest path picks the station sequence and its edges carry the
//! road paths that are stitched into the final route.

mod bases;
mod candidates;
mod process;
mod router;

pub use bases::{split_into_bases, Base};
pub use candidates::{find_candidates, Candidate, CandidateSet};
pub use process::{build_process_graph, solve_process_graph, PgEdge, PgNode, ProcessGraph};
pub use router::{EvRouter, PlanTrace, RouterOptions};

use crate::error::{PlanError, Stage};
use crate::graph::NodeId;

/// Search radius multiplier applied when a base has too few candidates.
pub const RADIUS_GROWTH: f64 = 1.5;

/// Vehicle and search parameters. All costs are in the graph's weight unit (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvParams {
    capacity: f64,
    charging_penalty: f64,
    num_candidates: usize,
    alpha: f64,
    max_search_expansions: usize,
}

impl EvParams {
    pub const DEFAULT_ALPHA: f64 = 0.2;
    pub const DEFAULT_CANDIDATES: usize = 5;
    pub const DEFAULT_SEARCH_EXPANSIONS: usize = 6;
    /// Forty minutes for a full recharge.
    pub const DEFAULT_PENALTY: f64 = 2400.0;

    pub fn new(capacity: f64, charging_penalty: f64) -> Result<Self, PlanError> {
        if !(capacity > 0.0) || !capacity.is_finite() {
            return Err(PlanError::InvalidParams(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        if !(charging_penalty >= 0.0) || !charging_penalty.is_finite() {
            return Err(PlanError::InvalidParams(format!(
                "charging penalty must be nonnegative, got {charging_penalty}"
            )));
        }
        Ok(EvParams {
            capacity,
            charging_penalty,
            num_candidates: Self::DEFAULT_CANDIDATES,
            alpha: Self::DEFAULT_ALPHA,
            max_search_expansions: Self::DEFAULT_SEARCH_EXPANSIONS,
        })
    }

    pub fn with_candidates(mut self, n: usize) -> Result<Self, PlanError> {
        if n == 0 {
            return Err(PlanError::InvalidParams("need at least one candidate per base".into()));
        }
        self.num_candidates = n;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, PlanError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(PlanError::InvalidParams(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_max_search_expansions(mut self, expansions: usize) -> Self {
        self.max_search_expansions = expansions;
        self
    }

    /// Drivable cost on a full charge, `Q`.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn charging_penalty(&self) -> f64 {
        self.charging_penalty
    }

    pub fn num_candidates(&self) -> usize {
        self.num_candidates
    }

    /// Candidate search radius as a fraction of capacity.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Base spacing as a fraction of capacity; always `1 - alpha`.
    pub fn beta(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn max_search_expansions(&self) -> usize {
        self.max_search_expansions
    }
}

/// Leg cost including the prorated recharge time needed to top the battery
/// back off: `raw + penalty * raw / Q`.
pub fn adjust_cost(raw_cost: f64, params: &EvParams) -> Result<f64, PlanError> {
    if !(raw_cost >= 0.0 && raw_cost <= params.capacity) {
        return Err(PlanError::Contract {
            stage: Stage::ProcessGraph,
            message: format!("leg cost {raw_cost} outside [0, {}]", params.capacity),
        });
    }
    Ok(raw_cost + params.charging_penalty * (raw_cost / params.capacity))
}

/// Weight of a leg; legs ending at the trip target carry no recharge penalty.
pub(crate) fn leg_weight(raw_cost: f64, params: &EvParams, recharges: bool) -> Result<f64, PlanError> {
    let adjusted = adjust_cost(raw_cost, params)?;
    Ok(if recharges { adjusted } else { raw_cost })
}

/// One leg of a planned trip.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub index: usize,
    /// Station at the end of the leg; `None` when the leg ends at the trip target.
    pub station_id: Option<i64>,
    /// Road cost of the leg without penalty.
    pub raw_cost: f64,
    /// Leg weight as optimized (penalty included when the leg ends at a station).
    pub cost: f64,
    pub path: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteSolution {
    pub legs: Vec<Leg>,
    pub total_cost: f64,
    pub stations_visited: Vec<i64>,
    /// Stitched road route with junction nodes appearing once.
    pub route: Vec<NodeId>,
}

impl RouteSolution {
    pub fn raw_cost(&self) -> f64 {
        self.legs.iter().map(|l| l.raw_cost).sum()
    }
}
