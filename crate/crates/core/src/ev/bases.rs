use super::EvParams;
use crate::error::PlanError;
use crate::graph::NodeId;
use crate::shortest_path::PathResult;

/// Anticipated recharge location on the end-to-end shortest path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Base {
    pub index: usize,
    pub node: NodeId,
    /// Cost from the trip source along the path.
    pub cumulative_cost: f64,
}

/// Places bases at the last path node whose cumulative cost does not exceed
/// `(k + 1) * beta * Q`, until the rest of the path fits in `beta * Q`.
///
/// Trips within capacity need no bases. When the target itself is the last
/// node within a threshold it becomes the final base. A path edge longer than
/// `beta * Q` that straddles a threshold leaves no usable node to stop at and
/// is reported as [`PlanError::CoarseGraph`].
pub fn split_into_bases(path: &PathResult, params: &EvParams) -> Result<Vec<Base>, PlanError> {
    if path.cost <= params.capacity() {
        return Ok(Vec::new());
    }
    let step = params.beta() * params.capacity();
    let cumulative = &path.cumulative;
    let mut bases = Vec::new();
    let mut last = 0usize;
    while path.cost - cumulative[last] > step {
        let threshold = (bases.len() + 1) as f64 * step;
        let at = cumulative.partition_point(|&c| c <= threshold).saturating_sub(1);
        if at <= last {
            return Err(PlanError::CoarseGraph {
                weight: cumulative[last + 1] - cumulative[last],
                threshold,
            });
        }
        if let Some(&next) = cumulative.get(at + 1) {
            if next - cumulative[at] > step {
                return Err(PlanError::CoarseGraph {
                    weight: next - cumulative[at],
                    threshold,
                });
            }
        }
        bases.push(Base {
            index: bases.len(),
            node: path.nodes[at],
            cumulative_cost: cumulative[at],
        });
        last = at;
    }
    Ok(bases)
}
