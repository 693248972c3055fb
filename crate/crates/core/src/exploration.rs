//! Frontier-based exploration under a limited visibility range.
//!
//! The explored set only grows. Each step merges what the agent currently sees,
//! stops when the sought entity is in sight, and otherwise keeps travelling to
//! the current target until it is reached or becomes unreachable, at which
//! point a new frontier vertex is chosen.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{distance, segment_intersects_box, Aabb, Point, Segment};
use crate::navgraph::{NavGraph, VertexId, VertexKind};
use crate::pathfinding::{cost_map, find_path, Algorithm};

/// Distance under which the agent counts as standing on a vertex.
pub const ARRIVAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplorationError {
    #[error("agent vertex {0} is not in the explored set")]
    AgentOffExploredSet(VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExplorationStatus {
    Exploring,
    Done,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "policy", content = "seed")]
pub enum FrontierPolicy {
    /// Cheapest path from the agent, ties by vertex id.
    #[default]
    Nearest,
    /// Uniform choice from a seeded generator.
    Random(u64),
}

/// Which vertices need to be seen before exploration is complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplorationMode {
    #[default]
    AllVertices,
    CentersOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityModel {
    pub range: f64,
    pub occluders: Vec<Aabb>,
}

impl VisibilityModel {
    pub fn new(range: f64) -> Self {
        assert!(range > 0.0, "visibility range must be positive");
        VisibilityModel { range, occluders: Vec::new() }
    }

    pub fn with_occluders(mut self, occluders: Vec<Aabb>) -> Self {
        self.occluders = occluders;
        self
    }

    /// Within range (closed) and no occluder on the sight line.
    pub fn sees(&self, eye: Point, target: Point) -> bool {
        if distance(eye, target) > self.range {
            return false;
        }
        let sight = Segment::new(eye, target);
        !self.occluders.iter().any(|b| segment_intersects_box(&sight, b))
    }
}

pub fn visible_vertices(g: &NavGraph, vm: &VisibilityModel, eye: Point) -> BTreeSet<VertexId> {
    g.vertices()
        .iter()
        .filter(|v| vm.sees(eye, v.position))
        .map(|v| v.id)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExploreAction {
    NavigateTo(VertexId),
    Done,
    Exhausted,
}

/// What the explorer is told each cycle.
#[derive(Debug, Clone, Copy)]
pub struct ExploreObservation<'a> {
    pub agent_pos: Point,
    /// Vertex the agent plans from: the one it stands on, or the end of the
    /// edge it is on.
    pub agent_at: VertexId,
    pub visible: &'a BTreeSet<VertexId>,
    pub goal_sighted: bool,
}

#[derive(Debug, Clone)]
pub struct ExplorationState {
    explored: BTreeSet<VertexId>,
    current_target: Option<VertexId>,
    status: ExplorationStatus,
    policy: FrontierPolicy,
    mode: ExplorationMode,
    rng: ChaCha8Rng,
    legs: usize,
}

impl ExplorationState {
    pub fn new(initially_visible: BTreeSet<VertexId>, policy: FrontierPolicy, mode: ExplorationMode) -> Self {
        let seed = match policy {
            FrontierPolicy::Random(seed) => seed,
            FrontierPolicy::Nearest => 0,
        };
        ExplorationState {
            explored: initially_visible,
            current_target: None,
            status: ExplorationStatus::Exploring,
            policy,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            legs: 0,
        }
    }

    pub fn explored(&self) -> &BTreeSet<VertexId> {
        &self.explored
    }

    pub fn current_target(&self) -> Option<VertexId> {
        self.current_target
    }

    pub fn status(&self) -> ExplorationStatus {
        self.status
    }

    pub fn mode(&self) -> ExplorationMode {
        self.mode
    }

    /// Number of frontier targets selected so far.
    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn merge_visible<'a>(&mut self, seen: impl IntoIterator<Item = &'a VertexId>) {
        self.explored.extend(seen);
    }

    /// Start searching again (for a new entity) while keeping what was seen.
    pub fn resume(&mut self) {
        self.status = ExplorationStatus::Exploring;
        self.current_target = None;
    }
}

/// Frontier vertices: unexplored, adjacent to the explored set, and reachable
/// from `agent_at` over clear edges.
pub fn frontier(
    g: &NavGraph,
    st: &ExplorationState,
    agent_at: VertexId,
) -> Result<BTreeSet<VertexId>, ExplorationError> {
    if !st.explored.contains(&agent_at) {
        return Err(ExplorationError::AgentOffExploredSet(agent_at));
    }
    let costs = cost_map(g, agent_at).map_err(|_| ExplorationError::AgentOffExploredSet(agent_at))?;
    Ok(frontier_with(g, st, &costs))
}

fn frontier_with(g: &NavGraph, st: &ExplorationState, costs: &[Option<f64>]) -> BTreeSet<VertexId> {
    g.vertices()
        .iter()
        .filter(|v| !st.explored.contains(&v.id) && costs[v.id.0].is_some())
        .filter(|v| st.mode == ExplorationMode::AllVertices || v.kind == VertexKind::Center)
        .filter(|v| g.neighbors(v.id).any(|(w, _)| st.explored.contains(&w)))
        .map(|v| v.id)
        .collect()
}

/// One exploration decision.
pub fn explore_step(g: &NavGraph, st: &mut ExplorationState, obs: ExploreObservation<'_>) -> ExploreAction {
    match st.status {
        ExplorationStatus::Done => return ExploreAction::Done,
        ExplorationStatus::Exhausted => return ExploreAction::Exhausted,
        ExplorationStatus::Exploring => {}
    }
    st.explored.extend(obs.visible.iter().copied());
    if obs.goal_sighted {
        st.status = ExplorationStatus::Done;
        st.current_target = None;
        return ExploreAction::Done;
    }

    let costs = match cost_map(g, obs.agent_at) {
        Ok(c) => c,
        Err(_) => {
            st.status = ExplorationStatus::Exhausted;
            return ExploreAction::Exhausted;
        }
    };
    if let Some(t) = st.current_target {
        let arrived = distance(obs.agent_pos, g.position(t)) <= ARRIVAL_TOLERANCE;
        if !arrived && costs[t.0].is_some() {
            return ExploreAction::NavigateTo(t);
        }
        st.current_target = None;
    }

    let candidates = frontier_with(g, st, &costs);
    if candidates.is_empty() {
        st.status = ExplorationStatus::Exhausted;
        return ExploreAction::Exhausted;
    }
    let target = match st.policy {
        FrontierPolicy::Nearest => candidates
            .iter()
            .map(|&v| (costs[v.0].unwrap(), v))
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
            .unwrap()
            .1,
        FrontierPolicy::Random(_) => {
            let k = st.rng.gen_range(0..candidates.len());
            *candidates.iter().nth(k).unwrap()
        }
    };
    st.current_target = Some(target);
    st.legs += 1;
    ExploreAction::NavigateTo(target)
}

/// Result of a vertex-hopping exploration run on a bare graph.
#[derive(Debug, Clone)]
pub struct GraphRun {
    pub status: ExplorationStatus,
    pub legs: usize,
    /// Vertices stood on, in order, starting with the start vertex.
    pub walk: Vec<VertexId>,
    pub explored: BTreeSet<VertexId>,
    /// Targets in selection order.
    pub targets: Vec<VertexId>,
}

/// Explore `g` by hopping one edge per step from `start`. `on_arrive` is
/// called after every hop and may change obstacle states (scripted worlds).
/// `goal` is the position of the sought entity, if any.
pub fn explore_graph(
    g: &mut NavGraph,
    vm: &VisibilityModel,
    start: VertexId,
    goal: Option<Point>,
    policy: FrontierPolicy,
    mode: ExplorationMode,
    mut on_arrive: impl FnMut(&mut NavGraph, VertexId),
) -> GraphRun {
    let mut at = start;
    let mut st = ExplorationState::new(visible_vertices(g, vm, g.position(at)), policy, mode);
    let mut walk = vec![start];
    let mut targets = Vec::new();
    let max_hops = 4 * g.vertex_count() * g.vertex_count() + 16;
    for _ in 0..max_hops {
        let pos = g.position(at);
        let visible = visible_vertices(g, vm, pos);
        let goal_sighted = goal.is_some_and(|q| vm.sees(pos, q));
        let legs_before = st.legs;
        let action = explore_step(
            g,
            &mut st,
            ExploreObservation { agent_pos: pos, agent_at: at, visible: &visible, goal_sighted },
        );
        match action {
            ExploreAction::NavigateTo(t) => {
                if st.legs > legs_before {
                    targets.push(t);
                }
                let path = find_path(g, at, t, Algorithm::AStar)
                    .expect("vertices are valid")
                    .expect("explorer only targets reachable vertices");
                at = path.vertices[1];
                walk.push(at);
                on_arrive(g, at);
            }
            ExploreAction::Done | ExploreAction::Exhausted => break,
        }
    }
    GraphRun { status: st.status, legs: st.legs, walk, explored: st.explored, targets }
}
