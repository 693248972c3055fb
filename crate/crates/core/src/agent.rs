//! Goal/tactic test agents.
//!
//! An agent pursues a sequence of goals against a [`GameEnv`]. Each cycle it
//! observes, updates its beliefs, checks the current goal, and if the goal is
//! still open runs the first enabled branch of the goal's tactic, which issues
//! at most one command. The agent knows only what the level export and its own
//! observations tell it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{score, verdict_for_find_task, CoverageReport, CoverageRequirement, Trace, Verdict};
use crate::exploration::{
    explore_step, frontier, ExplorationMode, ExplorationState, ExplorationStatus, ExploreAction, ExploreObservation, FrontierPolicy,
    ARRIVAL_TOLERANCE,
};
use crate::geometry::{closest_point_on_triangle, distance, Point, Segment};
use crate::navgraph::{build_navgraph, NavGraph, Obstacle, ObstacleId, Provenance, VertexId};
use crate::navmesh::NavMesh;
use crate::pathfinding::{cost_map, find_path, Algorithm};
use crate::simworld::{
    Entity, EntityType, GameEnv, InteractError, LevelExport, MoveOutcome, Observation, Scalar, WorldError, WorldFile,
    WorldState,
};

pub const DEFAULT_BUDGET: u64 = 10_000;
pub const DEFAULT_MAX_CYCLES: u64 = 100_000;
/// How close the agent must get to a point for `PositionReached`.
pub const POSITION_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "goal", rename_all = "camelCase")]
pub enum GoalKind {
    EntityInteracted { id: String },
    EntityInRange { id: String },
    EntityInvariant { id: String, property: String, equals: Scalar },
    PositionReached { position: Point },
}

impl GoalKind {
    pub fn label(&self) -> String {
        match self {
            GoalKind::EntityInteracted { id } => format!("entityInteracted({id})"),
            GoalKind::EntityInRange { id } => format!("entityInRange({id})"),
            GoalKind::EntityInvariant { id, property, equals } => {
                let v = serde_json::to_string(equals).unwrap_or_default();
                format!("entityInvariant({id}.{property} == {v})")
            }
            GoalKind::PositionReached { position: p } => format!("positionReached({}, {}, {})", p.x, p.y, p.z),
        }
    }

    pub fn default_tactic(&self) -> Tactic {
        let first = match self {
            GoalKind::EntityInteracted { id } => Tactic::Interact(id.clone()),
            GoalKind::EntityInRange { id } | GoalKind::EntityInvariant { id, .. } => Tactic::NavigateTo(id.clone()),
            GoalKind::PositionReached { position } => Tactic::GoTo(*position),
        };
        Tactic::FirstOf(vec![first, Tactic::Explore, Tactic::Abort])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Tactic {
    /// Walk to the vertex nearest a known entity that is within interaction range of it.
    NavigateTo(String),
    /// Like `NavigateTo`, then press it.
    Interact(String),
    GoTo(Point),
    Explore,
    Abort,
    FirstOf(Vec<Tactic>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GoalStatus {
    InProgress,
    Success,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Goal {
    pub kind: GoalKind,
    pub tactic: Tactic,
    pub budget: u64,
}

impl Goal {
    pub fn new(kind: GoalKind) -> Self {
        let tactic = kind.default_tactic();
        Goal { kind, tactic, budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_tactic(mut self, tactic: Tactic) -> Self {
        self.tactic = tactic;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "action", rename_all = "camelCase")]
pub enum ActionRecord {
    Move {
        tactic: &'static str,
        toward: Point,
        waypoint: Option<VertexId>,
        blocked: bool,
    },
    Interact {
        id: String,
        error: Option<String>,
    },
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub cycle: u64,
    pub goal: usize,
    pub agent_position: Point,
    pub visible_entities: Vec<Entity>,
    pub visible_vertices: usize,
    pub explored: usize,
    pub action: ActionRecord,
    pub replanned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalResult {
    pub goal: String,
    pub status: GoalStatus,
    pub cycles: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub goals: Vec<GoalResult>,
    pub verdict: Verdict,
    pub cycles: u64,
    pub coverage: CoverageReport,
    #[serde(skip)]
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub policy: FrontierPolicy,
    pub mode: ExplorationMode,
    pub requirement: CoverageRequirement,
    pub max_cycles: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            policy: FrontierPolicy::Nearest,
            mode: ExplorationMode::AllVertices,
            requirement: CoverageRequirement::AllVertices,
            max_cycles: DEFAULT_MAX_CYCLES,
        }
    }
}

enum Check {
    Open,
    Met,
    Violated,
}

enum Step {
    Act(ActionRecord),
    NotEnabled,
    Abort,
}

/// What the agent believes about the world.
#[derive(Debug, Clone)]
pub struct Agent {
    mesh: NavMesh,
    graph: NavGraph,
    interact_range: f64,
    known: BTreeMap<String, Entity>,
    interacted: BTreeSet<String>,
    exploration: ExplorationState,
    /// Last vertex stood on (or snapped to at start) and the vertex being walked to.
    at: VertexId,
    next: VertexId,
    route: Option<(VertexId, Vec<VertexId>)>,
    /// Set while walking straight from a vertex to an off-graph point.
    free_leg: Option<Point>,
    replanned: bool,
    walk: Vec<VertexId>,
}

impl Agent {
    pub fn new(level: LevelExport, first: &Observation, policy: FrontierPolicy, mode: ExplorationMode) -> Self {
        let graph = build_navgraph(&level.mesh);
        let start = snap_vertex(&level.mesh, &graph, first.agent_position);
        let mut agent = Agent {
            mesh: level.mesh,
            graph,
            interact_range: level.interact_range,
            known: BTreeMap::new(),
            interacted: BTreeSet::new(),
            exploration: ExplorationState::new(BTreeSet::new(), policy, mode),
            at: start,
            next: start,
            route: None,
            free_leg: None,
            replanned: false,
            walk: Vec::new(),
        };
        agent.update(first);
        agent
    }

    pub fn graph(&self) -> &NavGraph {
        &self.graph
    }

    pub fn mesh(&self) -> &NavMesh {
        &self.mesh
    }

    pub fn known_entities(&self) -> &BTreeMap<String, Entity> {
        &self.known
    }

    pub fn exploration(&self) -> &ExplorationState {
        &self.exploration
    }

    /// Vertices stood on, in order.
    pub fn walk(&self) -> &[VertexId] {
        &self.walk
    }

    pub fn coverage_trace(&self) -> Trace {
        let mut t = Trace::from_walk(&self.walk);
        t.visited.extend(self.exploration.explored().iter().copied());
        t
    }

    pub fn update(&mut self, obs: &Observation) {
        let p = obs.agent_position;
        if distance(p, self.graph.position(self.next)) <= ARRIVAL_TOLERANCE {
            self.at = self.next;
            if self.walk.last() != Some(&self.next) {
                self.walk.push(self.next);
            }
        }
        self.exploration.merge_visible(&obs.visible_vertices);
        for e in &obs.entities {
            if e.kind == EntityType::Door {
                let id = ObstacleId::new(e.id.clone());
                let closed = e.is_closed_door();
                match self.graph.obstacle(&id) {
                    None => {
                        let _ = self.graph.add_obstacle(Obstacle::new(e.id.clone(), e.bounds(), closed));
                    }
                    Some(o) if o.blocking != closed => {
                        let _ = self.graph.set_obstacle_blocking(&id, closed);
                    }
                    Some(_) => {}
                }
            }
            self.known.insert(e.id.clone(), e.clone());
        }
    }

    fn check(&self, kind: &GoalKind, obs: &Observation) -> Check {
        let met = |b: bool| if b { Check::Met } else { Check::Open };
        match kind {
            GoalKind::EntityInteracted { id } => met(self.interacted.contains(id)),
            GoalKind::EntityInRange { id } => met(obs.entity(id).is_some()),
            GoalKind::EntityInvariant { id, property, equals } => match obs.entity(id) {
                None => Check::Open,
                Some(e) if e.properties.get(property) == Some(equals) => Check::Met,
                Some(_) => Check::Violated,
            },
            GoalKind::PositionReached { position } => met(distance(obs.agent_position, *position) <= POSITION_TOLERANCE),
        }
    }

    /// Vertex to plan from. Mid-edge, continue to the far end unless the rest
    /// of the edge is now blocked, in which case turn back.
    fn anchor(&self, p: Point) -> VertexId {
        if self.at == self.next || distance(p, self.graph.position(self.next)) <= ARRIVAL_TOLERANCE {
            return self.next;
        }
        let clear = |v: VertexId| self.graph.segment_is_clear(&Segment::new(p, self.graph.position(v)));
        if clear(self.next) || !clear(self.at) {
            self.next
        } else {
            self.at
        }
    }

    /// Vertex within interaction range of `e`, reachable from `from`, nearest to it.
    fn approach_vertex(&self, from: VertexId, e: &Entity) -> Option<VertexId> {
        let costs = cost_map(&self.graph, from).ok()?;
        self.graph
            .vertices()
            .iter()
            .filter_map(|v| {
                let c = costs[v.id.0]?;
                let d = distance(v.position, e.position);
                (d <= self.interact_range).then_some((d, c, v.id))
            })
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.cmp(&y.2)))
            .map(|x| x.2)
    }

    /// One move along the cheapest route to `target`, or `None` if the agent
    /// is already there or cannot get there.
    fn travel<E: GameEnv>(&mut self, env: &mut E, p: Point, target: VertexId, tactic: &'static str) -> Option<ActionRecord> {
        let anchor = self.anchor(p);
        let path = find_path(&self.graph, anchor, target, Algorithm::AStar).ok()??;
        self.free_leg = None;
        let route = path.vertices;
        let at_anchor = distance(p, self.graph.position(anchor)) <= ARRIVAL_TOLERANCE;
        let waypoint = if at_anchor { *route.get(1)? } else { route[0] };

        let remaining: Vec<VertexId> = route.iter().copied().skip_while(|&v| v != waypoint).collect();
        if let Some((t, old)) = &self.route {
            if *t == target && !old.ends_with(&remaining) {
                self.replanned = true;
            }
        }
        self.route = Some((target, remaining));
        if at_anchor {
            self.at = anchor;
        }
        self.next = waypoint;
        Some(self.step_toward(env, self.graph.position(waypoint), Some(waypoint), tactic))
    }

    fn step_toward<E: GameEnv>(&mut self, env: &mut E, toward: Point, waypoint: Option<VertexId>, tactic: &'static str) -> ActionRecord {
        let MoveOutcome { blocked, .. } = env.cmd_move(toward);
        ActionRecord::Move { tactic, toward, waypoint, blocked }
    }

    /// Route toward a known entity. Not enabled once there; if the entity is
    /// then out of sight the belief about it is dropped.
    fn approach<E: GameEnv>(&mut self, env: &mut E, obs: &Observation, id: &str, tactic: &'static str) -> Step {
        let Some(e) = self.known.get(id).cloned() else { return Step::NotEnabled };
        let p = obs.agent_position;
        let anchor = self.anchor(p);
        let Some(v) = self.approach_vertex(anchor, &e) else { return Step::NotEnabled };
        let arrived = distance(p, self.graph.position(v)) <= ARRIVAL_TOLERANCE;
        if !arrived {
            if let Some(a) = self.travel(env, p, v, tactic) {
                return Step::Act(a);
            }
            return Step::NotEnabled;
        }
        if obs.entity(id).is_none() {
            // It is not where it was last seen.
            self.known.remove(id);
            self.exploration.resume();
        }
        Step::NotEnabled
    }

    fn step<E: GameEnv>(&mut self, env: &mut E, tactic: &Tactic, obs: &Observation) -> Step {
        match tactic {
            Tactic::Abort => Step::Abort,
            Tactic::FirstOf(children) => {
                for c in children {
                    match self.step(env, c, obs) {
                        Step::NotEnabled => continue,
                        s => return s,
                    }
                }
                Step::NotEnabled
            }
            Tactic::NavigateTo(id) => self.approach(env, obs, id, "navigateTo"),
            Tactic::Interact(id) => {
                let Some(e) = self.known.get(id) else { return Step::NotEnabled };
                if distance(obs.agent_position, e.position) > self.interact_range {
                    return self.approach(env, obs, id, "interact");
                }
                let result = env.cmd_interact(id);
                match &result {
                    Ok(()) => {
                        self.interacted.insert(id.clone());
                    }
                    Err(InteractError::UnknownEntity(_)) | Err(InteractError::OutOfRange { .. }) => {
                        self.known.remove(id);
                    }
                    Err(InteractError::NotInteractable(_)) => {}
                }
                Step::Act(ActionRecord::Interact { id: id.clone(), error: result.err().map(|e| e.to_string()) })
            }
            Tactic::GoTo(point) => {
                let p = obs.agent_position;
                if distance(p, *point) <= POSITION_TOLERANCE {
                    return Step::NotEnabled;
                }
                let target = snap_vertex(&self.mesh, &self.graph, *point);
                if self.free_leg == Some(*point) || distance(p, self.graph.position(target)) <= ARRIVAL_TOLERANCE {
                    self.at = target;
                    self.next = target;
                    self.free_leg = Some(*point);
                    return Step::Act(self.step_toward(env, *point, None, "goTo"));
                }
                match self.travel(env, p, target, "goTo") {
                    Some(a) => Step::Act(a),
                    None => Step::NotEnabled,
                }
            }
            Tactic::Explore => {
                let p = obs.agent_position;
                let visible: BTreeSet<VertexId> = obs.visible_vertices.iter().copied().collect();
                let eo = ExploreObservation { agent_pos: p, agent_at: self.anchor(p), visible: &visible, goal_sighted: false };
                match explore_step(&self.graph, &mut self.exploration, eo) {
                    ExploreAction::NavigateTo(t) => match self.travel(env, p, t, "explore") {
                        Some(a) => Step::Act(a),
                        None => Step::NotEnabled,
                    },
                    ExploreAction::Done | ExploreAction::Exhausted => Step::NotEnabled,
                }
            }
        }
    }
}

/// Vertex of the face under `p` nearest to it: reachable in a straight line
/// without leaving the face.
fn snap_vertex(mesh: &NavMesh, g: &NavGraph, p: Point) -> VertexId {
    let face = (0..mesh.face_count())
        .map(|f| {
            let [a, b, c] = mesh.corners(f).unwrap();
            (distance(p, closest_point_on_triangle(p, a, b, c)), f)
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|x| x.1);
    let Some(face) = face else {
        return g.nearest_vertex(p).unwrap_or(VertexId(0));
    };
    let corners = mesh.faces()[face];
    g.vertices()
        .iter()
        .filter(|v| match v.provenance {
            Provenance::Face(f) => f == face,
            Provenance::MeshVertex(m) => corners.contains(&m),
            Provenance::Synthetic => false,
        })
        .map(|v| (distance(v.position, p), v.id))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|x| x.1)
        .unwrap_or(VertexId(0))
}

/// Pursue `goals` in order until one fails or all succeed.
pub fn run_goal_sequence<E: GameEnv>(env: &mut E, goals: &[Goal], opts: RunOptions) -> TestResult {
    let level = env.level();
    let first = env.observe();
    let mut agent = Agent::new(level, &first, opts.policy, opts.mode);
    let mut results: Vec<GoalResult> = Vec::new();
    let mut trace = Vec::new();
    let mut total: u64 = 0;
    let mut violated = false;

    for (gi, goal) in goals.iter().enumerate() {
        agent.exploration.resume();
        agent.route = None;
        let mut used: u64 = 0;
        let (status, reason) = loop {
            let obs = env.observe();
            agent.update(&obs);
            match agent.check(&goal.kind, &obs) {
                Check::Met => break (GoalStatus::Success, "goal met".to_string()),
                Check::Violated => {
                    violated = true;
                    break (GoalStatus::Failed, "entity observed with the wrong property value".to_string());
                }
                Check::Open => {}
            }
            if used >= goal.budget {
                break (GoalStatus::Failed, format!("budget of {} cycles exhausted", goal.budget));
            }
            if total >= opts.max_cycles {
                break (GoalStatus::Failed, format!("run limit of {} cycles reached", opts.max_cycles));
            }
            agent.replanned = false;
            let step = agent.step(env, &goal.tactic, &obs);
            let action = match step {
                Step::Act(a) => a,
                Step::Abort | Step::NotEnabled => ActionRecord::Abort,
            };
            let aborted = action == ActionRecord::Abort;
            trace.push(TraceEntry {
                cycle: obs.cycle,
                goal: gi,
                agent_position: obs.agent_position,
                visible_entities: obs.entities.clone(),
                visible_vertices: obs.visible_vertices.len(),
                explored: agent.exploration.explored().len(),
                action,
                replanned: agent.replanned,
            });
            if aborted {
                break (GoalStatus::Failed, "no tactic could make progress".to_string());
            }
            used += 1;
            total += 1;
        };
        results.push(GoalResult { goal: goal.kind.label(), status, cycles: used, reason });
        if status == GoalStatus::Failed {
            break;
        }
    }

    let coverage = score(&agent.graph, &agent.coverage_trace()).expect("the agent only records graph elements");
    let all_met = results.len() == goals.len() && results.iter().all(|r| r.status == GoalStatus::Success);
    let verdict = if all_met {
        verdict_for_find_task(true, Some(true), &coverage, opts.requirement)
    } else if violated {
        verdict_for_find_task(true, Some(false), &coverage, opts.requirement)
    } else {
        verdict_for_find_task(false, None, &coverage, opts.requirement)
    };
    TestResult { goals: results, verdict, cycles: total, coverage, trace }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreTraceEntry {
    pub cycle: u64,
    pub agent_pos: Point,
    pub target: Option<VertexId>,
    pub explored: usize,
    pub frontier: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreRun {
    /// Whether the sought entity came into view; `None` for a full sweep.
    pub found: Option<bool>,
    pub status: ExplorationStatus,
    pub cycles: u64,
    pub legs: usize,
    pub coverage: CoverageReport,
    #[serde(skip)]
    pub trace: Vec<ExploreTraceEntry>,
}

/// Explore until `target` is in view, or until nothing is left to explore
/// when `target` is `None`.
pub fn explore_world<E: GameEnv>(
    env: &mut E,
    target: Option<&str>,
    policy: FrontierPolicy,
    mode: ExplorationMode,
    max_cycles: u64,
) -> ExploreRun {
    let first = env.observe();
    let mut agent = Agent::new(env.level(), &first, policy, mode);
    let mut trace = Vec::new();
    let mut cycles = 0;
    let found = loop {
        let obs = env.observe();
        agent.update(&obs);
        let found = target.is_some_and(|id| obs.entity(id).is_some());
        let anchor = agent.anchor(obs.agent_position);
        let stop = found || cycles >= max_cycles;
        let acted = !stop && matches!(agent.step(env, &Tactic::Explore, &obs), Step::Act(_));
        let frontier_now = frontier(&agent.graph, &agent.exploration, anchor).map_or(0, |f| f.len());
        trace.push(ExploreTraceEntry {
            cycle: obs.cycle,
            agent_pos: obs.agent_position,
            target: agent.exploration.current_target(),
            explored: agent.exploration.explored().len(),
            frontier: frontier_now,
        });
        if !acted {
            break found;
        }
        cycles += 1;
    };
    let status = if found { ExplorationStatus::Done } else { agent.exploration.status() };
    let coverage = score(&agent.graph, &agent.coverage_trace()).expect("the agent only records graph elements");
    ExploreRun {
        found: target.map(|_| found),
        status,
        cycles,
        legs: agent.exploration.legs(),
        coverage,
        trace,
    }
}

/// Every call an agent made into the game, for checking that it played by the rules.
#[derive(Debug, Clone, PartialEq)]
pub enum Call {
    Level,
    Observe,
    Move { before: Point, after: Point, toward: Point },
    Interact { id: String, ok: bool },
}

#[derive(Debug, Clone)]
pub struct Recorder<E> {
    inner: E,
    pub calls: Vec<Call>,
}

impl<E: GameEnv> Recorder<E> {
    pub fn new(inner: E) -> Self {
        Recorder { inner, calls: Vec::new() }
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn into_inner(self) -> E {
        self.inner
    }
}

impl<E: GameEnv> GameEnv for Recorder<E> {
    fn level(&self) -> LevelExport {
        self.inner.level()
    }

    fn observe(&self) -> Observation {
        self.inner.observe()
    }

    fn cmd_move(&mut self, toward: Point) -> MoveOutcome {
        let before = self.inner.observe().agent_position;
        let out = self.inner.cmd_move(toward);
        let after = self.inner.observe().agent_position;
        self.calls.push(Call::Move { before, after, toward });
        out
    }

    fn cmd_interact(&mut self, id: &str) -> Result<(), InteractError> {
        let r = self.inner.cmd_interact(id);
        self.calls.push(Call::Interact { id: id.to_string(), ok: r.is_ok() });
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WorldRef {
    Path(String),
    Inline(Box<WorldFile>),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontierChoice {
    #[default]
    Nearest,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    #[serde(flatten)]
    pub kind: GoalKind,
    #[serde(default)]
    pub budget: Option<u64>,
}

/// Scenario file: a world and the goals to pursue in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub world: WorldRef,
    pub goals: Vec<GoalSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub frontier: FrontierChoice,
    #[serde(default)]
    pub exploration: ExplorationMode,
    #[serde(default)]
    pub requirement: CoverageRequirement,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(String),
    #[error("scenario schema error: {0}")]
    Schema(String),
    #[error("scenario has no goals")]
    NoGoals,
    #[error(transparent)]
    World(#[from] WorldError),
}

impl Scenario {
    pub fn goals(&self) -> Vec<Goal> {
        self.goals
            .iter()
            .map(|g| {
                let goal = Goal::new(g.kind.clone());
                match g.budget {
                    Some(b) => goal.with_budget(b),
                    None => goal,
                }
            })
            .collect()
    }

    pub fn options(&self, seed: Option<u64>, max_cycles: u64) -> RunOptions {
        let policy = match self.frontier {
            FrontierChoice::Nearest => FrontierPolicy::Nearest,
            FrontierChoice::Random => FrontierPolicy::Random(seed.or(self.seed).unwrap_or(0)),
        };
        RunOptions { policy, mode: self.exploration, requirement: self.requirement, max_cycles }
    }
}

/// Read a scenario and the world it names; relative world paths are taken
/// from the scenario's directory.
pub fn load_scenario(path: &FsPath) -> Result<(Scenario, WorldState), ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    let scenario: Scenario = serde_json::from_str(&text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    if scenario.goals.is_empty() {
        return Err(ScenarioError::NoGoals);
    }
    for g in &scenario.goals {
        if g.budget == Some(0) {
            return Err(ScenarioError::Schema("goal budget must be positive".into()));
        }
    }
    let world = match &scenario.world {
        WorldRef::Inline(file) => WorldState::from_file((**file).clone())?,
        WorldRef::Path(p) => {
            let base = path.parent().unwrap_or(FsPath::new("."));
            crate::simworld::load_world(base.join(p))?
        }
    };
    Ok((scenario, world))
}
