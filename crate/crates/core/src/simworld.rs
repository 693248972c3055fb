//! Deterministic stand-in for a game under test.
//!
//! The world advances only when the agent sends a command: one command is
//! one cycle. Observations are structural (entity ids, types, positions and
//! properties) and respect line of sight: walls and closed doors occlude, and
//! nothing is visible beyond the agent's visibility range. The agent is a point.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exploration::VisibilityModel;
use crate::geometry::{closest_point_on_triangle, distance, Aabb, Point, Segment};
use crate::navgraph::{build_navgraph, NavGraph, Obstacle, ObstacleId, VertexId};
use crate::navmesh::{load_mesh, MeshError, NavMesh, RawMesh};

pub const DEFAULT_SPEED: f64 = 0.5;
pub const DEFAULT_INTERACT_RANGE: f64 = 1.0;
pub const DEFAULT_VISIBILITY_RANGE: f64 = 5.0;
/// How far movement stops short of a blocking face.
pub const CONTACT_BACKOFF: f64 = 1e-6;
/// Allowed distance between the agent and the navigable surface.
pub const SURFACE_TOLERANCE: f64 = 0.1;

pub const IS_OPEN: &str = "isOpen";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("cannot read world file: {0}")]
    Io(String),
    #[error("world schema error: {0}")]
    Schema(String),
    #[error("duplicate entity id {0:?}")]
    DuplicateEntityId(String),
    #[error("button {button:?} is wired to {target:?}, which is not a door in this world")]
    DanglingWiring { button: String, target: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InteractError {
    #[error("unknown entity {0:?}")]
    UnknownEntity(String),
    #[error("entity {id:?} is {distance:.3} away, beyond interaction range")]
    OutOfRange { id: String, distance: f64 },
    #[error("entity {0:?} cannot be interacted with")]
    NotInteractable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityType {
    Button,
    Door,
    Goal,
    Decoration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: EntityType,
    pub position: Point,
    #[serde(default)]
    pub extents: Point,
    #[serde(default)]
    pub properties: BTreeMap<String, Scalar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub connects: Vec<String>,
}

impl Entity {
    pub fn bounds(&self) -> Aabb {
        Aabb::new(self.position, self.extents)
    }

    pub fn bool_property(&self, name: &str) -> Option<bool> {
        match self.properties.get(name) {
            Some(Scalar::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn is_closed_door(&self) -> bool {
        self.kind == EntityType::Door && self.bool_property(IS_OPEN) != Some(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    #[serde(default)]
    pub position: Option<Point>,
    #[serde(default = "default_speed")]
    pub speed: f64,
    #[serde(default = "default_interact_range")]
    pub interact_range: f64,
    #[serde(default = "default_visibility_range")]
    pub visibility_range: f64,
}

fn default_speed() -> f64 {
    DEFAULT_SPEED
}
fn default_interact_range() -> f64 {
    DEFAULT_INTERACT_RANGE
}
fn default_visibility_range() -> f64 {
    DEFAULT_VISIBILITY_RANGE
}

impl Default for AgentSpec {
    fn default() -> Self {
        AgentSpec {
            position: None,
            speed: DEFAULT_SPEED,
            interact_range: DEFAULT_INTERACT_RANGE,
            visibility_range: DEFAULT_VISIBILITY_RANGE,
        }
    }
}

/// On-disk world description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldFile {
    pub mesh: RawMesh,
    #[serde(default)]
    pub walls: Vec<Aabb>,
    #[serde(default)]
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub agent: AgentSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentBody {
    pub position: Point,
    pub speed: f64,
    pub interact_range: f64,
    pub visibility_range: f64,
}

/// What the game exports to a test agent up front: the navigation mesh and
/// the agent's own movement and sensing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelExport {
    pub mesh: NavMesh,
    pub speed: f64,
    pub interact_range: f64,
    pub visibility_range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub cycle: u64,
    pub agent_position: Point,
    /// Visible entities, ordered by id.
    pub entities: Vec<Entity>,
    pub visible_vertices: Vec<VertexId>,
}

impl Observation {
    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveOutcome {
    pub distance: f64,
    pub blocked: bool,
}

/// The only ways a test agent may touch the game.
pub trait GameEnv {
    fn level(&self) -> LevelExport;
    fn observe(&self) -> Observation;
    fn cmd_move(&mut self, toward: Point) -> MoveOutcome;
    fn cmd_interact(&mut self, id: &str) -> Result<(), InteractError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    mesh: NavMesh,
    graph: NavGraph,
    entities: BTreeMap<String, Entity>,
    walls: Vec<Aabb>,
    agent: AgentBody,
    cycle: u64,
}

pub fn load_world(path: impl AsRef<Path>) -> Result<WorldState, WorldError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| WorldError::Io(format!("{}: {e}", path.display())))?;
    WorldState::from_json(&text)
}

fn positive(name: &str, v: f64) -> Result<(), WorldError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(WorldError::Schema(format!("{name} must be a positive number, got {v}")))
    }
}

impl WorldState {
    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        let file: WorldFile = serde_json::from_str(text).map_err(|e| WorldError::Schema(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_file(file: WorldFile) -> Result<Self, WorldError> {
        let mesh = load_mesh(&file.mesh)?;
        if mesh.face_count() == 0 {
            return Err(WorldError::Schema("mesh has no faces".into()));
        }
        for (i, w) in file.walls.iter().enumerate() {
            if !w.center.is_finite() || !w.extents.is_finite() || w.extents.x < 0.0 || w.extents.y < 0.0 || w.extents.z < 0.0 {
                return Err(WorldError::Schema(format!("wall {i} has invalid bounds")));
            }
        }

        let mut entities = BTreeMap::new();
        for mut e in file.entities {
            if !e.position.is_finite() || !e.extents.is_finite() || e.extents.x < 0.0 || e.extents.y < 0.0 || e.extents.z < 0.0 {
                return Err(WorldError::Schema(format!("entity {:?} has invalid geometry", e.id)));
            }
            if !e.connects.is_empty() && e.kind != EntityType::Button {
                return Err(WorldError::Schema(format!("only buttons may have connects, found on {:?}", e.id)));
            }
            if e.kind == EntityType::Door {
                match e.properties.get(IS_OPEN) {
                    None => {
                        e.properties.insert(IS_OPEN.into(), Scalar::Bool(false));
                    }
                    Some(Scalar::Bool(_)) => {}
                    Some(_) => return Err(WorldError::Schema(format!("door {:?} has a non-boolean isOpen", e.id))),
                }
            }
            if entities.contains_key(&e.id) {
                return Err(WorldError::DuplicateEntityId(e.id));
            }
            entities.insert(e.id.clone(), e);
        }
        for b in entities.values() {
            for target in &b.connects {
                if entities.get(target).map(|d| d.kind) != Some(EntityType::Door) {
                    return Err(WorldError::DanglingWiring { button: b.id.clone(), target: target.clone() });
                }
            }
        }

        let spec = file.agent;
        positive("agent.speed", spec.speed)?;
        positive("agent.interact_range", spec.interact_range)?;
        positive("agent.visibility_range", spec.visibility_range)?;
        let position = spec.position.unwrap_or_else(|| mesh.face_center(0).unwrap());
        if !position.is_finite() {
            return Err(WorldError::Schema("agent position is not finite".into()));
        }

        let mut graph = build_navgraph(&mesh);
        for d in entities.values().filter(|e| e.kind == EntityType::Door) {
            graph
                .add_obstacle(Obstacle::new(d.id.clone(), d.bounds(), d.is_closed_door()))
                .expect("entity ids are unique");
        }

        let world = WorldState {
            mesh,
            graph,
            entities,
            walls: file.walls,
            agent: AgentBody {
                position,
                speed: spec.speed,
                interact_range: spec.interact_range,
                visibility_range: spec.visibility_range,
            },
            cycle: 0,
        };
        if world.distance_to_surface(position) > SURFACE_TOLERANCE {
            return Err(WorldError::Schema("agent starts off the navigable surface".into()));
        }
        if world.blocking_boxes().any(|b| b.contains_strictly(position)) {
            return Err(WorldError::Schema("agent starts inside blocking geometry".into()));
        }
        Ok(world)
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn agent(&self) -> &AgentBody {
        &self.agent
    }

    pub fn mesh(&self) -> &NavMesh {
        &self.mesh
    }

    /// Ground-truth navgraph with door obstacles kept in sync with door state.
    pub fn graph(&self) -> &NavGraph {
        &self.graph
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn walls(&self) -> &[Aabb] {
        &self.walls
    }

    pub fn distance_to_surface(&self, p: Point) -> f64 {
        self.mesh
            .faces()
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|v| self.mesh.vertices()[v]);
                distance(p, closest_point_on_triangle(p, a, b, c))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Walls plus the boxes of closed doors.
    pub fn blocking_boxes(&self) -> impl Iterator<Item = Aabb> + '_ {
        self.walls
            .iter()
            .copied()
            .chain(self.entities.values().filter(|e| e.is_closed_door()).map(Entity::bounds))
    }

    fn sight_occluders(&self, except: Option<&str>) -> Vec<Aabb> {
        self.walls
            .iter()
            .copied()
            .chain(
                self.entities
                    .values()
                    .filter(|e| e.is_closed_door() && Some(e.id.as_str()) != except)
                    .map(Entity::bounds),
            )
            .collect()
    }

    /// Sight model at the agent's current state, treating every closed door as opaque.
    pub fn visibility_model(&self) -> VisibilityModel {
        VisibilityModel::new(self.agent.visibility_range).with_occluders(self.sight_occluders(None))
    }

    pub fn export_file(&self) -> WorldFile {
        WorldFile {
            mesh: self.mesh.to_raw(),
            walls: self.walls.clone(),
            entities: self.entities.values().cloned().collect(),
            agent: AgentSpec {
                position: Some(self.agent.position),
                speed: self.agent.speed,
                interact_range: self.agent.interact_range,
                visibility_range: self.agent.visibility_range,
            },
        }
    }

    /// Move toward `toward` by at most one speed unit, stopping just short of
    /// the first wall or closed door on the way.
    pub fn cmd_move(&mut self, toward: Point) -> MoveOutcome {
        self.cycle += 1;
        let from = self.agent.position;
        if !toward.is_finite() {
            return MoveOutcome { distance: 0.0, blocked: false };
        }
        let offset = toward - from;
        let remaining = offset.norm();
        if remaining == 0.0 {
            return MoveOutcome { distance: 0.0, blocked: false };
        }
        let dest = if remaining <= self.agent.speed {
            toward
        } else {
            from + offset * (self.agent.speed / remaining)
        };
        let step = Segment::new(from, dest);
        let step_len = step.length();

        let mut contact: Option<f64> = None;
        for b in self.blocking_boxes() {
            let Some((t0, t1)) = b.clip(&step) else { continue };
            // Starting on a face: only moving into the interior counts.
            if t0 == 0.0 && !b.contains_strictly(step.at(0.5 * t1)) {
                continue;
            }
            contact = Some(contact.map_or(t0, |c: f64| c.min(t0)));
        }

        match contact {
            None => {
                self.agent.position = dest;
                MoveOutcome { distance: step_len, blocked: false }
            }
            Some(t) => {
                let travel = (t * step_len - CONTACT_BACKOFF).max(0.0);
                if travel > 0.0 {
                    self.agent.position = from + (dest - from) * (travel / step_len);
                }
                MoveOutcome { distance: travel, blocked: true }
            }
        }
    }

    /// Press a button within reach, toggling every door it is wired to. A door
    /// will not close on the agent.
    pub fn cmd_interact(&mut self, id: &str) -> Result<(), InteractError> {
        self.cycle += 1;
        let e = self.entities.get(id).ok_or_else(|| InteractError::UnknownEntity(id.to_string()))?;
        if e.kind != EntityType::Button {
            return Err(InteractError::NotInteractable(id.to_string()));
        }
        let d = distance(self.agent.position, e.position);
        if d > self.agent.interact_range {
            return Err(InteractError::OutOfRange { id: id.to_string(), distance: d });
        }
        for door_id in e.connects.clone() {
            let door = self.entities.get_mut(&door_id).expect("wiring validated on load");
            let open = door.bool_property(IS_OPEN) == Some(true);
            if open && door.bounds().contains_strictly(self.agent.position) {
                continue;
            }
            door.properties.insert(IS_OPEN.into(), Scalar::Bool(!open));
            self.graph
                .set_obstacle_blocking(&ObstacleId::new(door_id), open)
                .expect("every door is registered");
        }
        Ok(())
    }

    pub fn observe(&self) -> Observation {
        let eye = self.agent.position;
        let range = self.agent.visibility_range;
        let entities = self
            .entities
            .values()
            .filter(|e| {
                distance(eye, e.position) <= range
                    && VisibilityModel::new(range)
                        .with_occluders(self.sight_occluders(Some(&e.id)))
                        .sees(eye, e.position)
            })
            .cloned()
            .collect();
        let vm = self.visibility_model();
        let visible_vertices = self
            .graph
            .vertices()
            .iter()
            .filter(|v| vm.sees(eye, v.position))
            .map(|v| v.id)
            .collect();
        Observation { cycle: self.cycle, agent_position: eye, entities, visible_vertices }
    }

    /// Door ids whose state disagrees with their navgraph obstacle (always empty).
    pub fn door_obstacle_mismatches(&self) -> BTreeSet<String> {
        self.entities
            .values()
            .filter(|e| e.kind == EntityType::Door)
            .filter(|e| {
                let blocking = self.graph.obstacle(&ObstacleId::new(e.id.clone())).map(|o| o.blocking);
                blocking != Some(e.is_closed_door())
            })
            .map(|e| e.id.clone())
            .collect()
    }
}

impl GameEnv for WorldState {
    fn level(&self) -> LevelExport {
        LevelExport {
            mesh: self.mesh.clone(),
            speed: self.agent.speed,
            interact_range: self.agent.interact_range,
            visibility_range: self.agent.visibility_range,
        }
    }

    fn observe(&self) -> Observation {
        WorldState::observe(self)
    }

    fn cmd_move(&mut self, toward: Point) -> MoveOutcome {
        WorldState::cmd_move(self, toward)
    }

    fn cmd_interact(&mut self, id: &str) -> Result<(), InteractError> {
        WorldState::cmd_interact(self, id)
    }
}
