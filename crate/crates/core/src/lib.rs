pub mod agent;
pub mod cli;
pub mod coverage;
pub mod exploration;
pub mod geometry;
pub mod navgraph;
pub mod navmesh;
pub mod pathfinding;
pub mod simworld;
