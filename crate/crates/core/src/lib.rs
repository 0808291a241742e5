//! Obstacle-aware shepherding of non-cohesive targets.
//!
//! Herders steer targets that only react to nearby herders into a goal
//! disc at the origin, sliding around convex obstacles with a blended
//! normal/tangential repulsion. The crate contains the control law, a
//! differential-drive realization, a cohesive-herding comparator, a seeded
//! simulation engine and the scenario/trace/plot plumbing around it.

pub mod baseline;
pub mod control;
pub mod embodiment;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod plots;
pub mod potential;
pub mod scenario;
pub mod targets;
pub mod trace;

pub use geometry::Vec2;
