//! Seeded random deployments and their configuration format.

mod config;
mod geometry;

pub use config::{default_ue_position, parse_config, Length, Point, ScenarioConfig, RNG_NAME};
pub use geometry::{
    generate, realization_rng, realize, saris_config, sample_cluster_center, terminations, Realization,
};
