pub mod codec;
pub mod datasets;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod par;
pub mod rng;
pub mod strategy;
