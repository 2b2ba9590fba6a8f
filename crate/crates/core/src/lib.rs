pub mod config;
pub mod model;
pub mod names;
pub mod xmltree;
pub mod registry;
pub mod grammar;
pub mod ingest;
pub mod segmenter;
pub mod resolver;
pub mod emitter;
pub mod stats;
pub mod synth;
pub mod pipeline;
