pub mod analysis;
pub mod cli;
pub mod error;
pub mod exact;
pub mod graphkit;
pub mod matching;
pub mod model;
pub mod partition;
pub mod preprocess;
pub mod rpp;
