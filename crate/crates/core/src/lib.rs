pub mod cli;
pub mod correspondence;
pub mod dilation;
pub mod disc;
pub mod error;
pub mod gauge;
pub mod graph;
pub mod linalg;
pub mod problem;
pub mod representation;
