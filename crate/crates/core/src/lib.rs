pub mod additive;
pub mod bisector;
pub mod census;
pub mod circle_graph;
pub mod dyadic;
pub mod error;
pub mod exact;
pub mod generators;
pub mod geometry;
pub mod interval;
pub mod io;
pub mod poly;
pub mod separable;
pub mod structure;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/exact.md")]
    pub struct Exact;
    #[doc = include_str!("../../../book/src/census.md")]
    pub struct Census;
    #[doc = include_str!("../../../book/src/bisectors.md")]
    pub struct Bisectors;
    #[doc = include_str!("../../../book/src/circle-graphs.md")]
    pub struct CircleGraphs;
    #[doc = include_str!("../../../book/src/additive.md")]
    pub struct Additive;
    #[doc = include_str!("../../../book/src/structure.md")]
    pub struct Structure;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
