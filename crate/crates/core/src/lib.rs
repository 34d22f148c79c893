//! Constructive synthesis of finite graphs realizing involution-invariant
//! local statistics on bounded-degree rooted trees.
//!
//! The pipeline: describe a target measure by its finite-depth ball marginals
//! ([`measure::MarginalTable`]), check that the marginals are consistent with
//! involution invariance ([`validate`]), turn the depth-(r+1) marginals into a
//! weighted interface graph ([`weights`]), realize the weights as a finite
//! simple graph by a typed matching construction ([`synth`]), and verify the
//! output empirically by an exact ball census ([`census`]).

pub mod ball;
pub mod census;
pub mod directed;
pub mod graph;
pub mod graphio;
pub mod labeling;
pub mod measure;
pub mod params;
pub mod ratio;
pub mod synth;
pub mod validate;
pub mod weights;

pub use ball::BallCode;
pub use directed::{EdgeBall, VecBall};
pub use graph::RootedGraph;
pub use measure::MarginalTable;
pub use ratio::Ratio;
