//! Geometric front end: jets, normal transport and the checks for parallel
//! second fundamental form and light-cone submanifolds.

pub mod checks;
pub mod expr;
pub mod immersion;
pub mod jet;
pub mod pipeline;
pub mod transport;

pub use checks::{
    cone_jet, light_cone_check, mean_curvature_case, parallel_pi_check, parallel_pi_residual, LightConeReport, MeanCurvatureCase,
    ParallelPiReport,
};
pub use expr::Expr;
pub use immersion::{minkowski, Derivatives, Family, Immersion, Jet2};
pub use jet::{point_jet, point_jet_with, symmetric_eigenvalues, PointJet};
pub use transport::{parallel_transport, transport_along, Loop, TransportResult, DEFAULT_STEPS};
pub use pipeline::{pipeline, GeometryInput, Mode, PipelineOptions, PipelineReport};
