//! Corner and edge behaviour of discrete solutions: the mixed-derivative dichotomy at
//! codimension-two corners, the singular edge mode fit and the interpolation inequality.

pub mod corner;
pub mod edge;
pub mod interpolation;
pub mod roots;

pub use corner::{
    corner_jet_extract, corner_zoom, CornerParams, DichotomyClass, DichotomyVerdict, DirectionSeries, ZoomLevel,
};
pub use edge::{
    default_fit_params, edge_expansion_fit, edge_samples, fit_edge_samples, oracle_noise_floor, polar, singular_mode,
    EdgeFitParams, EdgeSample, ExpansionFit,
};
pub use interpolation::{holder_seminorm, interpolation_bound, measure_norms, InterpolationBound, MeasuredNorms};
pub use roots::{mixed_root, mixed_root_big, MixedRoot};
