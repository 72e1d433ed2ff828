//! Pointwise curvature: metric jets, Christoffel symbols, Riemann and its
//! traces, Weyl and Cotton tensors, sectional and Weitzenböck curvatures.

mod array;
mod curvature;
mod dual;
mod metric_jet;
mod planes;
mod spectrum;

pub use array::Tensor;
pub use curvature::{curvature_pack, CurvaturePack};
pub(crate) use curvature::schouten_only;
pub use dual::{Dual, Scalar};
pub use metric_jet::{metric_jet, MetricJet};
pub use planes::{
    anisotropy, mean_curvature, ricci_spectrum, schouten_spectrum, sectional, weitzenboeck_gm,
    PlaneSampler, PLANE_EPS,
};
pub use spectrum::{operator_spectrum, OperatorSpectrum};
