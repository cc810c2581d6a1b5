//! Nodal-set analytics on sampled fields: sign components, zero curves,
//! and endpoint classification.

mod components;
mod contour;
mod field;

use serde::{Deserialize, Serialize};

pub use components::{count_sign_components, Connectivity, SignComponents};
pub use contour::{
    classify_endpoints, classify_endpoints_lenient, extract_zero_curves, hausdorff_distance, point_in_polygon,
    saddle_cells, separation_check, BoundaryModel, EndpointClass, NodalCurve, Point, SeparationCheck, TaggedRect,
};
pub(crate) use contour::dist;
pub use field::{ScalarField2D, EPS_CLOSED_FORM, EPS_NUMERICAL};

use crate::error::Result;

/// Nodal-domain count of one eigenfunction against its counting bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodalDomainReport {
    pub index: usize,
    pub components: usize,
    pub bound: usize,
    pub within_bound: bool,
    pub cell_counts: Vec<usize>,
}

/// Count the nodal domains of `field` and compare with `bound`
/// (`n` for Courant, `n + 1` for sloshing modes).
pub fn nodal_domain_report(field: &ScalarField2D, index: usize, bound: usize) -> Result<NodalDomainReport> {
    let c = count_sign_components(field, Connectivity::Four)?;
    Ok(NodalDomainReport {
        index,
        components: c.components,
        bound,
        within_bound: c.components <= bound,
        cell_counts: c.cell_counts,
    })
}
