//! Parallel Husimi grids. Cells are independent and collected in index order,
//! so the result does not depend on scheduling.

use rayon::prelude::*;

use hypercat_core::kerr::{assemble, kerr_cell, FockHusimi, GridSpec, HusimiGrid, KerrHusimi};
use hypercat_core::states::CoherentLabel;
use hypercat_core::{FockVector, ModelParams, Result};

/// Parallel [`hypercat_core::kerr::husimi_kerr`].
pub fn husimi_kerr(label: &CoherentLabel, k: usize, spec: &GridSpec) -> Result<HusimiGrid> {
    let h = KerrHusimi::new(label, k)?;
    let cells: Vec<_> = (0..spec.len()).into_par_iter().map(|i| kerr_cell(&h, spec, i)).collect();
    Ok(assemble(spec, cells))
}

/// Parallel [`hypercat_core::kerr::husimi`].
pub fn husimi(state: &FockVector, params: &ModelParams, spec: &GridSpec) -> Result<HusimiGrid> {
    let h = FockHusimi::new(state, params)?;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let (ix, iy) = spec.coords(i);
            h.value(spec.point(ix, iy))
        })
        .collect();
    Ok(HusimiGrid { spec: *spec, values, spot_check: None })
}
