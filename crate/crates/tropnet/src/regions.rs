//! Exact linear-region enumeration for tropical polynomials, tropical
//! Puiseux rational maps, and (via tropicalization) ReLU networks.
//!
//! For a polynomial the regions are the full-dimensional monomial regions.
//! For a quotient `p (/) q` the regions of `p` and `q` are intersected
//! pairwise, pairs below full dimension are dropped, the survivors are
//! grouped by the exact affine map they realize, and each group is split
//! into connected components; a region is a component, possibly a non-convex
//! union of several polyhedra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::polyhedra::{connected_components, Polyhedron};
use crate::tropical::{AffineMap, TropicalPolynomial, TropicalRationalMap};
use crate::tropicalize::tropicalize_scalar;

/// A maximal connected region on which the function agrees with `map`. The
/// region is the union of `pieces`; every piece is full-dimensional and the
/// union is connected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearRegion {
    pub map: AffineMap,
    pub pieces: Vec<Polyhedron>,
}

impl LinearRegion {
    /// True iff every piece is bounded.
    pub fn is_bounded(&self) -> Result<bool> {
        for piece in &self.pieces {
            if !piece.is_bounded()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Linear regions of a tropical polynomial: one per irredundant monomial,
/// with the monomial's region as the (single) piece and its affine data as
/// the map.
pub fn polynomial_regions(f: &TropicalPolynomial) -> Vec<LinearRegion> {
    f.irredundant_indices()
        .into_iter()
        .map(|i| LinearRegion {
            map: f.affine_map(i),
            pieces: vec![f.monomial_region(i).expect("index in range")],
        })
        .collect()
}

/// Linear regions of a tropical Puiseux rational map. Deterministic output:
/// regions are ordered lexicographically by map, then by smallest
/// contributing pair index.
pub fn rational_regions(f: &TropicalRationalMap) -> Vec<LinearRegion> {
    let num_regions = polynomial_regions(&f.numerator);
    let den_regions = polynomial_regions(&f.denominator);

    // Pairs (i, j) whose intersection still has full dimension, grouped by
    // the affine map the quotient realizes there.
    let mut groups: BTreeMap<AffineMap, Vec<Polyhedron>> = BTreeMap::new();
    for u in &num_regions {
        for v in &den_regions {
            let cell = u.pieces[0]
                .intersect(&v.pieces[0])
                .expect("same ambient dimension");
            if !cell.is_full_dimensional() {
                continue;
            }
            let map = u.map.sub(&v.map);
            groups.entry(map).or_default().push(cell);
        }
    }

    let mut regions = Vec::new();
    for (map, cells) in groups {
        for component in connected_components(&cells) {
            regions.push(LinearRegion {
                map: map.clone(),
                pieces: component.into_iter().map(|k| cells[k].clone()).collect(),
            });
        }
    }
    regions
}

/// Regions of a scalar-output network: tropicalize, then enumerate.
pub fn network_regions(net: &Network) -> Result<Vec<LinearRegion>> {
    if net.output_dim() != 1 {
        return Err(Error::ScalarOutputRequired(net.output_dim()));
    }
    Ok(rational_regions(&tropicalize_scalar(net)?))
}
