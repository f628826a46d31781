//! Numerical linear-region estimation by Jacobian sampling, and the
//! symmetry-reduced variant for permutation-invariant networks.
//!
//! The plain estimator samples a box, collects rounded Jacobian signatures,
//! and applies a midpoint test to duplicate signatures (equal midpoint value
//! means the two samples are treated as one region, a differing value means
//! disconnected copies). The fundamental-domain estimator sorts samples into
//! the descending-coordinate cone and weights each distinct signature by its
//! orbit multiplicity `n!/prod c!`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational};
use crate::lp::{solve, LpOutcome, LpProblem, Sense};
use crate::network::{round10, DenseNet, JacobianSignature, Network};
use crate::polyhedra::Polyhedron;
use crate::regions::LinearRegion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleScheme {
    Uniform,
    Grid,
}

#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    /// Half-width of the sampling cube `[-R, R]^n`.
    pub box_radius: f64,
    pub npoints: usize,
    pub seed: u64,
    pub scheme: SampleScheme,
    pub restrict_to_fundamental: bool,
}

impl SampleConfig {
    pub fn new(box_radius: f64, npoints: usize, seed: u64) -> Self {
        assert!(box_radius > 0.0 && npoints >= 1);
        SampleConfig {
            box_radius,
            npoints,
            seed,
            scheme: SampleScheme::Uniform,
            restrict_to_fundamental: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegionEstimate {
    /// Estimated region count (integral for the plain estimator; the
    /// fundamental estimator sums orbit multiplicities).
    pub count: f64,
    pub signatures: BTreeSet<JacobianSignature>,
    pub elapsed: f64,
}

/// Dispatches on `restrict_to_fundamental`.
pub fn estimate(net: &Network, cfg: &SampleConfig) -> Result<RegionEstimate> {
    if cfg.restrict_to_fundamental {
        estimate_regions_fundamental(net, cfg)
    } else {
        estimate_regions(net, cfg)
    }
}

fn sample_points(n: usize, cfg: &SampleConfig, npoints: usize) -> Vec<Vec<f64>> {
    let r = cfg.box_radius;
    match cfg.scheme {
        SampleScheme::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..npoints)
                .map(|_| (0..n).map(|_| rng.gen_range(-r..r)).collect())
                .collect()
        }
        SampleScheme::Grid => {
            let per_axis = (npoints as f64).powf(1.0 / n as f64).ceil().max(2.0) as usize;
            let step = 2.0 * r / (per_axis - 1) as f64;
            let mut points = Vec::with_capacity(npoints);
            let mut index = vec![0usize; n];
            'outer: loop {
                points.push(index.iter().map(|&i| -r + step * i as f64).collect());
                if points.len() == npoints {
                    break;
                }
                for d in (0..n).rev() {
                    index[d] += 1;
                    if index[d] < per_axis {
                        continue 'outer;
                    }
                    index[d] = 0;
                }
                break;
            }
            points
        }
    }
}

/// Jacobian-sampling estimator on the cube `[-R, R]^n`. Duplicate signatures
/// are resolved by the midpoint test against the group's first
/// representative; outputs are compared after the same 10-decimal rounding
/// as the Jacobians.
pub fn estimate_regions(net: &Network, cfg: &SampleConfig) -> Result<RegionEstimate> {
    if net.output_dim() != 1 {
        return Err(Error::ScalarOutputRequired(net.output_dim()));
    }
    let start = Instant::now();
    let dense = DenseNet::from(net);
    let n = dense.input_dim();
    let points = sample_points(n, cfg, cfg.npoints);

    let mut groups: BTreeMap<JacobianSignature, Vec<usize>> = BTreeMap::new();
    for (idx, x) in points.iter().enumerate() {
        groups
            .entry(dense.jacobian_signature(x))
            .or_default()
            .push(idx);
    }

    let mut count = 0.0f64;
    for members in groups.values() {
        count += 1.0;
        let first = &points[members[0]];
        let f_first = dense.forward_scalar(first);
        for &other in &members[1..] {
            let x = &points[other];
            let midpoint: Vec<f64> = first.iter().zip(x).map(|(a, b)| (a + b) / 2.0).collect();
            let at_mid = dense.forward_scalar(&midpoint);
            let interpolated = (f_first + dense.forward_scalar(x)) / 2.0;
            if round10(at_mid) != round10(interpolated) {
                count += 1.0;
            }
        }
    }
    Ok(RegionEstimate {
        count,
        signatures: groups.into_keys().collect(),
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Orbit multiplicity of a Jacobian signature under coordinate permutations:
/// `n! / prod_c c!` over the counts of equal (rounded) entries. An upper
/// bound on the number of distinct regions sharing the signature.
pub fn multiplicity(sig: &JacobianSignature, n: usize) -> Result<u64> {
    if sig.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sig.len(),
            context: "signature length",
        });
    }
    if n > 20 {
        return Err(Error::Internal(
            "multiplicity overflows u64 beyond n = 20".into(),
        ));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &v in sig.entries() {
        *counts.entry(v.to_bits()).or_insert(0) += 1;
    }
    let mut value = factorial(n as u64);
    for c in counts.values() {
        value /= factorial(*c);
    }
    Ok(value)
}

fn factorial(n: u64) -> u64 {
    (2..=n).product::<u64>().max(1)
}

/// Symmetry-reduced estimator for permutation-invariant networks: samples
/// `ceil(N / n!)` points, sorts each into the descending cone, and weights
/// distinct signatures by their multiplicity. The caller asserts invariance.
pub fn estimate_regions_fundamental(net: &Network, cfg: &SampleConfig) -> Result<RegionEstimate> {
    if net.output_dim() != 1 {
        return Err(Error::ScalarOutputRequired(net.output_dim()));
    }
    let start = Instant::now();
    let dense = DenseNet::from(net);
    let n = dense.input_dim();
    let reduced = (cfg.npoints as f64 / factorial(n as u64) as f64).ceil() as usize;
    let points = sample_points(n, cfg, reduced.max(1));

    let mut signatures: BTreeSet<JacobianSignature> = BTreeSet::new();
    for x in &points {
        let mut sorted = x.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite samples"));
        signatures.insert(dense.jacobian_signature(&sorted));
    }
    let mut count = 0.0f64;
    for sig in &signatures {
        count += multiplicity(sig, n)? as f64;
    }
    Ok(RegionEstimate {
        count,
        signatures,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// The descending-coordinate cone `x_1 >= x_2 >= ... >= x_n`; needs `n >= 2`.
pub fn fundamental_cone(n: usize) -> Polyhedron {
    assert!(n >= 2, "the cone is only proper from dimension 2 on");
    let mut rows = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let mut row = vec![Rational::zero(); n];
        row[i] = Rational::from_integer(-1);
        row[i + 1] = Rational::one();
        rows.push(row);
    }
    Polyhedron::new(
        Matrix::from_rows(rows).expect("uniform widths"),
        vec![Rational::zero(); n - 1],
    )
    .expect("valid cone")
}

/// Counting bounds from symbolic regions of a permutation-invariant scalar
/// function: regions fully inside the cone contribute `n!` to both sides,
/// regions merely crossing it add their gradient multiplicity to the upper
/// bound only.
pub fn fundamental_bounds(regions: &[LinearRegion], n: usize) -> Result<(u64, u64)> {
    if n < 2 {
        // Trivial group: every region is its own orbit.
        let count = regions.len() as u64;
        return Ok((count, count));
    }
    let cone = fundamental_cone(n);
    let mut contained_count = 0u64;
    let mut boundary_mult = 0u64;
    for region in regions {
        let contained = region_contained_in(&region.pieces, &cone)?;
        if contained {
            contained_count += 1;
            continue;
        }
        let intersects = region
            .pieces
            .iter()
            .map(|p| p.intersect(&cone).map(|q| !q.is_empty()))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .any(|x| x);
        if intersects {
            let grad: Vec<f64> = region.map.gradient.iter().map(Rational::to_f64).collect();
            boundary_mult += multiplicity(&JacobianSignature::new(grad), n)?;
        }
    }
    let nf = factorial(n as u64);
    let lower = nf * contained_count;
    let upper = lower + boundary_mult;
    Ok((lower, upper))
}

/// Every piece lies inside the cone iff each cone row has a nonpositive
/// maximum over the piece (one LP per row and piece).
fn region_contained_in(pieces: &[Polyhedron], cone: &Polyhedron) -> Result<bool> {
    for piece in pieces {
        for i in 0..cone.num_rows() {
            let p = LpProblem::new(
                cone.matrix().row(i).to_vec(),
                piece.matrix().clone(),
                piece.rhs().to_vec(),
                Sense::Maximize,
            );
            match solve(&p)? {
                LpOutcome::Optimal { value, .. } => {
                    if value.is_positive() {
                        return Ok(false);
                    }
                }
                LpOutcome::Unbounded => return Ok(false),
                LpOutcome::Infeasible { .. } => {
                    return Err(Error::EmptyPolyhedron("fundamental_bounds piece"))
                }
            }
        }
    }
    Ok(true)
}
