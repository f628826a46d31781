use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use tropnet::exact::{Matrix, Rational};
use tropnet::hoffman::{
    hoffman_exact, hoffman_lower, hoffman_upper, stacked_pair_matrices, BoundConfig, HoffmanResult,
    TropicalHoffman, UpperMode,
};
use tropnet::network::Network;
use tropnet::polyhedra::Polyhedron;
use tropnet::regions::{rational_regions, LinearRegion};
use tropnet::sampling::{estimate, SampleConfig, SampleScheme};
use tropnet::tropical::{AffineMap, TropicalPolynomial, TropicalRationalMap};
use tropnet::tropicalize::tropicalize_detailed;

use crate::manifest::ManifestBuilder;
use crate::{Cli, Command};

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Tropicalize { model, prune } => cmd_tropicalize(cli, model, *prune),
        Command::Regions { model, logit } => cmd_regions(cli, model, *logit),
        Command::RegionsTrop {
            numerator,
            denominator,
        } => cmd_regions_trop(cli, numerator, denominator.as_deref()),
        Command::Prune { polynomial } => cmd_prune(cli, polynomial),
        Command::Hoffman {
            input,
            exact,
            lower,
            upper,
        } => cmd_hoffman(cli, input, *exact, *lower, *upper),
        Command::Radius { model, at } => cmd_radius(cli, model, at),
        Command::Sample {
            model,
            radius,
            npoints,
            fundamental,
            grid,
        } => cmd_sample(cli, model, *radius, *npoints, *fundamental, *grid),
        Command::Experiment {
            name,
            archs,
            trials,
            npoints,
            radius,
        } => crate::experiments::run(cli, name, archs.as_deref(), *trials, *npoints, *radius),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> Result<Network> {
    Network::from_json(&read_to_string(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_polynomial(path: &Path) -> Result<TropicalPolynomial> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_point(path: &Path) -> Result<Vec<Rational>> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn cap_hint(err: tropnet::Error) -> anyhow::Error {
    match err {
        tropnet::Error::SubsetCapExceeded { rows, cap } => anyhow!(
            "{rows} rows exceed the subset enumeration cap {cap}; raise --subset-cap or use --lower/--upper"
        ),
        other => anyhow!(other),
    }
}

#[derive(Serialize)]
struct TropicalSide {
    monomials: TropicalPolynomial,
    canonical_terms: usize,
    formal_terms: usize,
}

#[derive(Serialize)]
struct TropicalizeReport {
    input_dim: usize,
    numerator: TropicalSide,
    denominator: TropicalSide,
    pruned: Option<PrunedCounts>,
}

#[derive(Serialize)]
struct PrunedCounts {
    numerator: TropicalPolynomial,
    denominator: TropicalPolynomial,
    monomial_complexity: (usize, usize),
}

fn cmd_tropicalize(cli: &Cli, model: &Path, prune: bool) -> Result<()> {
    let mut manifest = ManifestBuilder::new(
        "tropicalize",
        json!({"model": model, "prune": prune}),
        cli.seed,
    );
    let net = load_model(model)?;
    let outputs = tropicalize_detailed(&net)?;
    for (k, out) in outputs.iter().enumerate() {
        let pruned = prune.then(|| {
            let p = out.map.prune();
            let complexity = (p.numerator.len(), p.denominator.len());
            PrunedCounts {
                numerator: p.numerator,
                denominator: p.denominator,
                monomial_complexity: complexity,
            }
        });
        let report = TropicalizeReport {
            input_dim: net.input_dim(),
            numerator: TropicalSide {
                monomials: out.map.numerator.clone(),
                canonical_terms: out.map.numerator.len(),
                formal_terms: out.formal_numerator_terms,
            },
            denominator: TropicalSide {
                monomials: out.map.denominator.clone(),
                canonical_terms: out.map.denominator.len(),
                formal_terms: out.formal_denominator_terms,
            },
            pruned,
        };
        let name = if outputs.len() == 1 {
            "tropical.json".to_string()
        } else {
            format!("tropical_{k}.json")
        };
        manifest.write_output(&cli.out, &name, &report)?;
        println!(
            "output {k}: {} (+) terms over {} (formal {} over {})",
            report.numerator.canonical_terms,
            report.denominator.canonical_terms,
            report.numerator.formal_terms,
            report.denominator.formal_terms
        );
        if let Some(p) = &report.pruned {
            println!(
                "output {k}: pruned monomial complexity ({}, {})",
                p.monomial_complexity.0, p.monomial_complexity.1
            );
        }
    }
    manifest.finish(&cli.out)
}

#[derive(Serialize)]
struct RegionEntry {
    map: AffineMap,
    pieces: Vec<Polyhedron>,
    bounded: bool,
}

#[derive(Serialize)]
struct RegionReport {
    count: usize,
    regions: Vec<RegionEntry>,
}

fn region_report(regions: Vec<LinearRegion>) -> Result<RegionReport> {
    let mut entries = Vec::with_capacity(regions.len());
    for region in regions {
        let bounded = region.is_bounded()?;
        entries.push(RegionEntry {
            map: region.map,
            pieces: region.pieces,
            bounded,
        });
    }
    Ok(RegionReport {
        count: entries.len(),
        regions: entries,
    })
}

fn cmd_regions(cli: &Cli, model: &Path, logit: Option<usize>) -> Result<()> {
    let mut manifest =
        ManifestBuilder::new("regions", json!({"model": model, "logit": logit}), cli.seed);
    let net = load_model(model)?;
    let outputs = net.output_dim();
    let coordinate = match (logit, outputs) {
        (Some(k), _) if k >= outputs => {
            bail!("--logit {k} out of range; the model has {outputs} outputs")
        }
        (Some(k), _) => k,
        (None, 1) => 0,
        (None, _) => bail!("the model has {outputs} outputs; pick one with --logit <k>"),
    };
    let maps = tropnet::tropicalize::tropicalize(&net)?;
    let regions = rational_regions(&maps[coordinate]);
    let report = region_report(regions)?;
    manifest.write_output(&cli.out, "regions.json", &report)?;
    println!("{} linear regions", report.count);
    manifest.finish(&cli.out)
}

fn cmd_regions_trop(cli: &Cli, numerator: &Path, denominator: Option<&Path>) -> Result<()> {
    let mut manifest = ManifestBuilder::new(
        "regions-trop",
        json!({"numerator": numerator, "denominator": denominator}),
        cli.seed,
    );
    let p = load_polynomial(numerator)?;
    let map = match denominator {
        Some(path) => TropicalRationalMap::new(p, load_polynomial(path)?)?,
        None => TropicalRationalMap::from_polynomial(p),
    };
    let report = region_report(rational_regions(&map))?;
    manifest.write_output(&cli.out, "regions.json", &report)?;
    println!("{} linear regions", report.count);
    manifest.finish(&cli.out)
}

fn cmd_prune(cli: &Cli, polynomial: &Path) -> Result<()> {
    let mut manifest = ManifestBuilder::new("prune", json!({"polynomial": polynomial}), cli.seed);
    let f = load_polynomial(polynomial)?;
    let (kept, removed_indices) = f.prune_detailed();
    println!(
        "kept {} of {} monomials ({} removed)",
        kept.len(),
        f.len(),
        removed_indices.len()
    );
    let removed_monomials: Vec<_> = removed_indices
        .iter()
        .map(|&i| f.monomials()[i].clone())
        .collect();
    let report = json!({
        "kept": kept,
        "removed_indices": removed_indices,
        "removed_monomials": removed_monomials,
    });
    manifest.write_output(&cli.out, "pruned.json", &report)?;
    manifest.finish(&cli.out)
}

enum HoffmanInput {
    Matrix(Matrix),
    Polynomial(TropicalPolynomial),
    Model(Network),
}

fn load_hoffman_input(path: &Path) -> Result<HoffmanInput> {
    let text = read_to_string(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    match &value {
        Value::Array(_) => Ok(HoffmanInput::Polynomial(
            serde_json::from_value(value).map_err(|e| anyhow!("{}: {e}", path.display()))?,
        )),
        Value::Object(map) if map.contains_key("architecture") => Ok(HoffmanInput::Model(
            Network::from_json(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?,
        )),
        Value::Object(map) if map.contains_key("A") => {
            let matrix: Matrix = serde_json::from_value(map["A"].clone())
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            Ok(HoffmanInput::Matrix(matrix))
        }
        _ => bail!(
            "{}: expected a matrix {{\"A\": [[..]]}}, a monomial array, or a model file",
            path.display()
        ),
    }
}

fn hoffman_result_json(result: &HoffmanResult) -> Value {
    match result {
        HoffmanResult::Exact {
            value,
            witness_subset,
        } => json!({
            "H_exact": value.to_string(),
            "witness_subset": witness_subset,
        }),
        HoffmanResult::Lower {
            value,
            witness_subset,
        } => json!({
            "H_lower": value.to_string(),
            "witness_subset": witness_subset,
        }),
        HoffmanResult::Upper { value } => json!({ "H_upper": value }),
    }
}

fn tropical_hoffman_json(result: &TropicalHoffman) -> Value {
    match result {
        TropicalHoffman::Exact(r) => hoffman_result_json(r),
        TropicalHoffman::Bounds { lower, upper } => {
            let mut merged = hoffman_result_json(lower);
            if let Value::Object(obj) = &mut merged {
                obj.insert("H_upper".into(), json!(upper.float_value()));
            }
            merged
        }
    }
}

/// Candidate matrices whose exact constants the tropical Hoffman value
/// maximizes over.
fn candidate_matrices(input: &HoffmanInput) -> Result<Vec<Matrix>> {
    Ok(match input {
        HoffmanInput::Matrix(m) => vec![m.clone()],
        HoffmanInput::Polynomial(p) => tropnet::hoffman::centered_region_matrices(p),
        HoffmanInput::Model(net) => {
            let map = tropnet::tropicalize::tropicalize_scalar(net)?;
            stacked_pair_matrices(&map)
        }
    })
}

fn cmd_hoffman(
    cli: &Cli,
    input: &Path,
    _exact: bool,
    lower: Option<usize>,
    upper: bool,
) -> Result<()> {
    let mut manifest = ManifestBuilder::new(
        "hoffman",
        json!({"input": input, "lower": lower, "upper": upper, "subset_cap": cli.subset_cap}),
        cli.seed,
    );
    let parsed = load_hoffman_input(input)?;
    let matrices = candidate_matrices(&parsed)?;
    let report = if let Some(iterations) = lower {
        let mut best: Option<HoffmanResult> = None;
        for (idx, m) in matrices.iter().enumerate() {
            let r = hoffman_lower(m, iterations, cli.seed.wrapping_add(idx as u64))?;
            let better = match (&best, &r) {
                (None, _) => true,
                (
                    Some(HoffmanResult::Lower { value: cur, .. }),
                    HoffmanResult::Lower { value: new, .. },
                ) => new > cur,
                _ => false,
            };
            if better {
                best = Some(r);
            }
        }
        hoffman_result_json(&best.expect("at least one candidate matrix"))
    } else if upper {
        let mut best = 0.0f64;
        for m in &matrices {
            let r = hoffman_upper(
                m,
                UpperMode::Exhaustive {
                    cap: cli.subset_cap,
                },
            )
            .map_err(cap_hint)?;
            best = best.max(r.float_value());
        }
        json!({ "H_upper": best })
    } else {
        // Exact enumeration, with the sandwich fallback past the cap.
        let within = matrices.iter().all(|m| m.rows() <= cli.subset_cap);
        if within {
            let mut best = Rational::zero();
            let mut witness = None;
            for m in &matrices {
                if let HoffmanResult::Exact {
                    value,
                    witness_subset,
                } = hoffman_exact(m, cli.subset_cap).map_err(cap_hint)?
                {
                    if value > best {
                        best = value;
                        witness = witness_subset;
                    }
                }
            }
            hoffman_result_json(&HoffmanResult::Exact {
                value: best,
                witness_subset: witness,
            })
        } else {
            let cfg = BoundConfig {
                iterations: 64,
                seed: cli.seed,
            };
            match &parsed {
                HoffmanInput::Polynomial(p) => tropical_hoffman_json(
                    &tropnet::hoffman::hoffman_tropical_poly(p, cli.subset_cap, cfg)?,
                ),
                HoffmanInput::Model(net) => {
                    let map = tropnet::tropicalize::tropicalize_scalar(net)?;
                    tropical_hoffman_json(&tropnet::hoffman::hoffman_tropical_map(
                        &map,
                        cli.subset_cap,
                        cfg,
                    )?)
                }
                HoffmanInput::Matrix(_) => {
                    return Err(cap_hint(tropnet::Error::SubsetCapExceeded {
                        rows: matrices[0].rows(),
                        cap: cli.subset_cap,
                    }))
                }
            }
        }
    };
    println!("{report}");
    manifest.write_output(&cli.out, "hoffman.json", &report)?;
    manifest.finish(&cli.out)
}

fn cmd_radius(cli: &Cli, model: &Path, at: &Path) -> Result<()> {
    let mut manifest = ManifestBuilder::new("radius", json!({"model": model, "at": at}), cli.seed);
    let net = load_model(model)?;
    let x = load_point(at)?;
    let map = tropnet::tropicalize::tropicalize_scalar(&net)?;
    let cfg = BoundConfig {
        iterations: 64,
        seed: cli.seed,
    };
    let hoffman = tropnet::hoffman::hoffman_tropical_map(&map, cli.subset_cap, cfg)?;
    let bound = tropnet::hoffman::radius_bound(&map, &x, cli.subset_cap, cfg)?;
    let mut report = tropical_hoffman_json(&hoffman);
    if let Value::Object(obj) = &mut report {
        obj.insert(
            "radius_bound_at".into(),
            json!({
                "x": x.iter().map(Rational::to_string).collect::<Vec<_>>(),
                "bound": bound.to_string(),
            }),
        );
    }
    println!("{report}");
    manifest.write_output(&cli.out, "radius.json", &report)?;
    manifest.finish(&cli.out)
}

fn cmd_sample(
    cli: &Cli,
    model: &Path,
    radius: f64,
    npoints: usize,
    fundamental: bool,
    grid: bool,
) -> Result<()> {
    let mut manifest = ManifestBuilder::new(
        "sample",
        json!({
            "model": model, "R": radius, "N": npoints,
            "fundamental": fundamental, "grid": grid
        }),
        cli.seed,
    );
    let net = load_model(model)?;
    let mut cfg = SampleConfig::new(radius, npoints, cli.seed);
    cfg.scheme = if grid {
        SampleScheme::Grid
    } else {
        SampleScheme::Uniform
    };
    cfg.restrict_to_fundamental = fundamental;
    let est = estimate(&net, &cfg)?;
    let arch = net
        .architecture()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("x");
    let scheme = if grid { "grid" } else { "uniform" };
    let scheme = if fundamental {
        format!("{scheme}+fundamental")
    } else {
        scheme.to_string()
    };
    let csv = format!(
        "seed,architecture,R,N,scheme,count,elapsed_seconds\n{},{},{},{},{},{},{:.6}\n",
        cli.seed, arch, radius, npoints, scheme, est.count, est.elapsed
    );
    manifest.write_text(&cli.out, "sample.csv", &csv)?;
    println!("estimated {} regions", est.count);
    manifest.finish(&cli.out)
}
