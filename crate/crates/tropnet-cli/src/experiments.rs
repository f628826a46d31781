//! Batch experiments emitting CSV reports: symbolic-vs-numerical region
//! counts, monomial growth across width/depth, pruning rates, fundamental
//! domain ratio estimates, and Hoffman constant tables. Trials run in
//! parallel; rows are written in trial order so output is
//! schedule-independent.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;

use tropnet::exact::Rational;
use tropnet::hoffman::{
    hoffman_exact, hoffman_lower, hoffman_upper, stacked_pair_matrices, HoffmanResult, UpperMode,
};
use tropnet::network::Network;
use tropnet::regions::network_regions;
use tropnet::sampling::{estimate_regions, estimate_regions_fundamental, SampleConfig};
use tropnet::tropical::{TropicalPolynomial, TropicalRationalMap};
use tropnet::tropicalize::tropicalize_scalar;

use crate::manifest::ManifestBuilder;
use crate::Cli;

pub fn run(
    cli: &Cli,
    name: &str,
    archs: Option<&str>,
    trials: Option<usize>,
    npoints: Option<usize>,
    radius: Option<f64>,
) -> Result<()> {
    let mut manifest = ManifestBuilder::new(
        "experiment",
        json!({
            "name": name, "archs": archs, "trials": trials,
            "N": npoints, "R": radius
        }),
        cli.seed,
    );
    let csv = match name {
        "table-symbolic-vs-numerical" => table_symbolic_vs_numerical(
            cli,
            archs.unwrap_or("[6,2,1];[5,3,1];[4,4,1];[2,6,1]"),
            trials.unwrap_or(25),
            npoints.unwrap_or(1000),
            radius.unwrap_or(5.0),
        )?,
        "width-depth" => width_depth(cli, trials.unwrap_or(3))?,
        "pruning-rate" => pruning_rate(cli, trials.unwrap_or(5))?,
        "ratio-estimates" => ratio_estimates(cli, trials.unwrap_or(10), radius.unwrap_or(20.0))?,
        "hoffman-tables" => hoffman_tables(cli, trials.unwrap_or(8))?,
        other => bail!(
            "unknown experiment {other:?}; expected one of table-symbolic-vs-numerical, \
             width-depth, pruning-rate, ratio-estimates, hoffman-tables"
        ),
    };
    let file = format!("{name}.csv");
    manifest.write_text(&cli.out, &file, &csv)?;
    println!("wrote {}", cli.out.join(&file).display());
    manifest.finish(&cli.out)
}

fn parse_archs(spec: &str) -> Result<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|part| {
            let trimmed = part.trim().trim_start_matches('[').trim_end_matches(']');
            trimmed
                .split(',')
                .map(|t| t.trim().parse::<usize>().context("architecture entry"))
                .collect()
        })
        .collect()
}

fn arch_label(arch: &[usize]) -> String {
    format!(
        "[{}]",
        arch.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    )
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

fn table_symbolic_vs_numerical(
    cli: &Cli,
    archs: &str,
    trials: usize,
    npoints: usize,
    radius: f64,
) -> Result<String> {
    let mut csv = String::from(
        "architecture,trials,symbolic_mean,symbolic_seconds,numeric_mean,numeric_seconds,N,R\n",
    );
    for arch in parse_archs(archs)? {
        let t0 = std::time::Instant::now();
        let symbolic: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let net = Network::random(&arch, cli.seed + 1000 + t as u64)?;
                Ok(network_regions(&net)?.len() as f64)
            })
            .collect::<Result<_>>()?;
        let symbolic_seconds = t0.elapsed().as_secs_f64();
        let t1 = std::time::Instant::now();
        let numeric: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let net = Network::random(&arch, cli.seed + 1000 + t as u64)?;
                let cfg = SampleConfig::new(radius, npoints, cli.seed + 5000 + t as u64);
                Ok(estimate_regions(&net, &cfg)?.count)
            })
            .collect::<Result<_>>()?;
        let numeric_seconds = t1.elapsed().as_secs_f64();
        csv.push_str(&format!(
            "{},{},{:.4},{:.3},{:.4},{:.3},{},{}\n",
            arch_label(&arch),
            trials,
            mean(&symbolic),
            symbolic_seconds,
            mean(&numeric),
            numeric_seconds,
            npoints,
            radius
        ));
    }
    Ok(csv)
}

fn native_monomial_total(net: &Network) -> Result<f64> {
    let map = tropicalize_scalar(net)?;
    Ok((map.numerator.len() + map.denominator.len()) as f64)
}

fn width_depth(cli: &Cli, trials: usize) -> Result<String> {
    let mut csv = String::from("input_dim,k,kind,architecture,trials,mean_monomials\n");
    for dim in [2usize, 3] {
        for k in 2usize..=5 {
            for (kind, arch) in [("wide", vec![dim, k, 1]), ("deep", vec![dim, 2, k, 1])] {
                let counts: Vec<f64> = (0..trials)
                    .into_par_iter()
                    .map(|t| {
                        let net = Network::random(
                            &arch,
                            cli.seed + (dim * 100 + k * 10) as u64 + t as u64,
                        )?;
                        native_monomial_total(&net)
                    })
                    .collect::<Result<_>>()?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{:.3}\n",
                    dim,
                    k,
                    kind,
                    arch_label(&arch),
                    trials,
                    mean(&counts)
                ));
            }
        }
    }
    Ok(csv)
}

fn pruning_rate(cli: &Cli, trials: usize) -> Result<String> {
    let mut csv = String::from("width,architecture,trials,mean_native,mean_pruned,mean_rate\n");
    for k in 2usize..=6 {
        let rows: Vec<(f64, f64, f64)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let arch = vec![2, k, 1];
                let net = Network::random(&arch, cli.seed + (k * 1000) as u64 + t as u64)?;
                let map = tropicalize_scalar(&net)?;
                let native = (map.numerator.len() + map.denominator.len()) as f64;
                let pruned_map = map.prune();
                let pruned = (pruned_map.numerator.len() + pruned_map.denominator.len()) as f64;
                Ok((native, pruned, (native - pruned) / native))
            })
            .collect::<Result<_>>()?;
        let native: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let pruned: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let rate: Vec<f64> = rows.iter().map(|r| r.2).collect();
        csv.push_str(&format!(
            "{},{},{},{:.3},{:.3},{:.4}\n",
            k,
            arch_label(&[2, k, 1]),
            trials,
            mean(&native),
            mean(&pruned),
            mean(&rate)
        ));
    }
    Ok(csv)
}

fn ratio_estimates(cli: &Cli, trials: usize, radius: f64) -> Result<String> {
    let mut csv = String::from(
        "n,trials,mean_ratio,std_ratio,mean_time_ratio,std_time_ratio,N_full,N_fundamental\n",
    );
    for n in [2usize, 3] {
        let n_full = 10usize.pow(n as u32).max(500);
        let results: Vec<(f64, f64)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = cli.seed + (n * 10_000) as u64 + t as u64;
                let net = Network::random_invariant(n, seed)?;
                let cfg = SampleConfig::new(radius, n_full, seed);
                let full = estimate_regions(&net, &cfg)?;
                let fundamental = estimate_regions_fundamental(&net, &cfg)?;
                let time_ratio = if full.elapsed > 0.0 {
                    fundamental.elapsed / full.elapsed
                } else {
                    0.0
                };
                Ok((fundamental.count / full.count, time_ratio))
            })
            .collect::<Result<_>>()?;
        let ratios: Vec<f64> = results.iter().map(|r| r.0).collect();
        let time_ratios: Vec<f64> = results.iter().map(|r| r.1).collect();
        let nf: usize = (2..=n).product::<usize>().max(1);
        csv.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{},{}\n",
            n,
            trials,
            mean(&ratios),
            std_dev(&ratios),
            mean(&time_ratios),
            std_dev(&time_ratios),
            n_full,
            n_full.div_ceil(nf)
        ));
    }
    Ok(csv)
}

fn hoffman_tables(cli: &Cli, samples: usize) -> Result<String> {
    let (mp, mq, n) = (2usize, 3usize, 6usize);
    let mut csv = String::from("sample,H_L,time_HL,H,time_H,H_U,time_HU\n");
    let rows: Vec<(f64, f64, f64, f64, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let seed = cli.seed + 2 * s as u64;
            let p = TropicalPolynomial::random(n, mp, 500 + seed)?;
            let q = TropicalPolynomial::random(n, mq, 501 + seed)?;
            let f = TropicalRationalMap::new(p, q)?;
            let matrices = stacked_pair_matrices(&f);

            let t0 = std::time::Instant::now();
            let mut hl = Rational::zero();
            for (i, m) in matrices.iter().enumerate() {
                if let HoffmanResult::Lower { value, .. } =
                    hoffman_lower(m, 10, seed + 600 + i as u64)?
                {
                    if value > hl {
                        hl = value;
                    }
                }
            }
            let time_hl = t0.elapsed().as_secs_f64();

            let t1 = std::time::Instant::now();
            let mut hx = Rational::zero();
            for m in &matrices {
                if let HoffmanResult::Exact { value, .. } = hoffman_exact(m, cli.subset_cap)? {
                    if value > hx {
                        hx = value;
                    }
                }
            }
            let time_h = t1.elapsed().as_secs_f64();

            let t2 = std::time::Instant::now();
            let mut hu = 0.0f64;
            for m in &matrices {
                let r = hoffman_upper(
                    m,
                    UpperMode::Exhaustive {
                        cap: cli.subset_cap,
                    },
                )?;
                hu = hu.max(r.float_value());
            }
            let time_hu = t2.elapsed().as_secs_f64();
            Ok((hl.to_f64(), time_hl, hx.to_f64(), time_h, hu, time_hu))
        })
        .collect::<Result<_>>()?;
    for (s, row) in rows.iter().enumerate() {
        csv.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            s + 1,
            row.0,
            row.1,
            row.2,
            row.3,
            row.4,
            row.5
        ));
    }
    csv.insert_str(0, &format!("# m_p={mp} m_q={mq} n={n}\n"));
    Ok(csv)
}
