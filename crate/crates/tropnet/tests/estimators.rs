//! Cross-module estimator checks: population-level sampling means, the
//! underestimation property against exact enumeration, and the relation
//! between the plain and fundamental-domain estimators.

use tropnet::network::Network;
use tropnet::regions::network_regions;
use tropnet::sampling::{estimate_regions, estimate_regions_fundamental, SampleConfig};

#[test]
fn numeric_mean_for_3_5_1_population() {
    // Mean Jacobian-sampling estimate over 25 random [3,5,1] networks with
    // N = 5000, R = 20: expected near 21.3, asserted within +/-25%.
    let mut total = 0.0;
    let trials = 25u64;
    for t in 0..trials {
        let net = Network::random(&[3, 5, 1], 8_000 + t).unwrap();
        let cfg = SampleConfig::new(20.0, 5_000, 8_100 + t);
        total += estimate_regions(&net, &cfg).unwrap().count;
    }
    let mean = total / trials as f64;
    assert!(
        (15.99..=26.65).contains(&mean),
        "numeric mean {mean} outside +/-25% of 21.32"
    );
}

#[test]
fn sampling_never_overcounts_separated_nets() {
    // When the enumerated gradients are pairwise separated well beyond the
    // rounding resolution, the sampler cannot invent regions.
    for t in 0..2u64 {
        let net = Network::random(&[2, 6, 1], 4_000 + t).unwrap();
        let exact = network_regions(&net).unwrap();
        let mut separated = true;
        'outer: for i in 0..exact.len() {
            for j in i + 1..exact.len() {
                let gap = exact[i]
                    .map
                    .gradient
                    .iter()
                    .zip(&exact[j].map.gradient)
                    .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
                    .fold(0.0f64, f64::max);
                if gap <= 1e-6 {
                    separated = false;
                    break 'outer;
                }
            }
        }
        if !separated {
            continue;
        }
        let cfg = SampleConfig::new(20.0, 5_000, 4_700 + t);
        let est = estimate_regions(&net, &cfg).unwrap();
        assert!(
            est.count <= exact.len() as f64,
            "net {t}: estimate {} above exact {}",
            est.count,
            exact.len()
        );
    }
}

#[test]
fn fundamental_estimator_never_undercounts_the_plain_one() {
    // On invariant networks at the same effective point density, multiplicity
    // weighting makes the fundamental estimate an upper-style count.
    for t in 0..6u64 {
        for n in [2usize, 3] {
            let net = Network::random_invariant(n, 300 + t).unwrap();
            let cfg = SampleConfig::new(20.0, 10usize.pow(n as u32).max(500), 400 + t);
            let plain = estimate_regions(&net, &cfg).unwrap();
            let fundamental = estimate_regions_fundamental(&net, &cfg).unwrap();
            assert!(
                fundamental.count >= plain.count,
                "n={n} trial {t}: fundamental {} < plain {}",
                fundamental.count,
                plain.count
            );
        }
    }
}
