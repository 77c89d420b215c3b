use std::time::Instant;

use zcorr::correlators::{
    k_npoint_berezin, kappa_low_codim_closed, kappa_pair_berezin, kappa_pair_expansion,
    kappa_point_closed,
};
use zcorr::kernel::PointConfig;

const RADII: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn routes_agree_for_small_dimensions() {
    for m in 1..=4 {
        for k in 1..=m {
            let start = Instant::now();
            for &r in &RADII {
                let reference = kappa_pair_berezin(r, k, m).unwrap();
                let expansion = kappa_pair_expansion(r, k, m).unwrap();
                let cfg = PointConfig::standard_pair(r, m).unwrap();
                let npoint = k_npoint_berezin(&cfg, k).unwrap();
                assert!(rel(reference, expansion) < 1e-10, "expansion k={k} m={m} r={r}: {reference} vs {expansion}");
                assert!(rel(reference, npoint) < 1e-10, "n-point k={k} m={m} r={r}: {reference} vs {npoint}");
                if k <= 3 {
                    let closed = kappa_low_codim_closed(r, k, m).unwrap();
                    assert!(rel(reference, closed) < 1e-10, "closed k={k} m={m} r={r}: {reference} vs {closed}");
                }
                if k == m {
                    let point = kappa_point_closed(r, m).unwrap();
                    assert!(rel(reference, point) < 1e-10, "point k={k} m={m} r={r}: {reference} vs {point}");
                }
            }
            eprintln!("k={k} m={m}: {:?}", start.elapsed());
        }
    }
}
