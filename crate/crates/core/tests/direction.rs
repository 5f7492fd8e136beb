//! End-to-end direction detection on a pair of coupled logistic maps built
//! inline, so the core crate is exercised without the simulators.

use cmc::{
    causal_limit, convergence_curve, strength_profile, CrossMapConfig, EmbeddingConfig, ShiftRange,
    ShiftScan, SpectralConfig, TimeSeries,
};

fn driven_pair(n: usize) -> (TimeSeries, TimeSeries) {
    let (mut x, mut y) = (vec![0.4], vec![0.2]);
    for _ in 1..n {
        let (a, b) = (*x.last().unwrap(), *y.last().unwrap());
        x.push(3.8 * a * (1.0 - a));
        y.push(b * (3.7 - 3.7 * b - 0.2 * a));
    }
    (TimeSeries::new(x, 1.0).unwrap(), TimeSeries::new(y, 1.0).unwrap())
}

#[test]
fn driver_is_recovered_from_the_effect_manifold() {
    let (x, y) = driven_pair(3000);
    let e = EmbeddingConfig::new(2, 1).unwrap();
    let scfg = SpectralConfig::with_segment_length(32);
    let range = ShiftRange::symmetric(10);
    let cm = CrossMapConfig::default();
    let limit = causal_limit(2, 1);
    let fwd = ShiftScan::new(&y, &x, e, range, &cm).unwrap().cmc_surface(&scfg).unwrap();
    let rev = ShiftScan::new(&x, &y, e, range, &cm).unwrap().cmc_surface(&scfg).unwrap();
    let f = strength_profile(&fwd, limit).mean_strength();
    let r = strength_profile(&rev, limit).mean_strength();
    assert!(f > 3.0 * r, "x->y {f}, y->x {r}");
}

#[test]
fn cross_map_skill_grows_with_library() {
    let (x, y) = driven_pair(2000);
    let e = EmbeddingConfig::new(2, 1).unwrap();
    let curve = convergence_curve(&y, &x, e, &[20, 200, 1900]).unwrap();
    assert!(curve[2].1 > curve[0].1);
    assert!(curve[2].1 > 0.8);
}
