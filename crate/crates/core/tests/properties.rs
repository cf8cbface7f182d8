use proptest::prelude::*;

use srd_core::channels::random_channel;
use srd_core::rng::{random_unitary, stream};
use srd_core::states::random_density;
use srd_core::{d_max, srd, DensityMatrix, RenyiOrder};

fn pair(d: usize, seed: u64) -> (DensityMatrix, DensityMatrix) {
    let mut rng = stream(seed, 0);
    (random_density(d, d, &mut rng), random_density(d, d, &mut rng))
}

fn value(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> f64 {
    srd(rho, sigma.positive(), RenyiOrder::new(alpha).unwrap()).unwrap().to_f64()
}

fn order() -> impl Strategy<Value = f64> {
    (0.5f64..3.0).prop_filter("alpha = 1 is the limit case", |a| (a - 1.0).abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonnegative_between_states(d in 2usize..5, seed in any::<u64>(), alpha in order()) {
        let (rho, sigma) = pair(d, seed);
        prop_assert!(value(&rho, &sigma, alpha) >= -1e-10);
    }

    #[test]
    fn unitary_invariance(d in 2usize..5, seed in any::<u64>(), alpha in order()) {
        let (rho, sigma) = pair(d, seed);
        let u = random_unitary(d, &mut stream(seed, 1));
        let a = value(&rho, &sigma, alpha);
        let b = value(&rho.conjugate(&u), &sigma.conjugate(&u), alpha);
        prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn data_processing(d in 2usize..5, d_out in 2usize..5, seed in any::<u64>(), alpha in order()) {
        let (rho, sigma) = pair(d, seed);
        let ch = random_channel(d, d_out, d, &mut stream(seed, 2)).unwrap();
        let before = value(&rho, &sigma, alpha);
        let after = value(&ch.apply_state(&rho).unwrap(), &ch.apply_state(&sigma).unwrap(), alpha);
        prop_assert!(after <= before + 1e-8 * before.abs().max(1.0), "{after} > {before}");
    }

    #[test]
    fn monotone_in_order(d in 2usize..5, seed in any::<u64>(), a in order(), b in order()) {
        let (rho, sigma) = pair(d, seed);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (x, y) = (value(&rho, &sigma, lo), value(&rho, &sigma, hi));
        prop_assert!(x <= y + 1e-8 * y.abs().max(1.0), "{x} at {lo} > {y} at {hi}");
    }

    #[test]
    fn bounded_by_max_divergence(d in 2usize..5, seed in any::<u64>(), alpha in order()) {
        let (rho, sigma) = pair(d, seed);
        let dm = d_max(&rho, sigma.positive()).unwrap().to_f64();
        let v = value(&rho, &sigma, alpha);
        prop_assert!(v <= dm + 1e-8 * dm.abs().max(1.0), "{v} > {dm}");
    }
}
