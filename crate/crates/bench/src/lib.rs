//! Benchmark fixtures shared by the criterion targets.

use srd_core::channels::{random_channel, QuantumChannel};
use srd_core::rng::stream;
use srd_core::states::{random_density, BipartiteState, DensityMatrix};

/// Full-rank `(rho, sigma)` pair of dimension `d`.
pub fn state_pair(d: usize, seed: u64) -> (DensityMatrix, DensityMatrix) {
    let mut rng = stream(seed, 0);
    (random_density(d, d, &mut rng), random_density(d, d, &mut rng))
}

pub fn channel(d_in: usize, d_out: usize, kraus: usize, seed: u64) -> QuantumChannel {
    random_channel(d_in, d_out, kraus, &mut stream(seed, 1)).expect("enough Kraus operators")
}

pub fn two_qubit_state(seed: u64) -> BipartiteState {
    BipartiteState::new(random_density(4, 4, &mut stream(seed, 2)), 2, 2).expect("dims match")
}
