//! Shared fixtures for the criterion benchmarks.

use entropygate_core::eos::linspace;
use entropygate_core::{EntropyTable, EosModel, SimConfig, SimState};

pub fn ideal_gas() -> EosModel {
    EosModel::polytropic(1.4, 1.0).expect("valid parameters")
}

/// 64×64 table of the ideal-gas entropy over [0.5, 2]².
pub fn ideal_gas_table() -> EosModel {
    let exact = ideal_gas();
    let table = EntropyTable::from_fn(linspace(0.5, 2.0, 64), linspace(0.5, 2.0, 64), |r, e| {
        exact.sigma_specific(r, e)
    })
    .expect("table inside the model domain");
    EosModel::tabulated(table)
}

/// Deterministic symmetric matrices with entries in [-1, 1].
pub fn symmetric_matrices(count: usize) -> Vec<[[f64; 3]; 3]> {
    let mut x = 0x2545_f491_4f6c_dd1d_u64;
    let mut next = move || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    (0..count)
        .map(|_| {
            let (a, b, c, d, e, f) = (next(), next(), next(), next(), next(), next());
            [[a, b, c], [b, d, e], [c, e, f]]
        })
        .collect()
}

pub fn sod_start(n: usize) -> (SimConfig, SimState) {
    let cfg = SimConfig::sod(ideal_gas(), n);
    let state = entropygate_core::euler1d::initial_state(&cfg).expect("valid Sod setup");
    (cfg, state)
}
