//! Shared fixtures for the pipeline benchmarks.

use metac_core::corpus;
use metac_core::types::{DiffAtom, MetricProgram, TimeVar};
use metac_core::verify::scale_intervals;
use metac_core::DiffSystem;

/// The dentist scenario with all durations multiplied.
pub fn scaled_dentist(factor: u32) -> MetricProgram {
    scale_intervals(&corpus::dentist(), factor)
}

/// A feasible chain `t(0) = 0, t(k+1) - t(k) >= 1` of the given length,
/// with a global deadline on the last variable.
pub fn chain_system(length: usize) -> DiffSystem {
    let mut sys = DiffSystem::new();
    sys.insert(DiffAtom::Eq { var: TimeVar { step: 0 }, value: 0 });
    for k in 0..length - 1 {
        sys.insert(DiffAtom::Leq {
            x: TimeVar { step: k },
            y: TimeVar { step: k + 1 },
            bound: -1,
        });
    }
    sys.insert(DiffAtom::Leq {
        x: TimeVar { step: length - 1 },
        y: TimeVar { step: 0 },
        bound: length as i64 * 2,
    });
    sys
}
