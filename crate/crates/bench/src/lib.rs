//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use cubic_rings::algebra::{BranchCase, CubicAlgebra};
use cubic_rings::series::RingConfig;

pub fn algebra(p: u32, case: BranchCase) -> Arc<CubicAlgebra> {
    Arc::new(CubicAlgebra::new(RingConfig::new(p, 24).expect("valid prime"), case).expect("valid case"))
}
