//! Construction and verification of quantum rank-metric codes for stacked
//! quantum memories.

pub mod f2linalg;
pub mod gabidulin;
pub mod gf2field;
pub mod parallel;
pub mod qconstruct;
pub mod stacked_sim;
