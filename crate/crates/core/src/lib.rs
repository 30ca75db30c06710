pub mod algebra;
pub mod filtration;
pub mod jet;
pub mod scalar;
pub mod calibration;
pub mod mc;
pub mod rees;
pub mod bounce;
pub mod constraints;
pub mod automorphisms;
pub mod bridge;
