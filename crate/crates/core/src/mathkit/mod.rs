//! Special functions and generic numeric solvers.

mod optimize;
mod quad;
mod roots;
mod special;
mod stats;

pub use optimize::{golden_max, maximize_box, BoxMax, BoxOptions};
pub use quad::{integrate, Quadrature};
pub use roots::{find_root, Tolerance};
pub use stats::RunningStats;
pub use special::{
    bessel_i0, bessel_i0e, binary_entropy, binary_entropy_derivative, exp1, exp1_scaled, h2,
    head_log_integral, inv_binary_entropy, tail_log_integral, tail_log_integral_scaled, Branch,
};
