//! Exact spectral and Monte Carlo analysis of noise sensitivity, noise
//! stability, influences and majority correlation of Boolean functions on the
//! discrete cube, plus percolation-crossing and hypercube-random-walk
//! experiments at desk scale.
//!
//! Conventions used throughout:
//!
//! * A point of the cube `{0,1}^n` is packed into a `u64` index `b`, where
//!   bit `j` (0-based) of `b` is the value of variable `j`. Subset masks for
//!   Fourier coefficients use the same packing.
//! * The Fourier-Walsh basis is `u_S(x) = (-1)^{|S ∩ x|}`, and the forward
//!   transform carries the `2^{-n}` factor, so the empty-set coefficient is
//!   the mean of the function.
//! * Logarithms in the exponents `alpha` and `beta` are natural.

pub mod error;
pub mod estimate;
pub mod families;
pub mod fixed_noise;
pub mod function;
pub mod influence;
pub mod majority;
pub mod noise;
pub mod percolation;
pub mod rng;
pub mod spectrum;
pub mod table_io;
pub mod walk;

pub use error::Error;
pub use estimate::Estimate;
pub use families::FamilySpec;
pub use function::{BooleanFunction, FunctionKind};
pub use influence::InfluenceProfile;
pub use majority::WeightedMajority;
pub use noise::{GaugeResult, NoiseModel, VarianceVector};
pub use percolation::{Configuration, GridRectangle};
pub use spectrum::Spectrum;
pub use walk::WalkState;

/// Result alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Largest variable count for which a dense `2^n` table of `f64` is
/// materialized (2^28 doubles is about 2 GiB). Operations that need two
/// tables at once (a table and a spectrum workspace) advertise an effective
/// cap of `MAX_N - 1`.
pub const MAX_N: usize = 28;

pub(crate) fn check_table_n(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::contract("variable count must be at least 1"));
    }
    if n > cap {
        return Err(Error::Resource {
            what: format!("table on {n} variables"),
            cap,
        });
    }
    Ok(())
}
