//! Exact symbolic algebra for noncommutative polynomials: the free
//! associative algebra, the free Lie algebra in the Lyndon basis, PBW
//! symmetrization, and power-sum decomposition.

mod exact;
pub mod lie;
pub mod parse;
pub mod pbw;
pub mod poly;
pub mod powsum;
pub mod scalar;

pub use lie::{LieElement, RescaledLie};
pub use parse::parse_polynomial;
pub use pbw::{lyndon_basis, pbw_coordinates, symmetrize, CommutativeMonomialCombination, Monomial, PbwSolver};
pub use poly::{NcPolynomial, Word};
pub use powsum::{decompose_to_power_sums, powsum_merge, DecomposeOptions, PowerSumDecomposition, PowerSumTerm};
pub use scalar::Scalar;
