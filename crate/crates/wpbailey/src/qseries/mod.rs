//! Exact kernel: Gaussian-rational coefficients and truncated Laurent series
//! in `q`, with ring operations, inversion, power substitution, q-Pochhammer
//! symbols and adaptive infinite summation.

pub mod coeff;
pub mod monomial;
pub mod poch;
pub mod series;
pub mod sum;

pub use coeff::Coefficient;
pub use monomial::QMonomial;
pub use poch::{
    mul_one_minus, one_minus_inv, poch_finite, poch_finite_series, poch_infinite,
    poch_pole_index,
};
pub use series::{Order, QSeries};
pub use sum::{adaptive_sum, SumConfig};
