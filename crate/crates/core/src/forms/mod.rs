//! Discrete exterior calculus on 2D cubical grids, and period integrals of
//! continuous 1-forms over parametric cycles.

mod complex;
mod period;

pub use complex::{Chain, CubicalComplex, DiscreteForm, Hole};
pub use period::{period_integral, ws_integral, OneForm, ParametricCycle, PeriodIntegral};
