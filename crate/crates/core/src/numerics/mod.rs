//! Grid eigenbases, operator application on sampled states, and exact
//! ladder-operator matrix elements.

mod apply;
mod eigen;
mod fd;
mod grid;
pub mod ladder;
mod product;

pub use apply::{apply_operator, matrix_element, single_coord, Applied};
pub use eigen::{eigensolve_fd, morse_ground_state, EigenPair, GridHamiltonian};
pub use fd::{d1, neg_d2, BandLu, SymBand};
pub use grid::{Grid1D, GridWavefunction};
pub use ladder::{ladder_matrix_element, ExactValue, HarmonicBasisState, LadderExpr, LadderOp, Oscillator};
pub use product::{product_matrix_element, split_by_axis, AxisState, Element, ProductState};
