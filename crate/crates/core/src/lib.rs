//! Combinatorics and polyhedral geometry of the degeneration formula for
//! stable log maps to `X = X₁ ∪_D X₂`.

pub mod exactcones;
pub mod formula;
pub mod rational;
pub mod target;
pub mod graphs;
pub mod tropical;
pub mod verify;
