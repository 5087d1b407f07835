//! Corner trees: data model, fast counting, pattern expansions and basis selection.

mod basis;
mod coeffs;
mod count;
mod tree;

pub use basis::{
    bases, independent_trees, install_bases, select_basis, Basis, BasisEntry, BasisSet,
    BASIS_VERSION, COMPLETION_PATTERN, EXPECTED_TREE_RANKS,
};
pub use coeffs::{coefficient_vector, order_coefficients, CoefficientVector};
pub use count::{count_tree, TreeCounter};
pub use tree::{enumerate_corner_trees, CornerTree, Direction, MAX_TREE_VERTICES};
