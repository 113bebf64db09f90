//! Almost-diagonal operators, smooth atoms and molecules, and atomic decomposition.

mod almost_diagonal;
mod atoms;
mod decompose;
mod molecules;

pub use almost_diagonal::{omega_weight, omega_weight_periodic, AlmostDiagonalMatrix, OmegaParams};
pub use atoms::{
    atomic_synthesize, build_smooth_atom, build_smooth_atom_with, multi_indices, verify_atom, verify_atom_with, Atom,
    AtomFamily, AtomReport, Normalization, Patch,
};
pub use decompose::{atomic_decompose, atomic_decompose_with, DecomposeOptions};
pub use molecules::{
    molecule_matrix_check, verify_molecule, ConditionCheck, MatrixCheck, MoleculeKind, MoleculeReport, MoleculeSpec,
    PairRatio,
};
