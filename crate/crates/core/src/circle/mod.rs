//! Circle-method pipeline for the modulated singular integral
//! `sup_lambda |sum_y f(x - y) e(lambda |y|^{2d}) K(y)|`.

pub mod arcs;
pub mod assemble;
pub mod carleson;
pub mod gauss;
pub mod kernel;
pub mod multiplier;
pub mod rational;

pub use arcs::{alpha_of_x, arc_table, arc_table_csv, best_approximation, circle_distance, lambda_grid, lambda_grid_csv, major_arc_membership, MajorArcParams};
pub use assemble::{weyl_multiplier_l2, ApproxParams, Assembler};
pub use carleson::carleson_operator;
pub use gauss::{gauss_sum, GaussCache};
pub use kernel::{kernel_piece, KernelKind, KernelPiece, KernelSpec};
pub use multiplier::{multiplier_m, multiplier_m_grid, phi_continuous, phi_on_dual_grid, phi_star, PhiMethod};
pub use rational::{enumerate_rs, RationalFreqPoint, ReducedRational, RsSet};
