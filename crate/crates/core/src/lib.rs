//! Exact Harsanyi-dividend interaction analysis for black-box value functions.
//!
//! Given a scalar value function `v` over `n` input variables (`n <= 20`) and a
//! masking baseline, this crate tabulates all `2^n` masked outputs `v(x_T)`,
//! converts them into the unique additive interaction decomposition
//! `I(S|x) = sum_{T subseteq S} (-1)^{|S|-|T|} v(x_T)` (the Harsanyi dividend),
//! and provides the analysis layers built on top of it:
//!
//! - [`lattice`]: value/interaction tables and the subset-lattice transforms;
//! - [`salience`]: salient-concept extraction, sparsity and order statistics;
//! - [`metrics`]: Jaccard similarity of effect distributions, per-order
//!   strength, and learning-progress metrics;
//! - [`poly`] / [`perturb`]: polynomial value functions with closed-form
//!   interactions, standard AND interactions under Gaussian input noise, and
//!   the per-order effect-variance scan;
//! - [`mlp`]: a small deterministic MLP trainer used as a built-in value
//!   function for the desk-scale experiments;
//! - [`bridge`]: a JSON-lines subprocess protocol and on-disk table formats so
//!   external models can act as value functions;
//! - [`experiments`]: scripted experiment runners emitting CSV series plus
//!   JSON manifests.
//!
//! All table-producing operations are deterministic given their inputs and
//! seeds, at any thread count. Data-parallel paths use rayon and are enabled
//! by the `parallel` feature (on by default); disabling it yields equivalent
//! sequential execution.

pub mod bridge;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod lattice;
pub mod metrics;
pub mod mlp;
pub mod perturb;
pub mod poly;
pub mod salience;
pub mod selfcheck;
pub mod stats;
pub mod subset;

pub use error::{Error, Result};
pub use lattice::{
    apply_mask, build_value_table, build_value_table_seq, harsanyi_single, mobius_transform,
    zeta_reconstruct, zeta_transform, InteractionTable, MaskedSampleSpec, ValueTable,
};
pub use subset::{subsets_of_order, VariableSet, MAX_VARS};
