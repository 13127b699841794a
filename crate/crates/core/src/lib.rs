//! Executable generalized convexity.
//!
//! * [`funcdsl`]: expression language and catalog for the functions `f`, `g`,
//!   `h` and `φ`.
//! * [`quad`]: adaptive Gauss–Kronrod quadrature with error estimates.
//! * [`classes`]: the convexity classes as one defect functional, with a
//!   counterexample search and a sampled certifier.
//! * [`theorems`]: both sides of each Hermite–Hadamard-type inequality, as a
//!   [`theorems::Verdict`], plus the reduction checks between them.
//! * [`algebra`]: sums, scalings, h-dominance, composition with φ and the
//!   segment function.
//! * [`exec`]: order-preserving parallel or sequential batch evaluation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod classes;
pub mod exec;
pub mod funcdsl;
pub mod quad;
pub mod theorems;

pub use classes::{ClassSpec, ClassTag, Counterexample};
pub use exec::Execution;
pub use funcdsl::{FuncDef, Interval};
pub use quad::{Integral, QuadConfig};

pub use theorems::{Status, TheoremId, Verdict};
