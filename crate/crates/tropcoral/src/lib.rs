//! Exact enumeration, realization and counting of tropical corals on the
//! truncated cone over R (and its Z-quotient), together with the tropical
//! Morse tree correspondence.
//!
//! All arithmetic is exact: lattice vectors are `i64` pairs and every
//! position or constraint value is a [`num::BigRational`].
//!
//! ```
//! use tropcoral::{lattice::*, coral::Degree, constraints::Constraint, counting::count};
//!
//! let d = Degree::new(
//!     vec![LatticeVector::new(6, 3), LatticeVector::new(-6, 2)],
//!     vec![LatticeVector::new(0, -5)],
//! );
//! let lam = Constraint::new(vec![QuotientClass::new(LatticeVector::new(2, 1), q(4)).unwrap()]);
//! assert_eq!(count(&d, &lam).unwrap().total, q(1));
//! ```

pub mod constraints;
pub mod coral;
pub mod coralgraph;
pub mod counting;
mod error;
pub mod io;
pub mod lattice;
mod linalg;
pub mod moduli;
pub mod morse;
pub mod plot;
pub mod quotient;
pub mod random;

pub use error::Error;
