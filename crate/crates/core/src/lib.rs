//! Exact arithmetic, rank bounds, rational point counts and gap-principle
//! geometry for the hyperelliptic pencil `y^2 = (x - s) Q(x)`.
//!
//! * [`arith`]: big rationals, polynomials, resultants, factorization.
//! * [`pencil`]: validation, genus, the fiber discriminant `Delta(s)`.
//! * [`rank`]: bad primes and the Mordell-Weil rank upper bound per fiber.
//! * [`points`]: exhaustive search for affine rational points of bounded height.
//! * [`gap`]: Gram lattices, ball covers, cone covers and the counting chain.
//! * [`survey`]: range surveys and prime-omega statistics behind the CLI.
//! * [`io`]: config, lattice and report formats.

pub mod arith;
pub mod gap;
pub mod io;
pub mod pencil;
pub mod points;
pub mod rank;
pub mod survey;

pub use pencil::{FiberParams, PencilError, PencilSpec};
