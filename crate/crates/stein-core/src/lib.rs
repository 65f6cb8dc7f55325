//! Exact computations in the Steinberg module St(ℚ^d), its Koszul dual
//! St² = St ⊗ St, and formal multiple polylogarithms on algebraic tori.
//!
//! All arithmetic is over ℚ with arbitrary precision. Floating point appears
//! only in the numeric Fourier and series checks.

pub mod barcplx;
pub mod cones;
pub mod io;
pub mod lin;
pub mod mpl;
pub mod poly;
pub mod qlinalg;
pub mod st2;
pub mod steinberg;

pub use barcplx::BarElement;
pub use lin::Lin;
pub use mpl::{DepthOneNF, FormalII, LiGen, Monomial, MplError, PushedLi};
pub use poly::{Mono, Poly};
pub use qlinalg::{Flag, LinalgError, QMatrix, QVector, Subspace, Q};
pub use st2::{St2Element, St2Error};
pub use steinberg::{Apartment, Point, SteinbergElement, SteinbergError};
