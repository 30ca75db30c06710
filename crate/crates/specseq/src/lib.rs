//! Exact linear algebra over ℚ and 𝔽_p, and the spectral sequence of a
//! bounded filtered complex computed as concrete subquotients `Z_{ip}/B_{ip}`.

pub mod complex;
pub mod field;
pub mod io;
pub mod matrix;
pub mod pages;
pub mod random;

pub use complex::{ComplexError, FilteredComplex};
pub use field::{format_rational, parse_rational, Field, Fp, F7};
pub use matrix::Matrix;
pub use pages::{
    check_filler_independence, check_page_recursion, compute_pages, direct_homology_gr, first_pages_shortcut,
    shortcut_agrees, shortcut_with, GrHomology, Page, PageSpace, Shortcut, SpecSeqError,
};

pub use num::BigRational as Q;
