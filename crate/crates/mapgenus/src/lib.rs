//! Exact enumeration of connected 2ν-valent labeled maps by genus.
//!
//! Three independent routes produce the same integers: the symbolic-ν series
//! engine ([`series`], [`counts`]), closed hypergeometric forms ([`hypergeom`],
//! [`coeffs`]) and brute-force matching enumeration ([`oracle`]). A fixed-ν
//! engine ([`freud`]) and a floating-point lab ([`lab`]) cross-check the
//! underlying lattice equations.

pub mod exact;
pub mod series;
pub mod counts;
pub mod coeffs;
pub mod hypergeom;
pub mod freud;
pub mod oracle;
pub mod lab;
pub mod verify;
pub mod cli;
