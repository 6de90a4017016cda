//! Finite-blocklength decoding machinery: typical subspaces, square-root
//! measurements over random codebooks, and a self-checking property suite
//! for the operator inequalities the error analysis rests on.

pub mod decoder;
pub mod harness;
pub mod typicality;
