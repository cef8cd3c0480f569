pub mod analyzer;
pub mod cli;
pub mod crosscheck;
pub mod error;
pub mod exactfield;
pub mod polymatrix;
pub mod smith;
pub mod unipoly;
pub mod witness;
