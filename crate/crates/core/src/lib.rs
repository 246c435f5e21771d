//! Finite ultraconvergence spaces.
//!
//! The crate models the ultrafilter calculus on finite index sets, spaces whose
//! convergence data is given by ultra-arrows into ultrafamilies of points,
//! continuous and étale maps between them, and the equivalence between étale
//! spaces over a base and set-valued continuous maps on it. Every structural
//! law is available as an executable checker.

pub mod ufcore;
pub mod ultrafam;
pub mod lazyuf;
pub mod ucspace;
pub mod ucmaps;
pub mod catalog;
pub mod etale;
pub mod groth;
