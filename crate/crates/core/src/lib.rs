//! Characteristic filters of finite p-groups.
//!
//! Modules, bottom-up:
//!
//! * [`gfp`]: dense linear algebra over GF(p), matrix algebras and their radicals;
//! * [`pcgroup`]: finite p-groups given by power-commutator presentations;
//! * [`filter`]: the signed-set filter structure with evaluate, boundary, fill and generate;
//! * [`liering`]: homogeneous layers and graded brackets of the associated Lie ring;
//! * [`refine`]: ring-based refinement of filters via Jacobson radicals;
//! * [`sampling`]: random prefilters and sections for tests and benchmark corpora.

pub mod filter;
pub mod gfp;
pub mod liering;
pub mod pcgroup;
pub mod refine;
pub mod sampling;
