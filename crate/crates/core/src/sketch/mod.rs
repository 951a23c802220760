//! Tensor sketching: 2-wise independent hashes, the polynomial ring
//! `ℝ[z]/(z^k - 1)` as a semiring, and per-table sketch factors.

pub mod bench;
mod domain;
mod hash;
mod tensor;
mod vector;

pub use domain::DomainIndex;
pub use hash::{splitmix, HashFamily, HashPair, PRIME};
pub use tensor::{default_sketch_width, TensorSketch};
pub use vector::{
    poly_mul_fft, poly_mul_mod, poly_mul_naive, sketch_inner, sketch_norm_sq, SketchSemiring,
    SketchVector, FFT_THRESHOLD,
};
