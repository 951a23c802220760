use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// Above this length the dense-dense product switches to the FFT path.
pub const FFT_THRESHOLD: usize = 64;

/// Coefficients of a polynomial in `z` modulo `z^k - 1`; coefficient `i`
/// is the weight of `z^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchVector(Vec<f64>);

impl SketchVector {
    pub fn zeros(k: usize) -> Self {
        SketchVector(vec![0.0; k])
    }

    /// The multiplicative identity `1 = z^0`.
    pub fn one(k: usize) -> Self {
        Self::monomial(k, 0, 1.0)
    }

    pub fn monomial(k: usize, power: usize, coeff: f64) -> Self {
        let mut v = vec![0.0; k];
        v[power % k] = coeff;
        SketchVector(v)
    }

    pub fn from_vec(coeffs: Vec<f64>) -> Self {
        SketchVector(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_assign(&mut self, other: &SketchVector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &SketchVector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a -= b;
        }
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &SketchVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.0 {
            *a *= alpha;
        }
    }

    pub fn norm_sq(&self) -> f64 {
        sketch_norm_sq(self)
    }

    fn nonzeros(&self) -> usize {
        self.0.iter().filter(|c| **c != 0.0).count()
    }
}

fn check_len(u: &SketchVector, v: &SketchVector) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            actual: v.len(),
        });
    }
    Ok(())
}

/// Reference O(k²) circular convolution.
pub fn poly_mul_naive(u: &SketchVector, v: &SketchVector) -> Result<SketchVector> {
    check_len(u, v)?;
    let k = u.len();
    let mut out = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            out[(i + j) % k] += u.0[i] * v.0[j];
        }
    }
    Ok(SketchVector(out))
}

/// Convolution touching only the nonzero coefficients of `sparse`; the
/// same sums as the naive loop with the zero terms dropped.
fn poly_mul_sparse(sparse: &SketchVector, dense: &SketchVector) -> SketchVector {
    let k = sparse.len();
    let mut out = vec![0.0; k];
    for (i, &a) in sparse.0.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let (head, tail) = out.split_at_mut(i);
        // out[(i + j) % k] += a * dense[j]
        for (o, d) in tail.iter_mut().zip(&dense.0) {
            *o += a * d;
        }
        for (o, d) in head.iter_mut().zip(&dense.0[k - i..]) {
            *o += a * d;
        }
    }
    SketchVector(out)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Circular convolution via forward/inverse FFT of length k.
pub fn poly_mul_fft(u: &SketchVector, v: &SketchVector) -> Result<SketchVector> {
    check_len(u, v)?;
    let k = u.len();
    if k == 0 {
        return Ok(SketchVector(Vec::new()));
    }
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(k), p.plan_fft_inverse(k))
    });
    let mut a: Vec<Complex64> = u.0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut b: Vec<Complex64> = v.0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let scale = 1.0 / k as f64;
    Ok(SketchVector(a.into_iter().map(|c| c.re * scale).collect()))
}

/// Product in `ℝ[z]/(z^k - 1)`. Dispatches between the naive loop (small
/// k), a sparse loop (one operand has few nonzeros, e.g. a monomial) and
/// the FFT.
pub fn poly_mul_mod(u: &SketchVector, v: &SketchVector) -> Result<SketchVector> {
    check_len(u, v)?;
    let k = u.len();
    if k <= FFT_THRESHOLD {
        return poly_mul_naive(u, v);
    }
    let (nu, nv) = (u.nonzeros(), v.nonzeros());
    let log_k = (usize::BITS - k.leading_zeros()) as usize;
    if nu.min(nv) <= 4 * log_k {
        return Ok(if nu <= nv {
            poly_mul_sparse(u, v)
        } else {
            poly_mul_sparse(v, u)
        });
    }
    poly_mul_fft(u, v)
}

pub fn sketch_norm_sq(v: &SketchVector) -> f64 {
    v.0.iter().map(|x| x * x).sum()
}

pub fn sketch_inner(u: &SketchVector, v: &SketchVector) -> Result<f64> {
    check_len(u, v)?;
    Ok(u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum())
}

/// `(ℝ[z]/(z^k - 1), +, ·)`: coordinatewise addition and circular
/// convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchSemiring {
    pub k: usize,
}

impl SketchSemiring {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "sketch dimension must be positive");
        SketchSemiring { k }
    }
}

impl Semiring for SketchSemiring {
    type Value = SketchVector;

    fn zero(&self) -> SketchVector {
        SketchVector::zeros(self.k)
    }

    fn one(&self) -> SketchVector {
        SketchVector::one(self.k)
    }

    fn add(&self, a: &SketchVector, b: &SketchVector) -> SketchVector {
        let mut out = a.clone();
        out.add_assign(b);
        out
    }

    fn add_assign(&self, acc: &mut SketchVector, b: &SketchVector) {
        acc.add_assign(b);
    }

    fn mul(&self, a: &SketchVector, b: &SketchVector) -> SketchVector {
        poly_mul_mod(a, b).expect("sketch values share the semiring's dimension")
    }

    fn width(&self) -> usize {
        self.k
    }
}
