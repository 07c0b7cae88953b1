//! Order-3 tensors, rank-one decompositions and the standard test tensors.
//!
//! Coefficients of a [`Tensor3`] are stored in `(i, j, k)` row-major order:
//! `x^{ijk}` lives at index `(i * b + j) * c + k`. The JSON forms are
//! `{"dims":[a,b,c],"coeffs":[...]}` and
//! `{"dims":[a,b,c],"terms":[{"u":[...],"v":[...],"w":[...]},...]}`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::scalar::Field;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("coefficient array has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("term {term} does not match dims {dims:?}")]
    BadTerm { term: usize, dims: [usize; 3] },
    #[error("entry is not an element of the working field")]
    ForeignEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3<E> {
    pub dims: [usize; 3],
    pub coeffs: Vec<E>,
}

impl<E> Tensor3<E> {
    pub fn new(dims: [usize; 3], coeffs: Vec<E>) -> Result<Self, TensorError> {
        let expected = dims[0] * dims[1] * dims[2];
        if coeffs.len() != expected {
            return Err(TensorError::BadLength { expected, got: coeffs.len() });
        }
        Ok(Tensor3 { dims, coeffs })
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &E {
        &self.coeffs[self.index(i, j, k)]
    }

    pub fn validate(&self) -> Result<(), TensorError> {
        let expected = self.dims.iter().product();
        if self.coeffs.len() != expected {
            return Err(TensorError::BadLength { expected, got: self.coeffs.len() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneTerm<E> {
    pub u: Vec<E>,
    pub v: Vec<E>,
    pub w: Vec<E>,
}

impl<E> RankOneTerm<E> {
    pub fn side(&self, s: usize) -> &[E] {
        match s {
            0 => &self.u,
            1 => &self.v,
            _ => &self.w,
        }
    }
}

/// A sum of rank-one terms; the nominal rank is the number of terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition<E> {
    pub dims: [usize; 3],
    pub terms: Vec<RankOneTerm<E>>,
}

impl<E: Clone> Decomposition<E> {
    pub fn new(dims: [usize; 3], terms: Vec<RankOneTerm<E>>) -> Result<Self, TensorError> {
        let d = Decomposition { dims, terms };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), TensorError> {
        for (n, t) in self.terms.iter().enumerate() {
            if t.u.len() != self.dims[0] || t.v.len() != self.dims[1] || t.w.len() != self.dims[2] {
                return Err(TensorError::BadTerm { term: n, dims: self.dims });
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// Concatenation of the two term lists.
    pub fn concat(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Decomposition { dims: self.dims, terms }
    }

    /// Applies `f` entrywise, e.g. to move integer data into a field.
    pub fn map<T>(&self, mut f: impl FnMut(&E) -> T) -> Decomposition<T> {
        Decomposition {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|t| RankOneTerm {
                    u: t.u.iter().map(&mut f).collect(),
                    v: t.v.iter().map(&mut f).collect(),
                    w: t.w.iter().map(&mut f).collect(),
                })
                .collect(),
        }
    }
}

impl Decomposition<i64> {
    pub fn to_field<F: Field>(&self, field: &F) -> Decomposition<F::Elem> {
        self.map(|&x| field.from_i64(x))
    }
}

/// `x^{ijk} = sum_s u_s[i] v_s[j] w_s[k]`.
pub fn expand<F: Field>(field: &F, d: &Decomposition<F::Elem>) -> Tensor3<F::Elem> {
    let [a, b, c] = d.dims;
    let mut coeffs = vec![field.zero(); a * b * c];
    for t in &d.terms {
        for i in 0..a {
            if field.is_zero(&t.u[i]) {
                continue;
            }
            for j in 0..b {
                let uv = field.mul(&t.u[i], &t.v[j]);
                if field.is_zero(&uv) {
                    continue;
                }
                for k in 0..c {
                    let idx = (i * b + j) * c + k;
                    coeffs[idx] = field.add(&coeffs[idx], &field.mul(&uv, &t.w[k]));
                }
            }
        }
    }
    Tensor3 { dims: d.dims, coeffs }
}

/// Writes a tensor as the sum of its nonzero coordinate terms `x^{ijk} e_i (x) e_j (x) e_k`.
pub fn coordinate_decomposition<F: Field>(field: &F, t: &Tensor3<F::Elem>) -> Decomposition<F::Elem> {
    let [a, b, c] = t.dims;
    let unit = |n: usize, i: usize, x: F::Elem| {
        let mut v = vec![field.zero(); n];
        v[i] = x;
        v
    };
    let mut terms = Vec::new();
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                let x = t.get(i, j, k);
                if !field.is_zero(x) {
                    terms.push(RankOneTerm { u: unit(a, i, x.clone()), v: unit(b, j, field.one()), w: unit(c, k, field.one()) });
                }
            }
        }
    }
    Decomposition { dims: t.dims, terms }
}

/// [`coordinate_decomposition`] for integer tensors.
pub fn integer_coordinate_decomposition(t: &Tensor3<i64>) -> Decomposition<i64> {
    let [a, b, c] = t.dims;
    let unit = |n: usize, i: usize, x: i64| {
        let mut v = vec![0; n];
        v[i] = x;
        v
    };
    let mut terms = Vec::new();
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                let x = *t.get(i, j, k);
                if x != 0 {
                    terms.push(RankOneTerm { u: unit(a, i, x), v: unit(b, j, 1), w: unit(c, k, 1) });
                }
            }
        }
    }
    Decomposition { dims: t.dims, terms }
}

/// The matrix multiplication tensor `sum e_{ij} (x) e_{jk} (x) e_{ki}` for
/// `m x n` times `n x p` matrices, in dims `(mn, np, pm)`.
///
/// `e_{ij}` of an `m x n` block is basis vector `i * n + j`.
pub fn matmul_tensor(m: usize, n: usize, p: usize) -> Decomposition<i64> {
    assert!(m >= 1 && n >= 1 && p >= 1);
    let unit = |len: usize, idx: usize| {
        let mut v = vec![0i64; len];
        v[idx] = 1;
        v
    };
    let mut terms = Vec::with_capacity(m * n * p);
    for i in 0..m {
        for j in 0..n {
            for k in 0..p {
                terms.push(RankOneTerm { u: unit(m * n, i * n + j), v: unit(n * p, j * p + k), w: unit(p * m, k * m + i) });
            }
        }
    }
    Decomposition { dims: [m * n, n * p, p * m], terms }
}

/// `r` rank-one terms with entries drawn by `field.sample`.
pub fn random_decomposition<F: Field>(field: &F, dims: [usize; 3], r: usize, rng: &mut dyn RngCore) -> Decomposition<F::Elem> {
    let mut draw = |n: usize| (0..n).map(|_| field.sample(rng)).collect::<Vec<_>>();
    let terms = (0..r).map(|_| RankOneTerm { u: draw(dims[0]), v: draw(dims[1]), w: draw(dims[2]) }).collect();
    Decomposition { dims, terms }
}

/// A decomposition with integer entries drawn uniformly from `[0, bound)`, so
/// the same point can be reduced modulo several primes.
pub fn random_integer_decomposition(dims: [usize; 3], r: usize, bound: i64, rng: &mut dyn RngCore) -> Decomposition<i64> {
    let mut draw = |n: usize| (0..n).map(|_| rng.gen_range(0..bound)).collect::<Vec<_>>();
    let terms = (0..r).map(|_| RankOneTerm { u: draw(dims[0]), v: draw(dims[1]), w: draw(dims[2]) }).collect();
    Decomposition { dims, terms }
}

/// Expected codimension `abc - r(a+b+c-2)` of the secant variety; may be `<= 0`.
pub fn expected_codim(a: usize, b: usize, c: usize, r: usize) -> i64 {
    (a * b * c) as i64 - r as i64 * (a + b + c) as i64 + 2 * r as i64
}
