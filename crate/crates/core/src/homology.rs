//! Homology of the complexes `(S(k), δ)`.
//!
//! Slices and homology bases are memoized per `(arity, dimension)` in a
//! process-wide cache. Each entry is built at most once per racing thread and
//! is immutable after publication, so concurrent first builds are harmless.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::gf2::{kernel_basis, BitMatrix, BitVector, SpanBasis};
use crate::surjection::{differential, enumerate_basis, Chain, SurjSeq};

/// One degree of the chain complex `S(k)` together with its boundary matrix.
#[derive(Debug)]
pub struct ComplexSlice {
    pub arity: usize,
    pub dimension: usize,
    pub basis: Vec<SurjSeq>,
    index: HashMap<SurjSeq, usize>,
    /// Columns indexed by `basis`, rows by the basis one dimension lower.
    pub boundary_matrix: BitMatrix,
}

impl ComplexSlice {
    fn build(arity: usize, dimension: usize) -> Self {
        let basis = enumerate_basis(arity, dimension);
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let boundary_matrix = if dimension == 0 {
            BitMatrix::zeros(0, basis.len())
        } else {
            let lower = slice(arity, dimension - 1);
            let columns: Vec<BitVector> = basis
                .iter()
                .map(|s| {
                    lower
                        .vectorize(&differential(&Chain::from_seq(s.clone())))
                        .expect("boundary lies in the lower slice")
                })
                .collect();
            BitMatrix::from_columns(lower.basis.len(), &columns).expect("consistent lengths")
        };
        ComplexSlice {
            arity,
            dimension,
            basis,
            index,
            boundary_matrix,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, seq: &SurjSeq) -> Option<usize> {
        self.index.get(seq).copied()
    }

    /// Coordinates of `c` in this slice's basis.
    pub fn vectorize(&self, c: &Chain) -> Result<BitVector> {
        if c.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: c.arity(),
            });
        }
        if c.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: c.dimension(),
            });
        }
        Ok(BitVector::from_indices(
            self.basis.len(),
            c.terms().map(|t| self.index[t]),
        ))
    }

    pub fn chain(&self, v: &BitVector) -> Result<Chain> {
        if v.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                got: v.len(),
            });
        }
        Chain::from_terms(
            self.arity,
            self.dimension,
            v.ones().map(|i| self.basis[i].clone()),
        )
    }
}

/// A computed presentation of `H_j(S(k))`.
#[derive(Debug)]
pub struct HomologyBasis {
    pub arity: usize,
    pub dimension: usize,
    pub cycle_basis: Vec<BitVector>,
    pub boundary_basis: Vec<BitVector>,
    pub coset_reps: Vec<BitVector>,
    pub betti: usize,
    pub slice: Arc<ComplexSlice>,
    /// Boundary basis first, then coset representatives.
    reducer: SpanBasis,
}

impl HomologyBasis {
    fn build(arity: usize, dimension: usize) -> Self {
        let current = slice(arity, dimension);
        let n = current.basis.len();
        let cycle_basis = if dimension + 1 > arity {
            Vec::new()
        } else {
            kernel_basis(&current.boundary_matrix)
        };
        let mut reducer = SpanBasis::new(n, cycle_basis.len());
        let mut boundary_basis = Vec::new();
        if !cycle_basis.is_empty() {
            let upper = slice(arity, dimension + 1);
            for col in upper.boundary_matrix.columns() {
                if reducer.insert(&col).expect("lengths agree") {
                    boundary_basis.push(col);
                }
            }
        }
        let mut coset_reps = Vec::new();
        for z in &cycle_basis {
            if reducer.insert(z).expect("lengths agree") {
                coset_reps.push(z.clone());
            }
        }
        HomologyBasis {
            arity,
            dimension,
            betti: coset_reps.len(),
            cycle_basis,
            boundary_basis,
            coset_reps,
            slice: current,
            reducer,
        }
    }

    pub fn is_cycle(&self, c: &Chain) -> Result<bool> {
        let v = self.slice.vectorize(c)?;
        Ok(self.slice.boundary_matrix.mul_vec(&v)?.is_zero())
    }

    /// Coordinates of the class of the cycle `c` in the coset basis.
    pub fn class_coordinates(&self, c: &Chain) -> Result<BitVector> {
        let v = self.slice.vectorize(c)?;
        if !self.slice.boundary_matrix.mul_vec(&v)?.is_zero() {
            return Err(Error::NotACycle);
        }
        let (residual, combination) = self.reducer.reduce(&v)?;
        debug_assert!(residual.is_zero(), "cycles lie in boundaries + coset reps");
        let nb = self.boundary_basis.len();
        Ok(BitVector::from_indices(
            self.betti,
            combination.ones().filter(|&g| g >= nb).map(|g| g - nb),
        ))
    }

    /// The canonical cycle representing the class with the given coordinates.
    pub fn representative(&self, coords: &BitVector) -> Result<Chain> {
        if coords.len() != self.betti {
            return Err(Error::DimensionMismatch {
                expected: self.betti,
                got: coords.len(),
            });
        }
        let mut v = BitVector::zeros(self.slice.basis.len());
        for i in coords.ones() {
            v += &self.coset_reps[i];
        }
        self.slice.chain(&v)
    }

    pub fn is_boundary(&self, c: &Chain) -> Result<bool> {
        Ok(self.class_coordinates(c)?.is_zero())
    }
}

type Cache<T> = OnceLock<RwLock<HashMap<(usize, usize), Arc<T>>>>;

static SLICES: Cache<ComplexSlice> = OnceLock::new();
static HOMOLOGY: Cache<HomologyBasis> = OnceLock::new();

fn memoized<T>(cache: &'static Cache<T>, key: (usize, usize), build: impl FnOnce() -> T) -> Arc<T> {
    let cache = cache.get_or_init(Default::default);
    if let Some(hit) = cache.read().expect("cache lock").get(&key) {
        return hit.clone();
    }
    let built = Arc::new(build());
    cache
        .write()
        .expect("cache lock")
        .entry(key)
        .or_insert(built)
        .clone()
}

/// The memoized degree `dimension` of `S(arity)`.
pub fn slice(arity: usize, dimension: usize) -> Arc<ComplexSlice> {
    memoized(&SLICES, (arity, dimension), || {
        ComplexSlice::build(arity, dimension)
    })
}

/// The memoized homology `H_dimension(S(arity))`.
pub fn homology(arity: usize, dimension: usize) -> Arc<HomologyBasis> {
    memoized(&HOMOLOGY, (arity, dimension), || {
        HomologyBasis::build(arity, dimension)
    })
}

pub fn class_of(c: &Chain) -> Result<BitVector> {
    if c.arity() == 0 {
        return Err(Error::ZeroArity);
    }
    homology(c.arity(), c.dimension()).class_coordinates(c)
}

pub fn homologous(c1: &Chain, c2: &Chain) -> Result<bool> {
    let sum = c1.try_add(c2)?;
    if !homology(c1.arity(), c1.dimension()).is_cycle(c1)? {
        return Err(Error::NotACycle);
    }
    Ok(class_of(&sum)?.is_zero())
}

/// Betti numbers `[b_0, …, b_{arity-1}]` of `S(arity)`.
pub fn poincare_polynomial(arity: usize) -> Vec<usize> {
    (0..arity).map(|j| homology(arity, j).betti).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surjection::differential;

    fn ch(s: &str) -> Chain {
        Chain::parse(s).unwrap()
    }

    #[test]
    fn small_homology() {
        let h = homology(2, 1);
        assert_eq!(h.betti, 1);
        assert_eq!(
            h.representative(&BitVector::unit(1, 0)).unwrap(),
            ch("121+212")
        );
        assert_eq!(homology(3, 3).betti, 0);
        assert_eq!(homology(1, 0).betti, 1);
    }

    #[test]
    fn polynomials() {
        assert_eq!(poincare_polynomial(2), vec![1, 1]);
        assert_eq!(poincare_polynomial(3), vec![1, 3, 2]);
        assert_eq!(poincare_polynomial(4), vec![1, 6, 11, 6]);
    }

    #[test]
    fn classes_of_small_cycles() {
        assert!(class_of(&Chain::zero(2, 0)).unwrap().is_zero());
        assert!(!class_of(&ch("12")).unwrap().is_zero());
        assert!(class_of(&ch("12+21")).unwrap().is_zero());
        assert!(homologous(&ch("12"), &ch("21")).unwrap());
        assert!(homologous(&ch("121"), &ch("121")).is_err());
        assert_eq!(class_of(&ch("121")), Err(Error::NotACycle));
    }

    #[test]
    fn boundary_matrices_square_to_zero() {
        for k in 1..=4 {
            for j in 1..k {
                let lower = slice(k, j);
                let upper = slice(k, j + 1);
                let product = lower.boundary_matrix.mul(&upper.boundary_matrix).unwrap();
                assert!(product.is_zero(), "arity {k} dim {j}");
            }
        }
    }

    #[test]
    fn matrix_columns_agree_with_differential() {
        let s = slice(3, 2);
        let lower = slice(3, 1);
        for (j, cell) in s.basis.iter().enumerate() {
            let col = s.boundary_matrix.column(j);
            assert_eq!(
                lower.chain(&col).unwrap(),
                differential(&Chain::from_seq(cell.clone()))
            );
        }
    }

    #[test]
    fn coset_reps_are_independent_cycles() {
        for k in 2..=4 {
            for j in 0..k {
                let h = homology(k, j);
                assert_eq!(h.betti, h.cycle_basis.len() - h.boundary_basis.len());
                for (i, rep) in h.coset_reps.iter().enumerate() {
                    let c = h.slice.chain(rep).unwrap();
                    assert_eq!(class_of(&c).unwrap(), BitVector::unit(h.betti, i));
                }
            }
        }
    }
}
