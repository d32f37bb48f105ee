//! Symmetric bilinear forms over the rationals.
//!
//! A form is stored by its Gram matrix. Everything downstream leans on two
//! facts about congruence over an ordered field: diagonalization needs no
//! square roots (only the signs of the diagonal matter), and the counts of
//! positive / negative / zero diagonal entries are congruence invariants.

use num_traits::{Signed, Zero};
use std::fmt;

use crate::error::Error;
use crate::mat::Mat;
use crate::rat::Rat;

/// Symmetric Gram matrix; symmetry is enforced at construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymForm {
    gram: Mat,
}

/// Sylvester counts of a diagonalized form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
    pub nulls: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.positives, self.negatives, self.nulls)
    }
}

impl SymForm {
    pub fn new(gram: Mat) -> Result<SymForm, Error> {
        if !gram.is_square() {
            return Err(Error::input("Gram matrix must be square"));
        }
        if !gram.is_symmetric() {
            return Err(Error::input("Gram matrix must be symmetric"));
        }
        Ok(SymForm { gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// Evaluates the form on a pair of vectors.
    pub fn eval(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let gv = self.gram.mul_vec(v);
        u.iter().zip(gv.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.rank() == self.dim()
    }

    /// Canonical basis of the radical (kernel of the Gram matrix).
    pub fn radical(&self) -> Vec<Vec<Rat>> {
        self.gram.kernel_basis()
    }

    /// Gram matrix of the form on the span of the given vectors, which must
    /// be linearly independent.
    pub fn restrict(&self, basis: &[Vec<Rat>]) -> Result<SymForm, Error> {
        let b = Mat::from_cols(basis)?;
        if b.rows() != self.dim() {
            return Err(Error::input("basis vectors have the wrong dimension"));
        }
        if b.rank() != basis.len() {
            return Err(Error::input("restriction basis is linearly dependent"));
        }
        let gram = b.transpose().mul(&self.gram).mul(&b);
        SymForm::new(gram)
    }

    /// Induced form on the quotient by the radical line spanned by `v0`.
    /// The complement vectors represent the quotient classes; the result
    /// does not depend on the choice of representatives. The radical must be
    /// exactly the line through `v0`, and the induced form must come out
    /// nondegenerate (anything else is a broken invariant, not bad input).
    pub fn quotient(&self, v0: &[Rat], complement: &[Vec<Rat>]) -> Result<SymForm, Error> {
        let radical = self.radical();
        if radical.len() != 1 {
            return Err(Error::input(format!(
                "radical has dimension {}, expected 1",
                radical.len()
            )));
        }
        let rad_mat = Mat::from_cols(&radical)?;
        if v0.iter().all(Rat::is_zero) || rad_mat.solve(v0)?.is_none() {
            return Err(Error::input("v0 does not span the radical"));
        }
        let mut full = complement.to_vec();
        full.push(v0.to_vec());
        let b = Mat::from_cols(&full)?;
        if b.rank() != full.len() {
            return Err(Error::input("complement plus v0 is not a basis"));
        }
        let restricted = self.restrict(complement)?;
        if !restricted.is_nondegenerate() {
            return Err(Error::internal("quotient form is degenerate"));
        }
        Ok(restricted)
    }

    /// Congruence diagonalization: returns `p` with `p^T * gram * p` diagonal
    /// and the signature read off that diagonal. Symmetric elimination with
    /// the usual fix-ups: swap in a later nonzero diagonal entry if one
    /// exists, otherwise add a row/column pair to create one.
    pub fn diagonalize(&self) -> (Mat, Signature) {
        let n = self.dim();
        let mut g = self.gram.clone();
        let mut p = Mat::identity(n);

        // paired column/row elementary operations keep g congruent to the input
        let add_col = |g: &mut Mat, p: &mut Mat, src: usize, dst: usize, factor: &Rat| {
            for i in 0..n {
                let v = &g[(i, dst)] + &(&g[(i, src)] * factor);
                g[(i, dst)] = v;
            }
            for j in 0..n {
                let v = &g[(dst, j)] + &(&g[(src, j)] * factor);
                g[(dst, j)] = v;
            }
            for i in 0..n {
                let v = &p[(i, dst)] + &(&p[(i, src)] * factor);
                p[(i, dst)] = v;
            }
        };
        let swap = |g: &mut Mat, p: &mut Mat, a: usize, b: usize| {
            for i in 0..n {
                let (x, y) = (g[(i, a)].clone(), g[(i, b)].clone());
                g[(i, a)] = y;
                g[(i, b)] = x;
            }
            for j in 0..n {
                let (x, y) = (g[(a, j)].clone(), g[(b, j)].clone());
                g[(a, j)] = y;
                g[(b, j)] = x;
            }
            for i in 0..n {
                let (x, y) = (p[(i, a)].clone(), p[(i, b)].clone());
                p[(i, a)] = y;
                p[(i, b)] = x;
            }
        };

        for k in 0..n {
            if g[(k, k)].is_zero() {
                if let Some(l) = (k + 1..n).find(|&l| !g[(l, l)].is_zero()) {
                    swap(&mut g, &mut p, k, l);
                } else if let Some(j) = (k + 1..n).find(|&j| !g[(k, j)].is_zero()) {
                    add_col(&mut g, &mut p, j, k, &Rat::from_integer(1.into()));
                } else {
                    // row k is zero from column k on; earlier columns were
                    // already cleared, so this is a null direction
                    continue;
                }
            }
            let pivot = g[(k, k)].clone();
            for i in k + 1..n {
                if g[(i, k)].is_zero() {
                    continue;
                }
                let factor = -(&g[(i, k)] / &pivot);
                add_col(&mut g, &mut p, k, i, &factor);
            }
        }

        let mut sig = Signature {
            positives: 0,
            negatives: 0,
            nulls: 0,
        };
        for k in 0..n {
            let d = &g[(k, k)];
            if d.is_zero() {
                sig.nulls += 1;
            } else if d.is_positive() {
                sig.positives += 1;
            } else {
                sig.negatives += 1;
            }
        }
        (p, sig)
    }

    pub fn signature(&self) -> Signature {
        self.diagonalize().1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use crate::{mat, vec_rat};
    use proptest::prelude::*;

    fn form(m: Mat) -> SymForm {
        SymForm::new(m).unwrap()
    }

    #[test]
    fn construction_rejects_asymmetry() {
        assert!(SymForm::new(mat![[0, 1], [2, 0]]).is_err());
        assert!(SymForm::new(mat![[0, 1, 0], [1, 0, 0]]).is_err());
    }

    #[test]
    fn radical_of_bordered_form() {
        let f = form(mat![[0, 0], [0, 1]]);
        assert_eq!(f.radical(), vec![vec_rat![1, 0]]);
        assert!(form(Mat::identity(3)).radical().is_empty());
        assert_eq!(form(Mat::zeros(2, 2)).radical().len(), 2);
    }

    #[test]
    fn restrict_to_coordinate_plane() {
        let f = form(mat![[0, 0, 0], [0, 1, 0], [0, 0, 2]]);
        let r = f.restrict(&[vec_rat![0, 1, 0], vec_rat![0, 0, 1]]).unwrap();
        assert_eq!(r.gram(), &mat![[1, 0], [0, 2]]);
    }

    #[test]
    fn restrict_to_skew_line() {
        let f = form(mat![[0, 1], [1, 0]]);
        let r = f.restrict(&[vec_rat![1, 1]]).unwrap();
        assert_eq!(r.gram(), &mat![[2]]);
    }

    #[test]
    fn restrict_rejects_dependent_basis() {
        let f = form(Mat::identity(2));
        assert!(f.restrict(&[vec_rat![1, 0], vec_rat![2, 0]]).is_err());
    }

    #[test]
    fn quotient_of_bordered_hyperbolic_plane() {
        let f = form(mat![[0, 0, 0], [0, 0, 1], [0, 1, 0]]);
        let q = f
            .quotient(&vec_rat![1, 0, 0], &[vec_rat![0, 1, 0], vec_rat![0, 0, 1]])
            .unwrap();
        assert_eq!(q.gram(), &mat![[0, 1], [1, 0]]);
    }

    #[test]
    fn quotient_is_representative_independent() {
        let f = form(mat![[0, 0], [0, 1]]);
        let straight = f.quotient(&vec_rat![1, 0], &[vec_rat![0, 1]]).unwrap();
        // same class shifted by 5*v0
        let shifted = f.quotient(&vec_rat![1, 0], &[vec_rat![5, 1]]).unwrap();
        assert_eq!(straight.gram(), &mat![[1]]);
        assert_eq!(shifted.gram(), &mat![[1]]);
    }

    #[test]
    fn quotient_rejects_wrong_radical() {
        // radical is 2-dimensional
        let f = form(mat![[0, 0, 0], [0, 0, 0], [0, 0, 1]]);
        assert!(f
            .quotient(&vec_rat![1, 0, 0], &[vec_rat![0, 1, 0], vec_rat![0, 0, 1]])
            .is_err());
        // v0 outside the radical
        let g = form(mat![[0, 0], [0, 1]]);
        assert!(g.quotient(&vec_rat![0, 1], &[vec_rat![1, 0]]).is_err());
    }

    #[test]
    fn diagonalize_diagonal_input() {
        let f = form(mat![[1, 0], [0, -1]]);
        let (p, sig) = f.diagonalize();
        assert_eq!(p, Mat::identity(2));
        assert_eq!(
            sig,
            Signature {
                positives: 1,
                negatives: 1,
                nulls: 0
            }
        );
    }

    #[test]
    fn diagonalize_hyperbolic_plane() {
        let f = form(mat![[0, 1], [1, 0]]);
        let (p, sig) = f.diagonalize();
        let d = p.transpose().mul(f.gram()).mul(&p);
        assert_eq!(
            d,
            Mat::from_rows(vec![
                vec![rat_int(2), rat_int(0)],
                vec![rat_int(0), rat(-1, 2)],
            ])
            .unwrap()
        );
        assert_eq!(
            sig,
            Signature {
                positives: 1,
                negatives: 1,
                nulls: 0
            }
        );
    }

    #[test]
    fn diagonalize_zero_form() {
        let f = form(Mat::zeros(3, 3));
        let (p, sig) = f.diagonalize();
        assert_eq!(p, Mat::identity(3));
        assert_eq!(
            sig,
            Signature {
                positives: 0,
                negatives: 0,
                nulls: 3
            }
        );
    }

    fn unipotent(n: usize, vals: &[i64]) -> Mat {
        // (I + strictly lower) * (I + strictly upper): always invertible
        let mut lower = Mat::identity(n);
        let mut upper = Mat::identity(n);
        let mut it = vals.iter().cycle();
        for i in 0..n {
            for j in 0..i {
                lower[(i, j)] = rat_int(*it.next().unwrap());
            }
            for j in i + 1..n {
                upper[(i, j)] = rat_int(*it.next().unwrap());
            }
        }
        lower.mul(&upper)
    }

    fn small_sym() -> impl Strategy<Value = SymForm> {
        (1usize..5).prop_flat_map(|n| {
            proptest::collection::vec(-3i64..4, n * n).prop_map(move |vals| {
                let mut m = Mat::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        m[(i, j)] = rat_int(vals[i * n + j]);
                        m[(j, i)] = rat_int(vals[i * n + j]);
                    }
                }
                SymForm::new(m).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn diagonalization_is_a_congruence(f in small_sym()) {
            let (p, sig) = f.diagonalize();
            let d = p.transpose().mul(f.gram()).mul(&p);
            for i in 0..f.dim() {
                for j in 0..f.dim() {
                    if i != j {
                        prop_assert!(d[(i, j)].is_zero());
                    }
                }
            }
            prop_assert_eq!(sig.positives + sig.negatives + sig.nulls, f.dim());
            prop_assert!(p.inverse().unwrap().is_some());
        }

        #[test]
        fn signature_is_congruence_invariant(f in small_sym(), vals in proptest::collection::vec(-2i64..3, 16)) {
            let p = unipotent(f.dim(), &vals);
            let moved = SymForm::new(p.transpose().mul(f.gram()).mul(&p)).unwrap();
            prop_assert_eq!(f.signature(), moved.signature());
        }
    }
}
