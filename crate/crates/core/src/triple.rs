//! The objects under study.
//!
//! A `Triple` (gram, xi, v0) packages a symmetric form whose radical is the
//! line through v0 together with an infinitesimal isometry xi that kills v0:
//!
//! * xi * v0 = 0
//! * xi^T * gram + gram * xi = 0
//! * radical(gram) = span{v0}, v0 != 0
//!
//! A `Pair` is the nondegenerate, borderless analogue. Group elements are
//! isometries of gram fixing v0; conjugation by them is the equivalence the
//! classifier decides.

use num_traits::{One, Zero};
use rand::{Rng, RngExt};

use crate::error::Error;
use crate::forms::SymForm;
use crate::mat::Mat;
use crate::rat::Rat;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Triple {
    pub gram: SymForm,
    pub xi: Mat,
    pub v0: Vec<Rat>,
}

/// Nondegenerate form plus compatible nilpotent-or-not operator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Pair {
    pub gram: SymForm,
    pub xi: Mat,
}

/// First violated triple identity, with a witness position.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum TripleViolation {
    #[error("xi does not kill v0: row {row} of xi*v0 is nonzero")]
    XiDoesNotKillV0 { row: usize },
    #[error("xi is not compatible with gram: (xi^T*gram + gram*xi)[{row}][{col}] is nonzero")]
    NotInfinitesimalIsometry { row: usize, col: usize },
    #[error("v0 is the zero vector")]
    V0Zero,
    #[error("radical of gram has dimension {dim}, expected 1")]
    RadicalDimension { dim: usize },
    #[error("v0 does not span the radical of gram")]
    V0OutsideRadical,
}

/// First violated group-element identity, with a witness position.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum GroupViolation {
    #[error("element does not fix v0: row {row} of a*v0 - v0 is nonzero")]
    V0NotFixed { row: usize },
    #[error("element is not an isometry: (a^T*gram*a - gram)[{row}][{col}] is nonzero")]
    NotIsometry { row: usize, col: usize },
}

impl Triple {
    /// Dimension checks only; the algebraic identities are `validate`'s job.
    pub fn new(gram: SymForm, xi: Mat, v0: Vec<Rat>) -> Result<Triple, Error> {
        let n = gram.dim();
        if n == 0 {
            return Err(Error::input("triple dimension must be at least 1"));
        }
        if xi.rows() != n || xi.cols() != n {
            return Err(Error::input(
                "xi must be square of the same dimension as gram",
            ));
        }
        if v0.len() != n {
            return Err(Error::input("v0 must have the same dimension as gram"));
        }
        Ok(Triple { gram, xi, v0 })
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    /// Checks the defining identities in order and reports the first failure.
    pub fn validate(&self) -> Result<(), TripleViolation> {
        let image = self.xi.mul_vec(&self.v0);
        if let Some(row) = image.iter().position(|x| !x.is_zero()) {
            return Err(TripleViolation::XiDoesNotKillV0 { row });
        }

        let skew = self
            .xi
            .transpose()
            .mul(self.gram.gram())
            .add(&self.gram.gram().mul(&self.xi));
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if !skew[(i, j)].is_zero() {
                    return Err(TripleViolation::NotInfinitesimalIsometry { row: i, col: j });
                }
            }
        }

        if self.v0.iter().all(Rat::is_zero) {
            return Err(TripleViolation::V0Zero);
        }
        let radical = self.gram.radical();
        if radical.len() != 1 {
            return Err(TripleViolation::RadicalDimension { dim: radical.len() });
        }
        let rad_mat = Mat::from_cols(&radical).expect("radical basis is rectangular");
        if rad_mat.solve(&self.v0).expect("dimensions agree").is_none() {
            return Err(TripleViolation::V0OutsideRadical);
        }
        Ok(())
    }

    /// Validation as a precondition check, for operations that require a
    /// well-formed triple.
    pub fn require_valid(&self) -> Result<(), Error> {
        self.validate()
            .map_err(|v| Error::input(format!("invalid triple: {v}")))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.xi
            .pow(self.dim())
            .map(|p| p.is_zero())
            .unwrap_or(false)
    }

    /// Adjoint action: gram and v0 are untouched, xi becomes a*xi*a^(-1).
    pub fn conjugate(&self, g: &GroupElement) -> Result<Triple, Error> {
        g.validate_for(&self.gram, &self.v0)
            .map_err(|v| Error::input(format!("invalid group element: {v}")))?;
        let inv = g
            .matrix()
            .inverse()?
            .ok_or_else(|| Error::input("group element is not invertible"))?;
        let xi = g.matrix().mul(&self.xi).mul(&inv);
        Ok(Triple {
            gram: self.gram.clone(),
            xi,
            v0: self.v0.clone(),
        })
    }
}

impl Pair {
    pub fn new(gram: SymForm, xi: Mat) -> Result<Pair, Error> {
        if xi.rows() != gram.dim() || xi.cols() != gram.dim() {
            return Err(Error::input(
                "xi must be square of the same dimension as gram",
            ));
        }
        Ok(Pair { gram, xi })
    }

    pub fn empty() -> Pair {
        Pair {
            gram: SymForm::new(Mat::zeros(0, 0)).expect("empty form"),
            xi: Mat::zeros(0, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupElement {
    a: Mat,
}

impl GroupElement {
    pub fn new(a: Mat) -> Result<GroupElement, Error> {
        if !a.is_square() {
            return Err(Error::input("group element matrix must be square"));
        }
        Ok(GroupElement { a })
    }

    pub fn identity(n: usize) -> GroupElement {
        GroupElement {
            a: Mat::identity(n),
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    /// Membership test: fixes v0 and preserves gram. Reports the first
    /// violated identity.
    pub fn validate_for(&self, gram: &SymForm, v0: &[Rat]) -> Result<(), GroupViolation> {
        let moved = self.a.mul_vec(v0);
        for (row, (x, y)) in moved.iter().zip(v0.iter()).enumerate() {
            if x != y {
                return Err(GroupViolation::V0NotFixed { row });
            }
        }
        let pulled = self.a.transpose().mul(gram.gram()).mul(&self.a);
        for i in 0..gram.dim() {
            for j in 0..gram.dim() {
                if pulled[(i, j)] != gram.gram()[(i, j)] {
                    return Err(GroupViolation::NotIsometry { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

/// Cayley transform of an infinitesimally compatible `s`: requires
/// s^T*gram_tilde + gram_tilde*s = 0 and I+s invertible, and produces the
/// bordered element
///
/// ```text
///   [ 1  b^T ]
///   [ 0  A~  ]        A~ = (I - s)(I + s)^(-1)
/// ```
///
/// which preserves [[0,0],[0,gram_tilde]] and fixes e0 exactly.
pub fn cayley_element(gram_tilde: &SymForm, s: &Mat, b: &[Rat]) -> Result<GroupElement, Error> {
    let n = gram_tilde.dim();
    if s.rows() != n || s.cols() != n {
        return Err(Error::input("s must match the dimension of gram_tilde"));
    }
    if b.len() != n {
        return Err(Error::input("b must match the dimension of gram_tilde"));
    }
    let skew = s
        .transpose()
        .mul(gram_tilde.gram())
        .add(&gram_tilde.gram().mul(s));
    if !skew.is_zero() {
        return Err(Error::input(
            "s is not infinitesimally compatible with gram_tilde",
        ));
    }
    let i_plus = Mat::identity(n).add(s);
    let inv = i_plus
        .inverse()?
        .ok_or_else(|| Error::input("I + s is singular; pick another s"))?;
    let a_tilde = Mat::identity(n).sub(s).mul(&inv);

    let mut a = Mat::zeros(n + 1, n + 1);
    a[(0, 0)] = Rat::one();
    for j in 0..n {
        a[(0, j + 1)] = b[j].clone();
        for i in 0..n {
            a[(i + 1, j + 1)] = a_tilde[(i, j)].clone();
        }
    }
    Ok(GroupElement { a })
}

/// Random compatible `s`: gram_tilde * s must be antisymmetric, so s =
/// gram_tilde^(-1) * k for an antisymmetric k with small integer entries.
pub fn random_compatible_s(gram_tilde: &SymForm, rng: &mut impl Rng) -> Result<Mat, Error> {
    let n = gram_tilde.dim();
    let inv = gram_tilde
        .gram()
        .inverse()?
        .ok_or_else(|| Error::input("gram_tilde must be nondegenerate"))?;
    let mut k = Mat::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = Rat::from_integer(rng.random_range(-2i64..=2).into());
            k[(i, j)] = v.clone();
            k[(j, i)] = -v;
        }
    }
    Ok(inv.mul(&k))
}

/// Seeded random group element in bordered form. Retries until I+s is
/// invertible; optionally insists on a nonzero translation part b.
pub fn random_group_element(
    gram_tilde: &SymForm,
    rng: &mut impl Rng,
    require_translation: bool,
) -> Result<GroupElement, Error> {
    let n = gram_tilde.dim();
    for _ in 0..64 {
        let s = random_compatible_s(gram_tilde, rng)?;
        let mut b: Vec<Rat> = (0..n)
            .map(|_| Rat::from_integer(rng.random_range(-3i64..=3).into()))
            .collect();
        if require_translation && n > 0 && b.iter().all(Rat::is_zero) {
            b[rng.random_range(0..n)] = Rat::one();
        }
        match cayley_element(gram_tilde, &s, &b) {
            Ok(g) => return Ok(g),
            Err(Error::Input(msg)) if msg.contains("singular") => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::internal(
        "could not generate an invertible Cayley parameter in 64 attempts",
    ))
}

/// Splits V into the generalized kernel and the image of xi^(dim V). The
/// triple restricts to the first factor (it contains v0), the form stays
/// nondegenerate on the second, and the factors are gram-orthogonal.
pub fn fitting_split(t: &Triple) -> Result<(Triple, Pair), Error> {
    let n = t.dim();
    let power = t.xi.pow(n)?;
    if power.is_zero() {
        return Ok((t.clone(), Pair::empty()));
    }

    let kernel = power.kernel_basis();
    let image = power.column_space_basis();
    if kernel.len() + image.len() != n {
        return Err(Error::internal("Fitting factors do not fill the space"));
    }

    let b0 = Mat::from_cols(&kernel)?;
    let bu = Mat::from_cols(&image)?;

    // xi maps each factor into itself; express the restrictions in the
    // factor bases
    let xi0 = b0
        .solve_mat(&t.xi.mul(&b0))?
        .ok_or_else(|| Error::internal("generalized kernel is not xi-invariant"))?;
    let xiu = bu
        .solve_mat(&t.xi.mul(&bu))?
        .ok_or_else(|| Error::internal("image factor is not xi-invariant"))?;

    let cross = b0.transpose().mul(t.gram.gram()).mul(&bu);
    if !cross.is_zero() {
        return Err(Error::internal("Fitting factors are not gram-orthogonal"));
    }

    let gram0 = t.gram.restrict(&kernel)?;
    let gramu = t.gram.restrict(&image)?;
    if !gramu.is_nondegenerate() {
        return Err(Error::internal("form is degenerate on the image factor"));
    }

    let v0 = b0
        .solve(&t.v0)?
        .ok_or_else(|| Error::internal("v0 escapes the generalized kernel"))?;

    let restricted = Triple::new(gram0, xi0, v0)?;
    let pair = Pair::new(gramu, xiu)?;
    Ok((restricted, pair))
}
