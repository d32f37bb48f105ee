//! Explicit normal-form matrices: one emitter per indecomposable label, an
//! assembler for whole classifications, the label-string parser, and a
//! seeded conjugation fuzzer.
//!
//! Layout conventions shared by every emitter:
//! - v0 is always the first basis vector of an emitted triple, and the
//!   Gram matrix's row/column 0 is zero (the radical line comes first);
//! - chains run through consecutive basis vectors so the rank sequence of
//!   the nilpotent matrix reads off the chain lengths directly;
//! - signs are normalized so that the skew-compatibility identity
//!   N'G + GN = 0 holds exactly and classification round-trips the label.

use num_traits::{One, Signed, Zero};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::{
    canonical_string, classify, parse_poly, Classification, SignLabel, SpecialLabel, TypeLabel,
};
use crate::error::Error;
use crate::forms::SymForm;
use crate::mat::Mat;
use crate::rat::{parse_rat, rat_sqrt, Rat};
use crate::triple::{random_group_element, Pair, Triple};

fn basis_vector(n: usize, idx: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[idx] = Rat::one();
    v
}

/// Checks a supplied modulus against the stored square, or derives it when
/// the square root is exact.
fn resolve_alpha(alpha_squared: &Rat, alpha: Option<&Rat>) -> Result<Rat, Error> {
    if !alpha_squared.is_positive() {
        return Err(Error::input("alphaSquared must be positive"));
    }
    match alpha {
        Some(a) => {
            if !a.is_positive() {
                return Err(Error::input("the modulus alpha must be positive"));
            }
            if &(a * a) != alpha_squared {
                return Err(Error::input(format!(
                    "modulus mismatch: alpha = {a} squares to {} but the label carries a2 = {alpha_squared}",
                    a * a
                )));
            }
            Ok(a.clone())
        }
        None => rat_sqrt(alpha_squared).ok_or_else(|| {
            Error::input(format!(
                "a2 = {alpha_squared} has no rational square root; pass the modulus alpha explicitly"
            ))
        }),
    }
}

/// Emits the normal-form triple of a special label. The modulus alpha must
/// be supplied (or derivable by exact square root) exactly when the label
/// is a single chain.
pub fn emit_special(label: &SpecialLabel, alpha: Option<&Rat>) -> Result<Triple, Error> {
    match label {
        SpecialLabel::Tau => {
            if alpha.is_some() {
                return Err(Error::input(
                    "the modulus only applies to single-chain labels",
                ));
            }
            Triple::new(
                SymForm::new(Mat::zeros(1, 1))?,
                Mat::zeros(1, 1),
                basis_vector(1, 0),
            )
        }
        SpecialLabel::SingleChain {
            s,
            eps,
            alpha_squared,
        } => {
            if *s % 2 == 0 {
                return Err(Error::input(format!(
                    "single-chain height must be odd, got s={s}"
                )));
            }
            let a = resolve_alpha(alpha_squared, alpha)?;
            let e = eps.rat();
            let h = s - 1;
            let m = h / 2;
            let n = h + 2;
            let mut g = Mat::zeros(n, n);
            let mut nil = Mat::zeros(n, n);
            if m == 0 {
                // (v0, w) with N w = alpha^{-1} v0 and gamma(w,w) = eps
                g[(1, 1)] = e;
                nil[(0, 1)] = a.recip();
            } else {
                // basis: v0; a flag of m vectors paired hyperbolically with
                // the trailing m; the self-paired middle vector carrying
                // delta = eps * (-1)^m
                let delta = if m % 2 == 0 { e.clone() } else { -e.clone() };
                for i in 1..=m {
                    g[(i, m + 1 + i)] = Rat::one();
                    g[(m + 1 + i, i)] = Rat::one();
                }
                g[(m + 1, m + 1)] = delta.clone();
                for i in 2..=m {
                    nil[(i - 1, i)] = Rat::one();
                }
                nil[(m + 1, 1)] = Rat::one();
                nil[(m + 2, m + 1)] = -delta;
                for j in 1..m {
                    nil[(m + 2 + j, m + 1 + j)] = -Rat::one();
                }
                nil[(0, 2 * m + 1)] = e * a.recip();
            }
            Triple::new(SymForm::new(g)?, nil, basis_vector(n, 0))
        }
        SpecialLabel::DoubleChain { s } => {
            if alpha.is_some() {
                return Err(Error::input(
                    "the modulus only applies to single-chain labels",
                ));
            }
            if *s == 0 {
                return Err(Error::input("double-chain height must be at least 1"));
            }
            let h = s - 1;
            let n = 2 * h + 3;
            let mut g = Mat::zeros(n, n);
            let mut nil = Mat::zeros(n, n);
            // two hyperbolically paired groups of h+1 vectors after v0; the
            // first group's chain lands on v0, the second dies directly
            for i in 0..=h {
                g[(1 + i, h + 2 + i)] = Rat::one();
                g[(h + 2 + i, 1 + i)] = Rat::one();
            }
            nil[(0, 1 + h)] = Rat::one();
            for i in 0..h {
                nil[(2 + i, 1 + i)] = Rat::one();
            }
            for j in 1..=h {
                nil[(h + 1 + j, h + 2 + j)] = -Rat::one();
            }
            Triple::new(SymForm::new(g)?, nil, basis_vector(n, 0))
        }
    }
}

/// Emits the nondegenerate normal-form pair of a type label.
pub fn emit_type(label: &TypeLabel) -> Result<Pair, Error> {
    match label {
        TypeLabel::EvenSign { k, sign } => {
            if *k % 2 != 0 {
                return Err(Error::input(format!(
                    "signed-chain height must be even, got k={k}"
                )));
            }
            let n = k + 1;
            let mut g = Mat::zeros(n, n);
            let mut nil = Mat::zeros(n, n);
            let e = sign.rat();
            for i in 0..n {
                g[(i, k - i)] = if i % 2 == 0 { e.clone() } else { -e.clone() };
            }
            for i in 1..n {
                nil[(i - 1, i)] = Rat::one();
            }
            Pair::new(SymForm::new(g)?, nil)
        }
        TypeLabel::OddPair { k } => {
            if *k % 2 != 1 {
                return Err(Error::input(format!(
                    "chain-pair height must be odd, got k={k}"
                )));
            }
            let n = 2 * (k + 1);
            let mut g = Mat::zeros(n, n);
            let mut nil = Mat::zeros(n, n);
            // hyperbolic pairing between the two chains; the first runs
            // down the basis, the second runs up with a sign
            for i in 0..=*k {
                g[(i, k + 1 + i)] = Rat::one();
                g[(k + 1 + i, i)] = Rat::one();
            }
            for i in 0..*k {
                nil[(i + 1, i)] = Rat::one();
                nil[(k + 1 + i, k + 2 + i)] = -Rat::one();
            }
            Pair::new(SymForm::new(g)?, nil)
        }
    }
}

/// Builds the block-diagonal normal-form triple of a full classification:
/// the special block first (so v0 is the first basis vector), then the type
/// blocks in canonical order.
///
/// Only classifications shaped like the emitted decompositions are
/// accepted: no non-nilpotent part, and every type strictly shorter than a
/// non-tau special summand (the bare radical line coexists with types of
/// any height).
pub fn assemble(c: &Classification, alpha: Option<&Rat>) -> Result<Triple, Error> {
    if let Some(u) = &c.nonzero {
        return Err(Error::input(format!(
            "cannot assemble a classification with a non-nilpotent part ({u})"
        )));
    }
    if c.special != SpecialLabel::Tau {
        let s = c.special.height();
        if let Some(bad) = c.types.iter().find(|t| t.height() >= s) {
            return Err(Error::input(format!(
                "type summand {bad} must be strictly shorter than the special summand (height {s})"
            )));
        }
    }

    let special = emit_special(&c.special, alpha)?;
    let mut types = c.types.clone();
    types.sort();

    let blocks: Vec<Pair> = types.iter().map(emit_type).collect::<Result<_, _>>()?;
    let mut grams: Vec<&Mat> = vec![special.gram.gram()];
    let mut xis: Vec<&Mat> = vec![&special.xi];
    for b in &blocks {
        grams.push(b.gram.gram());
        xis.push(&b.xi);
    }
    let gram = Mat::block_diag(&grams);
    let xi = Mat::block_diag(&xis);
    let n = gram.rows();

    let out = Triple::new(SymForm::new(gram)?, xi, basis_vector(n, 0))?;
    out.require_valid()
        .map_err(|e| Error::internal(format!("assembled normal form fails validation: {e}")))?;
    Ok(out)
}

/// Multiset of Jordan chain lengths of the nilpotent matrix a
/// classification's assembly carries, longest first. The rank sequence of
/// the emitted matrix satisfies rank(N^j) = sum over chains of
/// max(length - j, 0).
pub fn chain_lengths(c: &Classification) -> Vec<usize> {
    let mut lengths = match &c.special {
        SpecialLabel::Tau => vec![1],
        SpecialLabel::SingleChain { s, .. } => vec![s + 1],
        SpecialLabel::DoubleChain { s } => vec![s + 1, *s],
    };
    for t in &c.types {
        match t {
            TypeLabel::EvenSign { k, .. } => lengths.push(k + 1),
            TypeLabel::OddPair { k } => {
                lengths.push(k + 1);
                lengths.push(k + 1);
            }
        }
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

/// Label-string parsing error: either the string deviates from the grammar
/// (with a byte position) or it is grammatical but violates a label
/// invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelError {
    Syntax { pos: usize, msg: String },
    Semantic(String),
}

impl fmt::Display for LabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelError::Syntax { pos, msg } => write!(f, "syntax error at byte {pos}: {msg}"),
            LabelError::Semantic(msg) => write!(f, "semantic error: {msg}"),
        }
    }
}

impl From<LabelError> for Error {
    fn from(e: LabelError) -> Error {
        Error::input(format!("label {e}"))
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), LabelError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(LabelError::Syntax {
                pos: self.pos,
                msg: format!("expected {lit:?}"),
            })
        }
    }

    fn parse_usize(&mut self) -> Result<usize, LabelError> {
        let digits: String = self
            .rest()
            .chars()
            .take_while(char::is_ascii_digit)
            .collect();
        if digits.is_empty() {
            return Err(LabelError::Syntax {
                pos: self.pos,
                msg: "expected an integer".into(),
            });
        }
        let value = digits.parse().map_err(|_| LabelError::Syntax {
            pos: self.pos,
            msg: "integer out of range".into(),
        })?;
        self.pos += digits.len();
        Ok(value)
    }

    fn parse_sign(&mut self) -> Result<SignLabel, LabelError> {
        if self.eat("+") {
            Ok(SignLabel::Plus)
        } else if self.eat("-") {
            Ok(SignLabel::Minus)
        } else {
            Err(LabelError::Syntax {
                pos: self.pos,
                msg: "expected '+' or '-'".into(),
            })
        }
    }

    /// Consumes up to (not including) the next occurrence of `stop`.
    fn take_until(&mut self, stop: &str) -> Result<&'a str, LabelError> {
        match self.rest().find(stop) {
            Some(idx) => {
                let token = &self.rest()[..idx];
                self.pos += idx;
                Ok(token)
            }
            None => Err(LabelError::Syntax {
                pos: self.pos,
                msg: format!("expected {stop:?} later in the string"),
            }),
        }
    }

    fn parse_rat_until(&mut self, stop: &str) -> Result<Rat, LabelError> {
        let start = self.pos;
        let token = self.take_until(stop)?;
        parse_rat(token).map_err(|e| LabelError::Syntax {
            pos: start,
            msg: match e {
                Error::Input(m) => m,
                other => other.to_string(),
            },
        })
    }
}

/// Parses a canonical label string back into a classification. Accepts the
/// exact output grammar of `canonical_string`, including the optional
/// trailing non-nilpotent segment (which `assemble` then refuses); type
/// terms are re-sorted, so a permuted but otherwise well-formed string is
/// accepted.
pub fn parse_label(s: &str) -> Result<Classification, LabelError> {
    let mut c = Cursor { s, pos: 0 };

    let special = if c.eat("S:tau") {
        SpecialLabel::Tau
    } else if c.eat("S:single[") {
        c.expect("s=")?;
        let sv = c.parse_usize()?;
        c.expect(",eps=")?;
        let eps = c.parse_sign()?;
        c.expect(",a2=")?;
        let a2 = c.parse_rat_until("]")?;
        c.expect("]")?;
        if sv % 2 == 0 {
            return Err(LabelError::Semantic(format!(
                "single-chain height must be odd, got s={sv}"
            )));
        }
        if !a2.is_positive() {
            return Err(LabelError::Semantic(format!(
                "a2 must be positive, got {a2}"
            )));
        }
        SpecialLabel::SingleChain {
            s: sv,
            eps,
            alpha_squared: a2,
        }
    } else if c.eat("S:double[") {
        c.expect("s=")?;
        let sv = c.parse_usize()?;
        c.expect("]")?;
        if sv == 0 {
            return Err(LabelError::Semantic(
                "double-chain height must be at least 1".into(),
            ));
        }
        SpecialLabel::DoubleChain { s: sv }
    } else {
        return Err(LabelError::Syntax {
            pos: 0,
            msg: "expected \"S:tau\", \"S:single[\", or \"S:double[\"".into(),
        });
    };

    let mut types = Vec::new();
    let mut nonzero = None;
    while !c.rest().is_empty() {
        let sep_pos = c.pos;
        c.expect(" + ")?;
        if nonzero.is_some() {
            return Err(LabelError::Syntax {
                pos: sep_pos,
                msg: "the U segment must be the final term".into(),
            });
        }
        if c.eat("T:even[") {
            c.expect("k=")?;
            let k = c.parse_usize()?;
            c.expect(",")?;
            let sign = c.parse_sign()?;
            c.expect("]")?;
            if k % 2 != 0 {
                return Err(LabelError::Semantic(format!(
                    "signed-chain height must be even, got k={k}"
                )));
            }
            types.push(TypeLabel::EvenSign { k, sign });
        } else if c.eat("T:pair[") {
            c.expect("k=")?;
            let k = c.parse_usize()?;
            c.expect("]")?;
            if k % 2 != 1 {
                return Err(LabelError::Semantic(format!(
                    "chain-pair height must be odd, got k={k}"
                )));
            }
            types.push(TypeLabel::OddPair { k });
        } else if c.eat("U:[") {
            c.expect("dim=")?;
            let dim = c.parse_usize()?;
            c.expect(", charpoly=")?;
            let poly_start = c.pos;
            let poly_str = c.take_until(", sig=(")?;
            let charpoly = parse_poly(poly_str).map_err(|e| LabelError::Syntax {
                pos: poly_start,
                msg: match e {
                    Error::Input(m) => m,
                    other => other.to_string(),
                },
            })?;
            c.expect(", sig=(")?;
            let p = c.parse_usize()?;
            c.expect(",")?;
            let q = c.parse_usize()?;
            c.expect(")]")?;
            if charpoly.len() != dim + 1 {
                return Err(LabelError::Semantic(format!(
                    "charpoly degree {} does not match dim={dim}",
                    charpoly.len().saturating_sub(1)
                )));
            }
            if !charpoly[dim].is_one() {
                return Err(LabelError::Semantic("charpoly must be monic".into()));
            }
            if p + q != dim {
                return Err(LabelError::Semantic(format!(
                    "signature ({p},{q}) does not fill dim={dim}"
                )));
            }
            nonzero = Some(crate::classify::NonzeroPart {
                dim,
                charpoly,
                positives: p,
                negatives: q,
            });
        } else {
            return Err(LabelError::Syntax {
                pos: c.pos,
                msg: "expected \"T:even[\", \"T:pair[\", or \"U:[\"".into(),
            });
        }
    }

    types.sort();
    Ok(Classification {
        special,
        types,
        nonzero,
    })
}

/// A conjugation trial that broke classification invariance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzCounterexample {
    pub trial: u64,
    pub expected: String,
    pub got: String,
}

enum TrialFailure {
    Mismatch(String),
    Failed(Error),
}

/// Assembles the classification, conjugates it by `trials` seeded random
/// group elements, and reclassifies each conjugate. Returns the lowest-index
/// trial whose classification differs, or None when all agree. Each trial's
/// randomness is derived from (seed, trial index) alone, so results are
/// independent of scheduling.
pub fn fuzz_label(
    c: &Classification,
    alpha: Option<&Rat>,
    trials: u64,
    seed: u64,
) -> Result<Option<FuzzCounterexample>, Error> {
    let assembled = assemble(c, alpha)?;
    let expected = classify(&assembled)?;
    if &expected != c {
        return Err(Error::internal(format!(
            "emitted normal form reclassifies as {} instead of {}",
            canonical_string(&expected),
            canonical_string(c)
        )));
    }
    if assembled.dim() == 1 {
        // the only group element fixing everything in one dimension is the
        // identity; every trial is vacuously invariant
        return Ok(None);
    }
    let expected_string = canonical_string(&expected);
    let gtilde = SymForm::new(assembled.gram.gram().delete_row_col(0))?;

    let worst = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let outcome = random_group_element(&gtilde, &mut rng, true)
                .and_then(|g| assembled.conjugate(&g))
                .and_then(|moved| classify(&moved));
            match outcome {
                Ok(got) => {
                    let got_string = canonical_string(&got);
                    if got_string == expected_string {
                        None
                    } else {
                        Some((trial, TrialFailure::Mismatch(got_string)))
                    }
                }
                Err(e) => Some((trial, TrialFailure::Failed(e))),
            }
        })
        .min_by_key(|(trial, _)| *trial);

    match worst {
        None => Ok(None),
        Some((trial, TrialFailure::Mismatch(got))) => Ok(Some(FuzzCounterexample {
            trial,
            expected: expected_string,
            got,
        })),
        Some((trial, TrialFailure::Failed(e))) => Err(Error::internal(format!(
            "conjugation trial {trial} failed: {e}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{equivalent, special_summand, type_multiplicities};
    use crate::invariants::special_height;
    use crate::rat::{rat, rat_int};
    use crate::{mat, vec_rat};

    fn single(s: usize, eps: SignLabel, a2: Rat) -> SpecialLabel {
        SpecialLabel::SingleChain {
            s,
            eps,
            alpha_squared: a2,
        }
    }

    #[test]
    fn tau_is_the_one_dimensional_zero_triple() {
        let t = emit_special(&SpecialLabel::Tau, None).unwrap();
        assert_eq!(t.gram.gram(), &Mat::zeros(1, 1));
        assert_eq!(t.xi, Mat::zeros(1, 1));
        assert_eq!(t.v0, vec_rat![1]);
    }

    #[test]
    fn single_chain_height_one_exact_matrices() {
        let t = emit_special(&single(1, SignLabel::Plus, rat(1, 4)), Some(&rat(1, 2))).unwrap();
        assert_eq!(t.gram.gram(), &mat![[0, 0], [0, 1]]);
        assert_eq!(t.xi, mat![[0, 2], [0, 0]]);

        let neg = emit_special(&single(1, SignLabel::Minus, rat_int(1)), None).unwrap();
        assert_eq!(neg.gram.gram(), &mat![[0, 0], [0, -1]]);
        assert_eq!(neg.xi, mat![[0, 1], [0, 0]]);
    }

    #[test]
    fn single_chain_height_three_exact_matrices() {
        let t = emit_special(&single(3, SignLabel::Plus, rat_int(1)), Some(&rat_int(1))).unwrap();
        assert_eq!(
            t.gram.gram(),
            &mat![[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0]]
        );
        assert_eq!(
            t.xi,
            mat![[0, 0, 0, 1], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
        );
    }

    #[test]
    fn double_chain_height_one_exact_matrices() {
        let t = emit_special(&SpecialLabel::DoubleChain { s: 1 }, None).unwrap();
        assert_eq!(t.gram.gram(), &mat![[0, 0, 0], [0, 0, 1], [0, 1, 0]]);
        assert_eq!(t.xi, mat![[0, 1, 0], [0, 0, 0], [0, 0, 0]]);
    }

    #[test]
    fn double_chain_height_two_exact_matrices() {
        let t = emit_special(&SpecialLabel::DoubleChain { s: 2 }, None).unwrap();
        assert_eq!(
            t.gram.gram(),
            &mat![
                [0, 0, 0, 0, 0],
                [0, 0, 0, 1, 0],
                [0, 0, 0, 0, 1],
                [0, 1, 0, 0, 0],
                [0, 0, 1, 0, 0]
            ]
        );
        assert_eq!(
            t.xi,
            mat![
                [0, 0, 1, 0, 0],
                [0, 0, 0, 0, 0],
                [0, 1, 0, 0, 0],
                [0, 0, 0, 0, -1],
                [0, 0, 0, 0, 0]
            ]
        );
    }

    #[test]
    fn emitted_specials_validate_and_have_the_stated_height() {
        let mut labels = vec![SpecialLabel::Tau];
        for s in [1usize, 3, 5, 7] {
            for eps in [SignLabel::Plus, SignLabel::Minus] {
                labels.push(single(s, eps, rat_int(1)));
                labels.push(single(s, eps, rat(1, 9)));
            }
        }
        for s in 1..=7usize {
            labels.push(SpecialLabel::DoubleChain { s });
        }
        for label in labels {
            let t = emit_special(&label, None).unwrap();
            assert!(t.validate().is_ok(), "{label} fails validation");
            assert_eq!(t.dim(), label.dim(), "{label} dimension");
            assert_eq!(
                special_height(&t).unwrap(),
                label.height(),
                "{label} height"
            );
            assert_eq!(special_summand(&t).unwrap(), label, "{label} round trip");
        }
    }

    #[test]
    fn modulus_handling() {
        let label = single(1, SignLabel::Plus, rat_int(2));
        assert!(matches!(emit_special(&label, None), Err(Error::Input(_))));
        let sqrt2_fake = rat_int(1);
        assert!(matches!(
            emit_special(&label, Some(&sqrt2_fake)),
            Err(Error::Input(_))
        ));

        let ok = single(1, SignLabel::Plus, rat(4, 9));
        let t = emit_special(&ok, None).unwrap();
        assert_eq!(t.xi[(0, 1)], rat(3, 2));

        assert!(matches!(
            emit_special(&SpecialLabel::Tau, Some(&rat_int(1))),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            emit_special(&SpecialLabel::DoubleChain { s: 1 }, Some(&rat_int(1))),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            emit_special(&single(1, SignLabel::Plus, rat_int(-1)), None),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn type_blocks_match_their_labels() {
        let e0 = emit_type(&TypeLabel::EvenSign {
            k: 0,
            sign: SignLabel::Minus,
        })
        .unwrap();
        assert_eq!(e0.gram.gram(), &mat![[-1]]);
        assert_eq!(e0.xi, mat![[0]]);

        let e2 = emit_type(&TypeLabel::EvenSign {
            k: 2,
            sign: SignLabel::Plus,
        })
        .unwrap();
        assert_eq!(e2.gram.gram(), &mat![[0, 0, 1], [0, -1, 0], [1, 0, 0]]);
        assert_eq!(e2.xi, mat![[0, 1, 0], [0, 0, 1], [0, 0, 0]]);

        for label in [
            TypeLabel::EvenSign {
                k: 0,
                sign: SignLabel::Plus,
            },
            TypeLabel::EvenSign {
                k: 2,
                sign: SignLabel::Minus,
            },
            TypeLabel::EvenSign {
                k: 4,
                sign: SignLabel::Plus,
            },
            TypeLabel::OddPair { k: 1 },
            TypeLabel::OddPair { k: 3 },
        ] {
            let p = emit_type(&label).unwrap();
            assert!(p.gram.is_nondegenerate(), "{label} form degenerate");
            assert!(
                p.xi.transpose()
                    .mul(p.gram.gram())
                    .add(&p.gram.gram().mul(&p.xi))
                    .is_zero(),
                "{label} breaks the compatibility identity"
            );
            assert_eq!(
                type_multiplicities(&p.xi, &p.gram).unwrap(),
                vec![label.clone()],
                "{label} round trip"
            );
        }
    }

    #[test]
    fn assemble_single_chain_with_spectator() {
        let c = Classification::nilpotent(
            single(1, SignLabel::Plus, rat(1, 4)),
            vec![TypeLabel::EvenSign {
                k: 0,
                sign: SignLabel::Plus,
            }],
        );
        let t = assemble(&c, Some(&rat(1, 2))).unwrap();
        assert_eq!(t.gram.gram(), &mat![[0, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert_eq!(t.xi, mat![[0, 2, 0], [0, 0, 0], [0, 0, 0]]);
        assert_eq!(t.v0, vec_rat![1, 0, 0]);
        assert_eq!(classify(&t).unwrap(), c);
    }

    #[test]
    fn assemble_tau_with_signed_lines() {
        let c = Classification::nilpotent(
            SpecialLabel::Tau,
            vec![
                TypeLabel::EvenSign {
                    k: 0,
                    sign: SignLabel::Plus,
                },
                TypeLabel::EvenSign {
                    k: 0,
                    sign: SignLabel::Minus,
                },
            ],
        );
        let t = assemble(&c, None).unwrap();
        assert_eq!(t.gram.gram(), &mat![[0, 0, 0], [0, 1, 0], [0, 0, -1]]);
        assert!(t.xi.is_zero());
        assert_eq!(classify(&t).unwrap(), c);
    }

    #[test]
    fn tau_admits_types_of_any_height() {
        let c = Classification::nilpotent(
            SpecialLabel::Tau,
            vec![TypeLabel::EvenSign {
                k: 4,
                sign: SignLabel::Plus,
            }],
        );
        let t = assemble(&c, None).unwrap();
        assert_eq!(classify(&t).unwrap(), c);
    }

    #[test]
    fn assemble_enforces_the_height_constraint() {
        let c = Classification::nilpotent(
            single(1, SignLabel::Plus, rat_int(1)),
            vec![TypeLabel::EvenSign {
                k: 2,
                sign: SignLabel::Plus,
            }],
        );
        match assemble(&c, None) {
            Err(Error::Input(msg)) => assert!(msg.contains("strictly shorter")),
            other => panic!("expected an input error, got {other:?}"),
        }
        // equal height is also rejected
        let eq = Classification::nilpotent(
            SpecialLabel::DoubleChain { s: 2 },
            vec![TypeLabel::EvenSign {
                k: 2,
                sign: SignLabel::Minus,
            }],
        );
        assert!(matches!(assemble(&eq, None), Err(Error::Input(_))));
    }

    #[test]
    fn assemble_refuses_a_nonzero_part() {
        let c = Classification {
            special: SpecialLabel::Tau,
            types: vec![],
            nonzero: Some(crate::classify::NonzeroPart {
                dim: 2,
                charpoly: vec![rat_int(-4), rat_int(0), rat_int(1)],
                positives: 1,
                negatives: 1,
            }),
        };
        assert!(matches!(assemble(&c, None), Err(Error::Input(_))));
    }

    #[test]
    fn assembled_grid_samples_round_trip() {
        let samples = vec![
            Classification::nilpotent(
                SpecialLabel::DoubleChain { s: 3 },
                vec![
                    TypeLabel::OddPair { k: 1 },
                    TypeLabel::EvenSign {
                        k: 2,
                        sign: SignLabel::Minus,
                    },
                ],
            ),
            Classification::nilpotent(
                single(5, SignLabel::Minus, rat(1, 9)),
                vec![
                    TypeLabel::EvenSign {
                        k: 4,
                        sign: SignLabel::Plus,
                    },
                    TypeLabel::OddPair { k: 3 },
                ],
            ),
            Classification::nilpotent(
                SpecialLabel::DoubleChain { s: 4 },
                vec![TypeLabel::OddPair { k: 3 }, TypeLabel::OddPair { k: 3 }],
            ),
            Classification::nilpotent(SpecialLabel::DoubleChain { s: 7 }, vec![]),
            Classification::nilpotent(
                single(7, SignLabel::Plus, rat_int(4)),
                vec![TypeLabel::EvenSign {
                    k: 0,
                    sign: SignLabel::Minus,
                }],
            ),
        ];
        for c in samples {
            let t = assemble(&c, None).unwrap();
            assert!(t.validate().is_ok());
            assert_eq!(
                classify(&t).unwrap(),
                c,
                "round trip of {}",
                canonical_string(&c)
            );
        }
    }

    #[test]
    fn chain_lengths_match_rank_sequences() {
        let c = Classification::nilpotent(
            SpecialLabel::DoubleChain { s: 3 },
            vec![
                TypeLabel::OddPair { k: 1 },
                TypeLabel::EvenSign {
                    k: 0,
                    sign: SignLabel::Plus,
                },
            ],
        );
        assert_eq!(chain_lengths(&c), vec![4, 3, 2, 2, 1]);
        let t = assemble(&c, None).unwrap();
        let n = t.dim();
        for j in 0..=n {
            let expected: usize = chain_lengths(&c)
                .iter()
                .map(|len| len.saturating_sub(j))
                .sum();
            assert_eq!(t.xi.pow(j).unwrap().rank(), expected, "rank of power {j}");
        }
    }

    #[test]
    fn parse_canonical_strings() {
        assert_eq!(
            parse_label("S:tau").unwrap(),
            Classification::nilpotent(SpecialLabel::Tau, vec![])
        );
        assert_eq!(
            parse_label("S:single[s=3,eps=-,a2=9]").unwrap(),
            Classification::nilpotent(single(3, SignLabel::Minus, rat_int(9)), vec![])
        );
        assert_eq!(
            parse_label("S:double[s=3] + T:pair[k=1]").unwrap(),
            Classification::nilpotent(
                SpecialLabel::DoubleChain { s: 3 },
                vec![TypeLabel::OddPair { k: 1 }]
            )
        );
        // permuted type terms are normalized
        assert_eq!(
            parse_label("S:double[s=5] + T:even[k=2,-] + T:even[k=0,+]").unwrap(),
            Classification::nilpotent(
                SpecialLabel::DoubleChain { s: 5 },
                vec![
                    TypeLabel::EvenSign {
                        k: 0,
                        sign: SignLabel::Plus
                    },
                    TypeLabel::EvenSign {
                        k: 2,
                        sign: SignLabel::Minus
                    },
                ]
            )
        );
    }

    #[test]
    fn parse_rejects_bad_syntax_with_positions() {
        match parse_label("X:tau") {
            Err(LabelError::Syntax { pos: 0, .. }) => {}
            other => panic!("expected a syntax error at 0, got {other:?}"),
        }
        match parse_label("S:single[s=1,eps=*,a2=1]") {
            Err(LabelError::Syntax { pos, .. }) => assert_eq!(pos, 17),
            other => panic!("expected a syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_label("S:tau + "),
            Err(LabelError::Syntax { .. })
        ));
        assert!(matches!(
            parse_label("S:tau+T:even[k=0,+]"),
            Err(LabelError::Syntax { .. })
        ));
        assert!(matches!(
            parse_label("S:double[s=1] extra"),
            Err(LabelError::Syntax { .. })
        ));
        assert!(matches!(parse_label(""), Err(LabelError::Syntax { .. })));
    }

    #[test]
    fn parse_rejects_semantic_violations_distinctly() {
        assert_eq!(
            parse_label("S:single[s=2,eps=+,a2=1]"),
            Err(LabelError::Semantic(
                "single-chain height must be odd, got s=2".into()
            ))
        );
        assert!(matches!(
            parse_label("S:single[s=1,eps=+,a2=-1]"),
            Err(LabelError::Semantic(_))
        ));
        assert!(matches!(
            parse_label("S:double[s=0]"),
            Err(LabelError::Semantic(_))
        ));
        assert!(matches!(
            parse_label("S:tau + T:even[k=1,+]"),
            Err(LabelError::Semantic(_))
        ));
        assert!(matches!(
            parse_label("S:tau + T:pair[k=2]"),
            Err(LabelError::Semantic(_))
        ));
    }

    #[test]
    fn parse_accepts_the_nonzero_segment_and_assemble_refuses_it() {
        let c = parse_label("S:tau + U:[dim=2, charpoly=x^2-4, sig=(1,1)]").unwrap();
        let u = c.nonzero.clone().unwrap();
        assert_eq!(u.dim, 2);
        assert_eq!(u.charpoly, vec![rat_int(-4), rat_int(0), rat_int(1)]);
        assert_eq!((u.positives, u.negatives), (1, 1));
        assert_eq!(
            canonical_string(&c),
            "S:tau + U:[dim=2, charpoly=x^2-4, sig=(1,1)]"
        );
        assert!(matches!(assemble(&c, None), Err(Error::Input(_))));

        // the segment must come last and be internally consistent
        assert!(matches!(
            parse_label("S:tau + U:[dim=1, charpoly=x, sig=(1,0)] + T:even[k=0,+]"),
            Err(LabelError::Syntax { .. })
        ));
        assert!(matches!(
            parse_label("S:tau + U:[dim=2, charpoly=x-1, sig=(1,1)]"),
            Err(LabelError::Semantic(_))
        ));
        assert!(matches!(
            parse_label("S:tau + U:[dim=2, charpoly=x^2-4, sig=(2,1)]"),
            Err(LabelError::Semantic(_))
        ));
        assert!(matches!(
            parse_label("S:tau + U:[dim=2, charpoly=2*x^2-4, sig=(1,1)]"),
            Err(LabelError::Semantic(_))
        ));
    }

    #[test]
    fn canonical_strings_round_trip_through_the_parser() {
        let samples = vec![
            Classification::nilpotent(SpecialLabel::Tau, vec![]),
            Classification::nilpotent(
                single(1, SignLabel::Plus, rat(1, 4)),
                vec![TypeLabel::EvenSign {
                    k: 0,
                    sign: SignLabel::Plus,
                }],
            ),
            Classification::nilpotent(
                SpecialLabel::DoubleChain { s: 4 },
                vec![
                    TypeLabel::OddPair { k: 1 },
                    TypeLabel::OddPair { k: 3 },
                    TypeLabel::EvenSign {
                        k: 2,
                        sign: SignLabel::Minus,
                    },
                ],
            ),
            Classification {
                special: single(3, SignLabel::Minus, rat(9, 2)),
                types: vec![TypeLabel::EvenSign {
                    k: 0,
                    sign: SignLabel::Minus,
                }],
                nonzero: Some(crate::classify::NonzeroPart {
                    dim: 3,
                    charpoly: vec![rat_int(0), rat(-3, 2), rat_int(0), rat_int(1)],
                    positives: 2,
                    negatives: 1,
                }),
            },
        ];
        for c in samples {
            let s = canonical_string(&c);
            assert_eq!(parse_label(&s).unwrap(), c, "round trip of {s}");
        }
    }

    #[test]
    fn fuzz_accepts_invariant_labels() {
        let c = parse_label("S:double[s=1]").unwrap();
        assert_eq!(fuzz_label(&c, None, 25, 7).unwrap(), None);

        let c = parse_label("S:single[s=1,eps=+,a2=1/4] + T:even[k=0,-]").unwrap();
        assert_eq!(fuzz_label(&c, Some(&rat(1, 2)), 10, 42).unwrap(), None);

        let tau = parse_label("S:tau").unwrap();
        assert_eq!(fuzz_label(&tau, None, 5, 0).unwrap(), None);
    }

    #[test]
    fn fuzz_is_deterministic_across_runs() {
        let c = parse_label("S:double[s=2] + T:even[k=0,+]").unwrap();
        let a = fuzz_label(&c, None, 8, 123).unwrap();
        let b = fuzz_label(&c, None, 8, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_moduli_are_not_equivalent() {
        let a1 = assemble(&parse_label("S:single[s=1,eps=+,a2=1]").unwrap(), None).unwrap();
        let a2 = assemble(&parse_label("S:single[s=1,eps=+,a2=4]").unwrap(), None).unwrap();
        assert!(!equivalent(&a1, &a2).unwrap());
        assert!(equivalent(&a1, &a1).unwrap());
    }
}
