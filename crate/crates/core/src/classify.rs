//! Orbit labels and the classification algorithm.
//!
//! A classification is a special label (the summand containing v0) plus a
//! multiset of type labels (the nondegenerate summands), plus an optional
//! coarse record of the non-nilpotent factor. Two valid triples with
//! nilpotent xi are conjugate exactly when their classifications are equal;
//! with a non-nilpotent factor present the question is refused.
//!
//! Canonical strings render classifications per the grammar
//!
//! ```text
//!   S:tau | S:single[s=<odd>,eps=<+|->,a2=<rat>] | S:double[s=<int>]
//!   followed by " + T:even[k=<even>,<+|->]" or " + T:pair[k=<odd>]" terms
//!   in canonical order, then optionally " + U:[dim=…, charpoly=…, sig=(p,q)]"
//! ```
//!
//! Type order: ascending height; at equal height pair < even(+) < even(-).

use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::Error;
use crate::forms::SymForm;
use crate::invariants::{connection_class, induced_pair, special_height, uniform_layer};
use crate::mat::Mat;
use crate::rat::Rat;
use crate::triple::{fitting_split, Pair, Triple};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum SignLabel {
    Plus,
    Minus,
}

impl SignLabel {
    pub fn of(r: &Rat) -> Option<SignLabel> {
        if r.is_positive() {
            Some(SignLabel::Plus)
        } else if r.is_negative() {
            Some(SignLabel::Minus)
        } else {
            None
        }
    }

    pub fn rat(self) -> Rat {
        match self {
            SignLabel::Plus => Rat::one(),
            SignLabel::Minus => -Rat::one(),
        }
    }
}

impl fmt::Display for SignLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignLabel::Plus => "+",
            SignLabel::Minus => "-",
        })
    }
}

/// Indecomposable nondegenerate summand: one signed chain of even height k
/// (dimension k+1), or a hyperbolic pair of chains of odd height k
/// (dimension 2(k+1)).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum TypeLabel {
    EvenSign { k: usize, sign: SignLabel },
    OddPair { k: usize },
}

impl TypeLabel {
    pub fn height(&self) -> usize {
        match self {
            TypeLabel::EvenSign { k, .. } | TypeLabel::OddPair { k } => *k,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TypeLabel::EvenSign { k, .. } => k + 1,
            TypeLabel::OddPair { k } => 2 * (k + 1),
        }
    }

    fn order_rank(&self) -> u8 {
        match self {
            TypeLabel::OddPair { .. } => 0,
            TypeLabel::EvenSign {
                sign: SignLabel::Plus,
                ..
            } => 1,
            TypeLabel::EvenSign {
                sign: SignLabel::Minus,
                ..
            } => 2,
        }
    }
}

impl Ord for TypeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.height(), self.order_rank()).cmp(&(other.height(), other.order_rank()))
    }
}

impl PartialOrd for TypeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::EvenSign { k, sign } => write!(f, "T:even[k={k},{sign}]"),
            TypeLabel::OddPair { k } => write!(f, "T:pair[k={k}]"),
        }
    }
}

/// The summand that carries v0: the bare radical line (dimension 1), a
/// single chain of odd height s landing on v0 (dimension s+1), or a double
/// chain (dimension 2s+1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SpecialLabel {
    Tau,
    SingleChain {
        s: usize,
        eps: SignLabel,
        alpha_squared: Rat,
    },
    DoubleChain {
        s: usize,
    },
}

impl SpecialLabel {
    /// The special height s of any triple emitting this label.
    pub fn height(&self) -> usize {
        match self {
            SpecialLabel::Tau => 0,
            SpecialLabel::SingleChain { s, .. } | SpecialLabel::DoubleChain { s } => *s,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpecialLabel::Tau => 1,
            SpecialLabel::SingleChain { s, .. } => s + 1,
            SpecialLabel::DoubleChain { s } => 2 * s + 1,
        }
    }
}

impl fmt::Display for SpecialLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialLabel::Tau => f.write_str("S:tau"),
            SpecialLabel::SingleChain {
                s,
                eps,
                alpha_squared,
            } => {
                write!(f, "S:single[s={s},eps={eps},a2={alpha_squared}]")
            }
            SpecialLabel::DoubleChain { s } => write!(f, "S:double[s={s}]"),
        }
    }
}

/// Coarse record of the non-nilpotent Fitting factor: enough to refuse
/// equivalence questions honestly, not enough to decide them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NonzeroPart {
    pub dim: usize,
    /// Monic characteristic polynomial of xi on the factor, ascending
    /// coefficients.
    pub charpoly: Vec<Rat>,
    pub positives: usize,
    pub negatives: usize,
}

impl NonzeroPart {
    pub fn from_pair(pair: &Pair) -> Result<NonzeroPart, Error> {
        let sig = pair.gram.signature();
        if sig.nulls != 0 {
            return Err(Error::internal(
                "non-nilpotent factor carries a degenerate form",
            ));
        }
        Ok(NonzeroPart {
            dim: pair.dim(),
            charpoly: pair.xi.charpoly()?,
            positives: sig.positives,
            negatives: sig.negatives,
        })
    }
}

impl fmt::Display for NonzeroPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "U:[dim={}, charpoly={}, sig=({},{})]",
            self.dim,
            render_poly(&self.charpoly),
            self.positives,
            self.negatives
        )
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Classification {
    pub special: SpecialLabel,
    /// Canonically sorted multiset.
    pub types: Vec<TypeLabel>,
    pub nonzero: Option<NonzeroPart>,
}

impl Classification {
    pub fn nilpotent(special: SpecialLabel, mut types: Vec<TypeLabel>) -> Classification {
        types.sort();
        Classification {
            special,
            types,
            nonzero: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.special.dim()
            + self.types.iter().map(TypeLabel::dim).sum::<usize>()
            + self.nonzero.as_ref().map_or(0, |u| u.dim)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.special)?;
        for t in &self.types {
            write!(f, " + {t}")?;
        }
        if let Some(u) = &self.nonzero {
            write!(f, " + {u}")?;
        }
        Ok(())
    }
}

/// Deterministic rendering; equal classifications give equal strings and
/// conversely.
pub fn canonical_string(c: &Classification) -> String {
    c.to_string()
}

/// Reads the type multiset of a nilpotent pair off its layer forms: at even
/// levels the signature contributes signed chains, at odd levels hyperbolic
/// chain pairs.
pub fn type_multiplicities(nbar: &Mat, gbar: &SymForm) -> Result<Vec<TypeLabel>, Error> {
    let n = gbar.dim();
    if nbar.rows() != n || nbar.cols() != n {
        return Err(Error::input("nbar and gbar dimensions disagree"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if !nbar.pow(n)?.is_zero() {
        return Err(Error::input(
            "type multiplicities require a nilpotent operator",
        ));
    }

    let mut height = 0;
    let mut power = Mat::identity(n);
    loop {
        let next = power.mul(nbar);
        if next.is_zero() {
            break;
        }
        power = next;
        height += 1;
    }

    let mut types = Vec::new();
    let mut total = 0usize;
    for k in 0..=height {
        let layer = uniform_layer(nbar, gbar, k)?;
        let m = layer.reps.len();
        if m == 0 {
            continue;
        }
        if k % 2 == 0 {
            let sig = SymForm::new(layer.hat_form)?.signature();
            if sig.nulls != 0 {
                return Err(Error::internal(format!("layer {k} form is degenerate")));
            }
            for _ in 0..sig.positives {
                types.push(TypeLabel::EvenSign {
                    k,
                    sign: SignLabel::Plus,
                });
            }
            for _ in 0..sig.negatives {
                types.push(TypeLabel::EvenSign {
                    k,
                    sign: SignLabel::Minus,
                });
            }
        } else {
            if m % 2 != 0 {
                return Err(Error::internal(format!(
                    "odd layer {k} has odd dimension {m}"
                )));
            }
            for _ in 0..m / 2 {
                types.push(TypeLabel::OddPair { k });
            }
        }
        total += m * (k + 1);
    }
    if total != n {
        return Err(Error::internal("layer dimensions do not fill the space"));
    }
    types.sort();
    Ok(types)
}

/// Label of the special summand of a valid nilpotent triple, decided by the
/// special height and the self-pairing of the connection class.
pub fn special_summand(t: &Triple) -> Result<SpecialLabel, Error> {
    let s = special_height(t)?;
    if s == 0 {
        return Ok(SpecialLabel::Tau);
    }
    let ind = induced_pair(t)?;
    special_from_connection(&ind, s)
}

fn special_from_connection(
    ind: &crate::invariants::InducedData,
    s: usize,
) -> Result<SpecialLabel, Error> {
    let (_, pairing) = connection_class(ind, s)?;
    // a nonzero self-pairing can only occur at odd s (the decisive layer
    // form is antisymmetric otherwise), and then the chain through v0
    // closes on itself
    if s % 2 == 1 && !pairing.is_zero() {
        let eps = SignLabel::of(&pairing).expect("nonzero");
        let alpha_squared = pairing.abs().recip();
        Ok(SpecialLabel::SingleChain {
            s,
            eps,
            alpha_squared,
        })
    } else {
        Ok(SpecialLabel::DoubleChain { s })
    }
}

/// What the special summand contributes to the induced type multiset; the
/// classifier removes this before reporting the genuine type summands.
fn induced_contribution(special: &SpecialLabel) -> Vec<TypeLabel> {
    match special {
        SpecialLabel::Tau => Vec::new(),
        SpecialLabel::SingleChain { s, eps, .. } => {
            vec![TypeLabel::EvenSign {
                k: s - 1,
                sign: *eps,
            }]
        }
        SpecialLabel::DoubleChain { s } => {
            if (s - 1) % 2 == 1 {
                vec![TypeLabel::OddPair { k: s - 1 }]
            } else {
                vec![
                    TypeLabel::EvenSign {
                        k: s - 1,
                        sign: SignLabel::Plus,
                    },
                    TypeLabel::EvenSign {
                        k: s - 1,
                        sign: SignLabel::Minus,
                    },
                ]
            }
        }
    }
}

fn remove_one(types: &mut Vec<TypeLabel>, wanted: &TypeLabel) -> bool {
    match types.iter().position(|t| t == wanted) {
        Some(idx) => {
            types.remove(idx);
            true
        }
        None => false,
    }
}

/// Full classification of a valid triple. The nilpotent Fitting factor is
/// classified completely; a non-nilpotent factor is recorded coarsely.
pub fn classify(t: &Triple) -> Result<Classification, Error> {
    t.require_valid()?;
    classify_valid(t)
}

pub(crate) fn classify_valid(t: &Triple) -> Result<Classification, Error> {
    let (t0, u) = fitting_split(t)?;
    let nonzero = if u.dim() > 0 {
        Some(NonzeroPart::from_pair(&u)?)
    } else {
        None
    };

    let (special, types) = if t0.dim() == 1 {
        (SpecialLabel::Tau, Vec::new())
    } else {
        let s = special_height(&t0)?;
        let ind = induced_pair(&t0)?;
        let special = if s == 0 {
            SpecialLabel::Tau
        } else {
            special_from_connection(&ind, s)?
        };
        let mut types = type_multiplicities(&ind.nbar, &ind.gbar)?;
        for wanted in induced_contribution(&special) {
            if !remove_one(&mut types, &wanted) {
                return Err(Error::internal(format!(
                    "induced multiset is missing the special summand's contribution {wanted}"
                )));
            }
        }
        (special, types)
    };

    let mut c = Classification {
        special,
        types,
        nonzero,
    };
    c.types.sort();
    if c.dim() != t.dim() {
        return Err(Error::internal("classification dimensions do not add up"));
    }
    Ok(c)
}

/// Orbit equivalence of two valid triples. Refuses (Undecidable) when either
/// side has a non-nilpotent factor: the coarse record cannot separate orbits.
pub fn equivalent(a: &Triple, b: &Triple) -> Result<bool, Error> {
    a.require_valid()?;
    b.require_valid()?;
    let ca = classify_valid(a)?;
    let cb = classify_valid(b)?;
    if ca.nonzero.is_some() || cb.nonzero.is_some() {
        return Err(Error::undecidable(
            "non-nilpotent factor present; only nilpotent triples are fully classified",
        ));
    }
    Ok(ca == cb)
}

/// Renders a polynomial with ascending coefficients as a canonical string in
/// x: descending powers, monic-friendly ("x^2-4", "x^3-3/2*x", "1").
pub fn render_poly(coeffs: &[Rat]) -> String {
    let mut terms: Vec<(usize, &Rat)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    if terms.is_empty() {
        return "0".to_string();
    }
    terms.reverse();
    let mut out = String::new();
    for (idx, (deg, coef)) in terms.iter().enumerate() {
        let negative = coef.is_negative();
        let magnitude = coef.abs();
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push(if negative { '-' } else { '+' });
        }
        let coef_part = if magnitude.is_one() && *deg > 0 {
            None
        } else {
            Some(magnitude.to_string())
        };
        let var_part = match deg {
            0 => None,
            1 => Some("x".to_string()),
            d => Some(format!("x^{d}")),
        };
        match (coef_part, var_part) {
            (Some(c), Some(v)) => {
                out.push_str(&c);
                out.push('*');
                out.push_str(&v);
            }
            (Some(c), None) => out.push_str(&c),
            (None, Some(v)) => out.push_str(&v),
            (None, None) => unreachable!("constant terms always render a coefficient"),
        }
    }
    out
}

/// Inverse of `render_poly` on its own output (used to round-trip the U
/// segment of canonical strings). Returns ascending coefficients.
pub fn parse_poly(s: &str) -> Result<Vec<Rat>, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::input("empty polynomial"));
    }
    // split into signed terms at top-level + and - (every sign is top-level
    // in this grammar; rationals carry their sign only at the term start)
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut seen_any = false;
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            if current.trim().is_empty() {
                return Err(Error::input(format!("dangling sign in polynomial {s:?}")));
            }
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
            seen_any = true;
        } else if ch == '-' && i == 0 {
            negative = true;
        } else if ch == '+' && i == 0 {
            negative = false;
        } else {
            current.push(ch);
        }
    }
    let _ = seen_any;
    if current.trim().is_empty() {
        return Err(Error::input(format!("dangling sign in polynomial {s:?}")));
    }
    terms.push((negative, current));

    let mut coeffs: Vec<(usize, Rat)> = Vec::new();
    for (neg, term) in terms {
        let term = term.trim();
        let (coef_str, deg) = match term.find('x') {
            None => (term, 0usize),
            Some(pos) => {
                let coef = term[..pos].trim().trim_end_matches('*').trim();
                let rest = &term[pos + 1..];
                let deg = if rest.is_empty() {
                    1
                } else if let Some(exp) = rest.strip_prefix('^') {
                    exp.parse::<usize>()
                        .map_err(|_| Error::input(format!("bad exponent in term {term:?}")))?
                } else {
                    return Err(Error::input(format!("bad variable part in term {term:?}")));
                };
                (coef, deg)
            }
        };
        let mut coef = if coef_str.is_empty() {
            Rat::one()
        } else {
            crate::rat::parse_rat(coef_str)?
        };
        if neg {
            coef = -coef;
        }
        coeffs.push((deg, coef));
    }

    let top = coeffs.iter().map(|(d, _)| *d).max().unwrap_or(0);
    let mut out = vec![Rat::zero(); top + 1];
    for (deg, coef) in coeffs {
        if !out[deg].is_zero() {
            return Err(Error::input("repeated degree in polynomial"));
        }
        out[deg] = coef;
    }
    Ok(out)
}
