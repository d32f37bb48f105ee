//! Conjugation invariants of a nilpotent triple.
//!
//! Everything here is computed on the quotient V / span{v0}. The complement
//! of v0 is chosen canonically (standard basis vectors away from v0's first
//! nonzero coordinate), but none of the extracted invariants depend on that
//! choice: the connection vector c is well defined modulo the image of the
//! induced nilpotent, which lies inside the denominator of the top layer.

use num_traits::Zero;

use crate::error::Error;
use crate::forms::SymForm;
use crate::mat::{Mat, SpanTracker};
use crate::rat::Rat;
use crate::triple::Triple;

/// Largest k with v0 in the image of xi^k.
///
/// Requires nilpotent xi (precondition error otherwise). k = 0 always
/// qualifies because xi^0 is the identity.
pub fn special_height(t: &Triple) -> Result<usize, Error> {
    let n = t.dim();
    let mut powers = vec![Mat::identity(n)];
    loop {
        let next = powers.last().expect("nonempty").mul(&t.xi);
        if next.is_zero() {
            break;
        }
        if powers.len() > n {
            return Err(Error::input(
                "special height requires a nilpotent xi; run the Fitting split first",
            ));
        }
        powers.push(next);
    }
    for k in (0..powers.len()).rev() {
        if powers[k].solve(&t.v0)?.is_some() {
            return Ok(k);
        }
    }
    Err(Error::internal(
        "v0 is not even in the image of the identity",
    ))
}

/// Data induced on the quotient by the line through v0: the image nbar of
/// xi, the nondegenerate form gbar, and the connection vector c
/// representing "how xi climbs onto v0".
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InducedData {
    /// Representatives of the quotient basis inside V (canonical complement).
    pub complement: Vec<Vec<Rat>>,
    pub nbar: Mat,
    pub gbar: SymForm,
    /// Solves gbar * c = phi, where phi reads off the v0-coefficient of
    /// xi applied to a lifted quotient vector.
    pub c: Vec<Rat>,
}

/// Quotient structure for a valid nilpotent triple of dimension >= 2.
pub fn induced_pair(t: &Triple) -> Result<InducedData, Error> {
    let n = t.dim();
    if n < 2 {
        return Err(Error::input("induced pair needs dimension at least 2"));
    }
    let pivot =
        t.v0.iter()
            .position(|x| !x.is_zero())
            .ok_or_else(|| Error::input("v0 is zero"))?;

    let mut complement: Vec<Vec<Rat>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i == pivot {
            continue;
        }
        let mut e = vec![Rat::zero(); n];
        e[i] = Rat::from_integer(1.into());
        complement.push(e);
    }

    // coordinates of xi(complement) in the basis {v0} + complement:
    // row 0 = phi, remaining rows = nbar
    let mut basis = vec![t.v0.clone()];
    basis.extend(complement.iter().cloned());
    let basis_mat = Mat::from_cols(&basis)?;
    let images = t.xi.mul(&Mat::from_cols(&complement)?);
    let coords = basis_mat
        .solve_mat(&images)?
        .ok_or_else(|| Error::internal("complement plus v0 fails to span"))?;

    let phi: Vec<Rat> = coords.row(0).to_vec();
    let nbar = Mat::from_fn(n - 1, n - 1, |i, j| coords[(i + 1, j)].clone());
    let gbar = t.gram.quotient(&t.v0, &complement)?;

    let skew = nbar
        .transpose()
        .mul(gbar.gram())
        .add(&gbar.gram().mul(&nbar));
    if !skew.is_zero() {
        return Err(Error::internal(
            "induced operator is not compatible with the induced form",
        ));
    }

    let c = gbar
        .gram()
        .solve(&phi)?
        .ok_or_else(|| Error::internal("induced form failed to invert"))?;

    Ok(InducedData {
        complement,
        nbar,
        gbar,
        c,
    })
}

/// One graded layer of a nilpotent pair: representatives of
/// ker(nbar^{k+1}) modulo ker(nbar^k) + nbar * ker(nbar^{k+2}), carrying the
/// form hat_k(x, y) = gbar(x, nbar^k y). Its dimension counts the Jordan
/// blocks of size k+1; the form is symmetric for even k, antisymmetric for
/// odd k, and nondegenerate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniformLayer {
    pub k: usize,
    pub reps: Vec<Vec<Rat>>,
    pub hat_form: Mat,
}

pub(crate) struct LayerParts {
    pub layer: UniformLayer,
    pub denominator: Vec<Vec<Rat>>,
}

/// Ascending powers nbar^0 .. nbar^upto, padding with zero matrices once the
/// operator dies.
pub(crate) fn nilpotent_powers(nbar: &Mat, upto: usize) -> Vec<Mat> {
    let n = nbar.rows();
    let mut powers = vec![Mat::identity(n)];
    for _ in 0..upto {
        let prev = powers.last().expect("nonempty");
        if prev.is_zero() {
            powers.push(Mat::zeros(n, n));
        } else {
            powers.push(prev.mul(nbar));
        }
    }
    powers
}

pub(crate) fn layer_from_powers(
    powers: &[Mat],
    gbar: &SymForm,
    k: usize,
) -> Result<LayerParts, Error> {
    let n = gbar.dim();
    debug_assert!(powers.len() > k + 2);

    let ker_k = powers[k].kernel_basis();
    let ker_k1 = powers[k + 1].kernel_basis();
    let ker_k2 = powers[k + 2].kernel_basis();

    let mut denominator: Vec<Vec<Rat>> = Vec::new();
    let mut span = SpanTracker::new(n);
    for v in &ker_k {
        if span.insert(v) {
            denominator.push(v.clone());
        }
    }
    for v in &ker_k2 {
        let image = powers[1].mul_vec(v);
        if span.insert(&image) {
            denominator.push(image);
        }
    }

    let mut reps = Vec::new();
    for v in &ker_k1 {
        if span.insert(v) {
            reps.push(v.clone());
        }
    }

    // the layer dimension must reproduce the Jordan block count of size k+1
    let rank = |idx: usize| n - powers[idx].kernel_basis().len();
    let expected = (rank(k) + rank(k + 2)).checked_sub(2 * rank(k + 1));
    if expected != Some(reps.len()) {
        return Err(Error::internal(format!(
            "layer {k} dimension {} disagrees with the rank sequence",
            reps.len()
        )));
    }

    let m = reps.len();
    let hat_form = Mat::from_fn(m, m, |i, j| {
        let nk_rep = powers[k].mul_vec(&reps[j]);
        gbar.gram()
            .mul_vec(&nk_rep)
            .iter()
            .zip(reps[i].iter())
            .map(|(a, b)| a * b)
            .sum()
    });

    let transposed = hat_form.transpose();
    let symmetric_ok = if k.is_multiple_of(2) {
        hat_form == transposed
    } else {
        hat_form == transposed.neg()
    };
    if !symmetric_ok {
        return Err(Error::internal(format!(
            "layer {k} form has the wrong symmetry for its parity"
        )));
    }
    if hat_form.rank() != m {
        return Err(Error::internal(format!("layer {k} form is degenerate")));
    }

    Ok(LayerParts {
        layer: UniformLayer { k, reps, hat_form },
        denominator,
    })
}

/// Layer of a nilpotent pair at level k. `nbar` must be nilpotent and
/// compatible with `gbar`.
pub fn uniform_layer(nbar: &Mat, gbar: &SymForm, k: usize) -> Result<UniformLayer, Error> {
    if nbar.rows() != gbar.dim() || nbar.cols() != gbar.dim() {
        return Err(Error::input("nbar and gbar dimensions disagree"));
    }
    let powers = nilpotent_powers(nbar, k + 2);
    if !powers[powers.len() - 1].is_zero() && !nbar.pow(nbar.rows())?.is_zero() {
        return Err(Error::input("uniform layers require a nilpotent operator"));
    }
    Ok(layer_from_powers(&powers, gbar, k)?.layer)
}

/// Class of the connection vector in the top layer (level s-1, where s is
/// the special height), together with its self-pairing under the layer form.
/// The self-pairing decides the shape of the special summand: nonzero means
/// a single chain with eps = sign(selfPairing) and alpha^2 =
/// 1/|selfPairing|, zero means a double chain.
pub fn connection_class(ind: &InducedData, s: usize) -> Result<(Vec<Rat>, Rat), Error> {
    if s == 0 {
        return Err(Error::input(
            "connection class needs special height at least 1",
        ));
    }
    let powers = nilpotent_powers(&ind.nbar, s + 1);
    if !powers[s].is_zero() {
        return Err(Error::input(
            "induced operator does not vanish at the special height",
        ));
    }

    let parts = layer_from_powers(&powers, &ind.gbar, s - 1)?;
    let mut columns = parts.denominator.clone();
    columns.extend(parts.layer.reps.iter().cloned());
    let solve_mat = Mat::from_cols(&columns)?;
    let coords = solve_mat
        .solve(&ind.c)?
        .ok_or_else(|| Error::internal("connection vector escapes the top layer decomposition"))?;

    let c_hat: Vec<Rat> = coords[parts.denominator.len()..].to_vec();
    if c_hat.iter().all(Rat::is_zero) {
        return Err(Error::internal(
            "connection class vanishes although the special height is positive",
        ));
    }

    let h = &parts.layer.hat_form;
    let mut pairing = Rat::zero();
    for i in 0..c_hat.len() {
        if c_hat[i].is_zero() {
            continue;
        }
        for j in 0..c_hat.len() {
            if !h[(i, j)].is_zero() && !c_hat[j].is_zero() {
                pairing += &(&c_hat[i] * &h[(i, j)]) * &c_hat[j];
            }
        }
    }
    Ok((c_hat, pairing))
}
