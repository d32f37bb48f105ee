//! JSON serialization of triples.
//!
//! The on-disk schema is exact and language-neutral:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "gram": [["0", "0"], ["0", "1"]],
//!   "xi":   [["0", "2"], ["0", "0"]],
//!   "v0":   ["1", "0"]
//! }
//! ```
//!
//! Every entry is a rational rendered as `"p/q"` or `"p"`; `dim` must match
//! all matrix and vector dimensions.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::Error;
use crate::forms::SymForm;
use crate::mat::Mat;
use crate::rat::{parse_rat, Rat};
use crate::triple::Triple;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct TripleFile {
    pub dim: usize,
    pub gram: Vec<Vec<String>>,
    pub xi: Vec<Vec<String>>,
    pub v0: Vec<String>,
}

fn render_matrix(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect())
        .collect()
}

fn parse_matrix(name: &str, rows: &[Vec<String>], dim: usize) -> Result<Mat, Error> {
    if rows.len() != dim {
        return Err(Error::input(format!(
            "{name} has {} rows, expected dim={dim}",
            rows.len()
        )));
    }
    let mut parsed = Vec::with_capacity(dim);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::input(format!(
                "{name} row {i} has {} entries, expected dim={dim}",
                row.len()
            )));
        }
        let mut out = Vec::with_capacity(dim);
        for (j, entry) in row.iter().enumerate() {
            out.push(parse_rat(entry).map_err(|e| Error::input(format!("{name}[{i}][{j}]: {e}")))?);
        }
        parsed.push(out);
    }
    Mat::from_rows(parsed)
}

impl TripleFile {
    pub fn from_triple(t: &Triple) -> TripleFile {
        TripleFile {
            dim: t.dim(),
            gram: render_matrix(t.gram.gram()),
            xi: render_matrix(&t.xi),
            v0: t.v0.iter().map(Rat::to_string).collect(),
        }
    }

    pub fn to_triple(&self) -> Result<Triple, Error> {
        let gram = parse_matrix("gram", &self.gram, self.dim)?;
        let xi = parse_matrix("xi", &self.xi, self.dim)?;
        if self.v0.len() != self.dim {
            return Err(Error::input(format!(
                "v0 has {} entries, expected dim={}",
                self.v0.len(),
                self.dim
            )));
        }
        let mut v0 = Vec::with_capacity(self.dim);
        for (i, entry) in self.v0.iter().enumerate() {
            v0.push(parse_rat(entry).map_err(|e| Error::input(format!("v0[{i}]: {e}")))?);
        }
        Triple::new(SymForm::new(gram)?, xi, v0)
    }
}

pub fn triple_to_json(t: &Triple) -> String {
    serde_json::to_string_pretty(&TripleFile::from_triple(t)).expect("triple files serialize")
}

pub fn triple_from_json(s: &str) -> Result<Triple, Error> {
    let file: TripleFile =
        serde_json::from_str(s).map_err(|e| Error::input(format!("malformed JSON: {e}")))?;
    file.to_triple()
}

pub fn read_triple(path: &Path) -> Result<Triple, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    triple_from_json(&text)
}

pub fn write_triple(path: &Path, t: &Triple) -> Result<(), Error> {
    std::fs::write(path, triple_to_json(t) + "\n")
        .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))
}
