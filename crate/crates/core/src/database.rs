//! The bundled lattice database and the plain-text lattice format.
//!
//! A record is a block of `key value` lines closed by `end`:
//!
//! ```text
//! name S_1
//! rank 3
//! gram
//! 6 0 0
//! 0 -2 0
//! 0 0 -2
//! neg: (0,1,0), (0,0,1), (1,-2,0), (1,0,-2), (2,-3,-2), (2,-2,-3)
//! end
//! ```
//!
//! Optional keys: `index`, `expected_beff:`, `expected_n:`, `expected_bnef:`,
//! `generators:` (a trailing `*` marks an uncertified degree), `involution:`
//! (rows are the images of the basis vectors; may repeat) and `stored: true`.
//! Lines starting with `#` are comments.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith::IntMatrix;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::vector::{parse_class_list, IntVector, ParseVectorError};

const BUNDLED: &str = include_str!("../data/k3rank3.txt");

/// A generator degree as listed in a table, with its uncertified flag.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExpectedDegree {
    pub class: IntVector,
    #[serde(default)]
    pub starred: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRecord {
    #[serde(default)]
    pub index: Option<usize>,
    pub name: String,
    pub gram: Vec<Vec<i64>>,
    #[serde(default)]
    pub neg_curves: Option<Vec<IntVector>>,
    #[serde(default)]
    pub expected_beff: Option<Vec<IntVector>>,
    #[serde(default)]
    pub expected_n: Option<Vec<IntVector>>,
    #[serde(default)]
    pub expected_bnef: Option<Vec<IntVector>>,
    #[serde(default)]
    pub expected_generators: Option<Vec<ExpectedDegree>>,
    #[serde(default)]
    pub involutions: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    pub stored_answer: bool,
}

impl LatticeRecord {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::hyperbolic(IntMatrix::from_rows(&self.gram)?)
    }

    pub fn involution_matrices(&self) -> Result<Vec<IntMatrix>> {
        self.involutions.iter().map(|m| IntMatrix::from_rows(m)).collect()
    }

    /// Checks the form and the listed curves.
    pub fn validate(&self) -> Result<()> {
        let l = self.lattice()?;
        if !l.is_even() {
            return Err(Error::Invariant(format!("{}: lattice is not even", self.name)));
        }
        let n = l.rank();
        let lists = [&self.neg_curves, &self.expected_beff, &self.expected_n, &self.expected_bnef];
        for v in lists.into_iter().flatten().flatten() {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        for c in self.neg_curves.iter().flatten() {
            let s = l.square(c)?;
            if s != -2 {
                return Err(Error::Invariant(format!("{}: class {c} has square {s}, not -2", self.name)));
            }
        }
        for m in self.involution_matrices()? {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
            }
        }
        Ok(())
    }
}

/// Parse every record in `text`. A missing final `end` closes the last record.
pub fn parse_records(text: &str) -> Result<Vec<LatticeRecord>> {
    let mut out = Vec::new();
    let mut cur: Option<Builder> = None;
    let mut lines = text.lines().enumerate();
    while let Some((i, raw)) = lines.next() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |message: String| Error::Parse { line: line_no, message };
        if line == "end" {
            let b = cur.take().ok_or_else(|| perr("`end` without a record".into()))?;
            out.push(b.finish(line_no)?);
            continue;
        }
        let b = cur.get_or_insert_with(Builder::default);
        let (key, value) = match line.split_once(|c: char| c == ':' || c.is_whitespace()) {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        let classes = |v: &str| parse_class_list(v).map_err(|e| perr(e.to_string()));
        match key {
            "index" => b.index = Some(value.parse().map_err(|_| perr(format!("bad index `{value}`")))?),
            "name" => b.name = Some(value.to_string()),
            "rank" => b.rank = Some(value.parse().map_err(|_| perr(format!("bad rank `{value}`")))?),
            "gram" => {
                let n = b.rank.ok_or_else(|| perr("`gram` before `rank`".into()))?;
                let mut rows = Vec::with_capacity(n);
                for _ in 0..n {
                    let (j, row) = lines.next().ok_or_else(|| perr("truncated Gram matrix".into()))?;
                    let row: Vec<i64> = row
                        .split_whitespace()
                        .map(|t| t.parse())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::Parse { line: j + 1, message: format!("bad matrix row `{row}`") })?;
                    if row.len() != n {
                        return Err(Error::Parse { line: j + 1, message: format!("expected {n} entries") });
                    }
                    rows.push(row);
                }
                b.gram = Some(rows);
            }
            "neg" => b.neg = Some(classes(value)?),
            "expected_beff" => b.beff = Some(classes(value)?),
            "expected_n" => b.n = Some(classes(value)?),
            "expected_bnef" => b.bnef = Some(classes(value)?),
            "generators" => b.generators = Some(parse_degrees(value).map_err(perr)?),
            "involution" => b.involutions.push(classes(value)?.iter().map(|v| v.coords().to_vec()).collect()),
            "stored" => b.stored = value == "true",
            _ => return Err(perr(format!("unknown key `{key}`"))),
        }
    }
    if let Some(b) = cur {
        out.push(b.finish(text.lines().count())?);
    }
    Ok(out)
}

fn parse_degrees(s: &str) -> std::result::Result<Vec<ExpectedDegree>, String> {
    let mut out: Vec<ExpectedDegree> = Vec::new();
    for part in s.split(')') {
        let part = part.trim().trim_start_matches(',').trim();
        if part.is_empty() {
            continue;
        }
        let (starred, body) = match part.strip_prefix('*') {
            Some(rest) => (true, rest.trim().trim_start_matches(',').trim()),
            None => (false, part),
        };
        if starred {
            out.last_mut().ok_or("`*` without a preceding class")?.starred = true;
        }
        if body.is_empty() {
            continue;
        }
        let class: IntVector = format!("{body})").parse().map_err(|e: ParseVectorError| e.to_string())?;
        out.push(ExpectedDegree { class, starred: false });
    }
    Ok(out)
}

#[derive(Default)]
struct Builder {
    index: Option<usize>,
    name: Option<String>,
    rank: Option<usize>,
    gram: Option<Vec<Vec<i64>>>,
    neg: Option<Vec<IntVector>>,
    beff: Option<Vec<IntVector>>,
    n: Option<Vec<IntVector>>,
    bnef: Option<Vec<IntVector>>,
    generators: Option<Vec<ExpectedDegree>>,
    involutions: Vec<Vec<Vec<i64>>>,
    stored: bool,
}

impl Builder {
    fn finish(self, line: usize) -> Result<LatticeRecord> {
        let gram = self.gram.ok_or_else(|| Error::Parse { line, message: "record has no Gram matrix".into() })?;
        let rec = LatticeRecord {
            index: self.index,
            name: self.name.unwrap_or_else(|| "unnamed".into()),
            gram,
            neg_curves: self.neg,
            expected_beff: self.beff,
            expected_n: self.n,
            expected_bnef: self.bnef,
            expected_generators: self.generators,
            involutions: self.involutions,
            stored_answer: self.stored,
        };
        IntMatrix::from_rows(&rec.gram)
            .ok()
            .filter(IntMatrix::is_symmetric)
            .ok_or_else(|| Error::Parse { line, message: "Gram matrix is not symmetric".into() })?;
        Ok(rec)
    }
}

/// The 26 bundled records, parsed once.
pub fn bundled() -> &'static [LatticeRecord] {
    static DB: OnceLock<Vec<LatticeRecord>> = OnceLock::new();
    DB.get_or_init(|| parse_records(BUNDLED).expect("bundled database is well formed"))
}

/// Look up a bundled record by name (`S_1`, `S_{4,1,1}`) or by row number.
pub fn find(name: &str) -> Result<&'static LatticeRecord> {
    let key = name.trim();
    let by_index = key.parse::<usize>().ok();
    bundled()
        .iter()
        .find(|r| r.name == key || (by_index.is_some() && r.index == by_index))
        .ok_or_else(|| Error::UnknownLattice(key.to_string()))
}
