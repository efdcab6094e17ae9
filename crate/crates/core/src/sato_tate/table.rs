//! The table of Sato-Tate groups of abelian surfaces over Q.

use std::path::Path;

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

const EMBEDDED: &str = include_str!("../../data/st_groups_q.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STGroupRecord {
    pub name: String,
    /// `End(J(C))_R` as printed, e.g. `R x R`.
    pub algebra: String,
    /// Real dimension of `End(J(C))_R`.
    pub endo_rank: u32,
    /// `E[a_p^2/p]`.
    pub second_moment: u32,
    pub example_curve: IntPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatoTateTable {
    rows: Vec<STGroupRecord>,
}

impl SatoTateTable {
    /// The copy compiled into the library.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded Sato-Tate table is well formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedTable {
            line: 0,
            message: format!("{}: {}", path.display(), e),
        })?;
        Self::parse(&text)
    }

    /// One row per line, `name | algebra | rank | moment | example`; `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::MalformedTable {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            let [name, algebra, rank, moment, example] = fields[..] else {
                return Err(bad(format!("expected 5 fields, found {}", fields.len())));
            };
            let int = |s: &str| {
                s.parse::<u32>()
                    .map_err(|_| bad(format!("'{}' is not a nonnegative integer", s)))
            };
            rows.push(STGroupRecord {
                name: name.to_string(),
                algebra: algebra.to_string(),
                endo_rank: int(rank)?,
                second_moment: int(moment)?,
                example_curve: example
                    .parse()
                    .map_err(|e| bad(format!("example curve: {}", e)))?,
            });
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(SatoTateTable { rows })
    }

    pub fn rows(&self) -> &[STGroupRecord] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&STGroupRecord> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn with_moment(&self, moment: u32) -> impl Iterator<Item = &STGroupRecord> {
        self.rows.iter().filter(move |r| r.second_moment == moment)
    }
}
