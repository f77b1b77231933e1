//! The native instance format.
//!
//! ```text
//! MMRBIP v1 <name> <MAX|MIN> <n> <m>
//! <c_lo> <c_hi>                         (n lines)
//! <LE|GE|EQ> <rhs> <nnz> (<idx> <coef>)* (m lines, idx 0-based)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::lp::{ConstraintSense, Direction};
use crate::mmr::{BipInstance, BipRow};

use super::parse::ParseError;

const MAGIC: &str = "MMRBIP";
const VERSION: &str = "v1";

pub fn serialize_native(inst: &BipInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{MAGIC} {VERSION} {} {} {} {}",
        inst.name(),
        inst.direction(),
        inst.num_vars(),
        inst.num_constraints()
    );
    for (lo, hi) in inst.lower().iter().zip(inst.upper()) {
        let _ = writeln!(out, "{lo} {hi}");
    }
    for r in inst.rows() {
        let _ = write!(out, "{} {} {}", r.sense, r.rhs, r.coeffs.len());
        for (j, a) in &r.coeffs {
            let _ = write!(out, " {j} {a}");
        }
        out.push('\n');
    }
    out
}

struct Line<'a> {
    number: usize,
    text: &'a str,
    fields: Vec<(usize, &'a str)>,
    next: usize,
}

impl<'a> Line<'a> {
    fn new(number: usize, text: &'a str) -> Self {
        let mut fields = Vec::new();
        let mut offset = 0;
        for tok in text.split_whitespace() {
            let at = offset + text[offset..].find(tok).expect("token comes from line");
            fields.push((text[..at].chars().count() + 1, tok));
            offset = at + tok.len();
        }
        Line {
            number,
            text,
            fields,
            next: 0,
        }
    }

    fn err(&self, column: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.number, column, msg)
    }

    fn word(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        match self.fields.get(self.next) {
            Some(&f) => {
                self.next += 1;
                Ok(f)
            }
            None => Err(self.err(self.text.chars().count() + 1, format!("missing {what}"))),
        }
    }

    fn num<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let (col, tok) = self.word(what)?;
        tok.parse()
            .map_err(|_| self.err(col, format!("expected {what}, found {tok:?}")))
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.fields.get(self.next) {
            None => Ok(()),
            Some(&(col, tok)) => Err(self.err(col, format!("unexpected extra field {tok:?}"))),
        }
    }
}

pub fn parse_native(text: &str) -> Result<BipInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| Line::new(i, l));
    let last_line = text.lines().count().max(1);
    let eof = |what: &str| {
        ParseError::new(
            last_line,
            1,
            format!("unexpected end of input, expected {what}"),
        )
    };

    let mut head = lines.next().ok_or_else(|| eof("header"))?;
    let (col, magic) = head.word("format tag")?;
    if magic != MAGIC {
        return Err(head.err(col, format!("expected {MAGIC}, found {magic:?}")));
    }
    let (col, version) = head.word("version")?;
    if version != VERSION {
        return Err(head.err(col, format!("unsupported version {version:?}")));
    }
    let (_, name) = head.word("instance name")?;
    let (col, dir) = head.word("direction")?;
    let direction = match dir {
        "MAX" => Direction::Max,
        "MIN" => Direction::Min,
        other => {
            return Err(head.err(
                col,
                format!("direction must be MAX or MIN, found {other:?}"),
            ))
        }
    };
    let n: usize = head.num("variable count")?;
    let m: usize = head.num("constraint count")?;
    head.done()?;
    if n == 0 {
        return Err(head.err(1, "instance must have at least one variable"));
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for j in 0..n {
        let mut l = lines
            .next()
            .ok_or_else(|| eof(&format!("interval of variable {j}")))?;
        let lo: i64 = l.num("lower cost")?;
        let (col, _) = l.fields.get(l.next).copied().unwrap_or((1, ""));
        let hi: i64 = l.num("upper cost")?;
        l.done()?;
        if lo > hi {
            return Err(l.err(col, format!("empty interval [{lo}, {hi}]")));
        }
        lower.push(lo);
        upper.push(hi);
    }

    let mut rows = Vec::new();
    for i in 0..m {
        let mut l = lines
            .next()
            .ok_or_else(|| eof(&format!("constraint {i}")))?;
        let (col, s) = l.word("sense")?;
        let sense = match s {
            "LE" => ConstraintSense::Le,
            "GE" => ConstraintSense::Ge,
            "EQ" => ConstraintSense::Eq,
            other => return Err(l.err(col, format!("sense must be LE, GE or EQ, found {other:?}"))),
        };
        let rhs: i64 = l.num("right-hand side")?;
        let nnz: usize = l.num("nonzero count")?;
        let mut coeffs = Vec::new();
        for _ in 0..nnz {
            let (col, _) = l.fields.get(l.next).copied().unwrap_or((1, ""));
            let j: usize = l.num("variable index")?;
            if j >= n {
                return Err(l.err(col, format!("variable index {j} out of range (n = {n})")));
            }
            let a: i64 = l.num("coefficient")?;
            coeffs.push((j, a));
        }
        l.done()?;
        rows.push(BipRow::new(coeffs, sense, rhs));
    }
    if let Some(l) = lines.next() {
        return Err(l.err(1, format!("expected {m} constraints, found more")));
    }
    BipInstance::new(name, direction, lower, upper, rows)
        .map_err(|e| ParseError::new(1, 1, e.to_string()))
}
