use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::problems::{GapSpec, MkpSpec, ScpSpec};

/// Malformed input, located by 1-based line and column.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Whitespace separated tokens with their positions.
pub(crate) struct Tokens<'a> {
    items: Vec<(usize, usize, &'a str)>,
    pos: usize,
    end: (usize, usize),
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut end = (1, 1);
        for (ln, line) in text.lines().enumerate() {
            let mut offset = 0;
            for tok in line.split_whitespace() {
                let at = offset + line[offset..].find(tok).expect("token comes from line");
                let column = line[..at].chars().count() + 1;
                items.push((ln + 1, column, tok));
                offset = at + tok.len();
            }
            end = (ln + 1, line.chars().count() + 1);
        }
        Tokens { items, pos: 0, end }
    }

    fn here(&self) -> (usize, usize) {
        self.items
            .get(self.pos)
            .map_or(self.end, |&(l, c, _)| (l, c))
    }

    pub(crate) fn next<T: FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let Some(&(line, column, tok)) = self.items.get(self.pos) else {
            let (line, column) = self.end;
            return Err(ParseError::new(
                line,
                column,
                format!("unexpected end of input, expected {what}"),
            ));
        };
        self.pos += 1;
        tok.parse()
            .map_err(|_| ParseError::new(line, column, format!("expected {what}, found {tok:?}")))
    }

    pub(crate) fn next_in<T>(
        &mut self,
        what: &str,
        ok: impl Fn(&T) -> bool,
    ) -> Result<T, ParseError>
    where
        T: FromStr + fmt::Display,
    {
        let (line, column) = self.here();
        let v: T = self.next(what)?;
        if !ok(&v) {
            return Err(ParseError::new(
                line,
                column,
                format!("{what} out of range: {v}"),
            ));
        }
        Ok(v)
    }

    pub(crate) fn vec<T: FromStr>(&mut self, len: usize, what: &str) -> Result<Vec<T>, ParseError> {
        (0..len).map(|_| self.next(what)).collect()
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        match self.items.get(self.pos) {
            None => Ok(()),
            Some(&(line, column, tok)) => Err(ParseError::new(
                line,
                column,
                format!("unexpected trailing data {tok:?}"),
            )),
        }
    }
}

fn positive(v: &usize) -> bool {
    *v > 0
}

/// OR-Library set covering: `m n`, the `n` column costs, then for every row
/// the number of covering columns followed by their 1-based indices.
/// Intervals are degenerate at the file costs.
pub fn parse_orlib_scp(text: &str) -> Result<ScpSpec, ParseError> {
    let mut t = Tokens::new(text);
    let m: usize = t.next_in("row count", positive)?;
    let n: usize = t.next_in("column count", positive)?;
    let costs: Vec<i64> = (0..n)
        .map(|_| t.next_in("column cost", |c: &i64| *c >= 0))
        .collect::<Result<_, _>>()?;
    let mut covers = Vec::new();
    for _ in 0..m {
        let k: usize = t.next("cover count")?;
        let row = (0..k)
            .map(|_| {
                t.next_in("column index", |&j: &usize| (1..=n).contains(&j))
                    .map(|j| j - 1)
            })
            .collect::<Result<Vec<_>, _>>()?;
        covers.push(row);
    }
    t.finish()?;
    Ok(ScpSpec {
        num_columns: n,
        covers,
        lower: costs.clone(),
        upper: costs,
    })
}

fn gap_body(t: &mut Tokens<'_>) -> Result<GapSpec, ParseError> {
    let m: usize = t.next_in("agent count", positive)?;
    let n: usize = t.next_in("job count", positive)?;
    let costs = (0..m)
        .map(|_| t.vec::<i64>(n, "cost"))
        .collect::<Result<Vec<_>, _>>()?;
    let resources = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| t.next_in("resource", |a: &i64| *a > 0))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let capacities = (0..m)
        .map(|_| t.next_in("capacity", |b: &i64| *b > 0))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GapSpec {
        resources,
        capacities,
        lower: costs.clone(),
        upper: costs,
    })
}

/// One OR-Library GAP problem: `m n`, the `m x n` costs, the `m x n`
/// resources, then the `m` capacities.
pub fn parse_orlib_gap(text: &str) -> Result<GapSpec, ParseError> {
    let mut t = Tokens::new(text);
    let spec = gap_body(&mut t)?;
    t.finish()?;
    Ok(spec)
}

/// An OR-Library `gapN.txt` file: the problem count followed by that many
/// problems in the layout of [`parse_orlib_gap`].
pub fn parse_orlib_gap_file(text: &str) -> Result<Vec<GapSpec>, ParseError> {
    let mut t = Tokens::new(text);
    let p: usize = t.next("problem count")?;
    let specs = (0..p)
        .map(|_| gap_body(&mut t))
        .collect::<Result<Vec<_>, _>>()?;
    t.finish()?;
    Ok(specs)
}

fn mkp_body(t: &mut Tokens<'_>) -> Result<(MkpSpec, i64), ParseError> {
    let n: usize = t.next_in("item count", positive)?;
    let m: usize = t.next_in("constraint count", positive)?;
    let opt: i64 = t.next("known optimum")?;
    let values = (0..n)
        .map(|_| t.next_in("item value", |c: &i64| *c >= 0))
        .collect::<Result<Vec<_>, _>>()?;
    let weights = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| t.next_in("weight", |a: &i64| *a >= 0))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let capacities = (0..m)
        .map(|_| t.next_in("capacity", |b: &i64| *b >= 0))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((
        MkpSpec {
            weights,
            capacities,
            lower: values.clone(),
            upper: values,
        },
        opt,
    ))
}

/// One Chu-Beasley MKP problem: `n m opt`, the `n` values, the `m x n`
/// weights row by row, then the `m` capacities. Returns the spec and the
/// recorded optimum (0 when unknown).
pub fn parse_chubeasley_mkp(text: &str) -> Result<(MkpSpec, i64), ParseError> {
    let mut t = Tokens::new(text);
    let r = mkp_body(&mut t)?;
    t.finish()?;
    Ok(r)
}

/// An OR-Library `mknapcbN.txt` file: the problem count followed by that
/// many problems in the layout of [`parse_chubeasley_mkp`].
pub fn parse_chubeasley_mkp_file(text: &str) -> Result<Vec<(MkpSpec, i64)>, ParseError> {
    let mut t = Tokens::new(text);
    let k: usize = t.next("problem count")?;
    let all = (0..k)
        .map(|_| mkp_body(&mut t))
        .collect::<Result<Vec<_>, _>>()?;
    t.finish()?;
    Ok(all)
}
