//! Plain-text formats for matrices, point clouds, permutations, symbols and
//! samples.
//!
//! Every file starts with a header line naming the format. `#` starts a
//! comment and blank lines are ignored. Numbers are written with Rust's
//! shortest round-trip representation, so write-then-parse is exact.
//!
//! ```text
//! dense n        then n rows of n values
//! banded n k     then lines `d v_1 .. v_{n-|d|}` for diagonal d = i - j
//! coo n nnz      then nnz lines `i j value` (0-based)
//! points n d     then n lines of d coordinates
//! perm n         then the n image indices
//! symbol         then lines `k f_k`
//! samples N p    then N lines of p values
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matcore::{BandedMatrix, DenseMatrix, IndexMetric, Permutation};
use crate::covstat::SampleSet;
use crate::wiener::SymbolSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Dense,
    Banded,
    Coo,
}

/// A parsed matrix file, remembering the layout it was read from.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixText {
    Dense(DenseMatrix),
    Banded(BandedMatrix),
    Coo(DenseMatrix),
}

impl MatrixText {
    pub fn format(&self) -> MatrixFormat {
        match self {
            Self::Dense(_) => MatrixFormat::Dense,
            Self::Banded(_) => MatrixFormat::Banded,
            Self::Coo(_) => MatrixFormat::Coo,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Self::Dense(a) | Self::Coo(a) => a.clone(),
            Self::Banded(b) => b.to_dense(),
        }
    }

    /// Banded view: stored as is, or the tightest band of a dense matrix.
    pub fn to_banded(&self) -> Result<BandedMatrix> {
        match self {
            Self::Banded(b) => Ok(b.clone()),
            Self::Dense(a) | Self::Coo(a) => BandedMatrix::from_dense_tight(a),
        }
    }

    pub fn write(&self) -> String {
        match self {
            Self::Dense(a) => write_dense(a),
            Self::Banded(b) => write_banded(b),
            Self::Coo(a) => write_coo(a),
        }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-empty line with comments stripped, as `(line_no, tokens)`.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            self.last = idx + 1;
            if !toks.is_empty() {
                return Some((idx + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens()
            .ok_or_else(|| err(self.last.max(1), format!("unexpected end of input, expected {what}")))
    }

    fn finish(&mut self) -> Result<()> {
        match self.next_tokens() {
            Some((line, _)) => Err(err(line, "unexpected trailing content")),
            None => Ok(()),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| err(line, format!("invalid {what} `{tok}`")))
}

fn float(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = num(line, tok, "number")?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

fn floats(line: usize, toks: &[&str], want: usize) -> Result<Vec<f64>> {
    if toks.len() != want {
        return Err(err(line, format!("expected {want} values, got {}", toks.len())));
    }
    toks.iter().map(|t| float(line, t)).collect()
}

fn header<'a>(lines: &mut Lines<'a>, names: &[&str]) -> Result<(usize, Vec<&'a str>)> {
    let (line, toks) = lines.expect("a header line")?;
    if !names.contains(&toks[0]) {
        return Err(err(
            line,
            format!("unknown header `{}`, expected one of {names:?}", toks[0]),
        ));
    }
    Ok((line, toks))
}

fn header_args(line: usize, toks: &[&str], names: &[&str]) -> Result<Vec<usize>> {
    if toks.len() != names.len() + 1 {
        return Err(err(
            line,
            format!("`{}` header takes {}", toks[0], names.join(" ")),
        ));
    }
    toks[1..]
        .iter()
        .zip(names)
        .map(|(t, name)| num(line, t, name))
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<MatrixText> {
    let mut lines = Lines::new(text);
    let (hline, toks) = header(&mut lines, &["dense", "banded", "coo"])?;
    let out = match toks[0] {
        "dense" => {
            let n = header_args(hline, &toks, &["n"])?[0];
            let mut data = Vec::with_capacity(n * n);
            for _ in 0..n {
                let (line, row) = lines.expect("a matrix row")?;
                data.extend(floats(line, &row, n)?);
            }
            MatrixText::Dense(DenseMatrix::new(n, n, data).map_err(|e| err(hline, e.to_string()))?)
        }
        "banded" => {
            let args = header_args(hline, &toks, &["n", "k"])?;
            let (n, k) = (args[0], args[1]);
            if n == 0 || k >= n {
                return Err(err(hline, format!("need 0 <= k < n, got n = {n}, k = {k}")));
            }
            let mut diags: Vec<Option<Vec<f64>>> = vec![None; 2 * k + 1];
            while let Some((line, row)) = lines.next_tokens() {
                let d: i64 = num(line, row[0], "diagonal offset")?;
                if d.unsigned_abs() as usize > k {
                    return Err(err(line, format!("offset {d} lies outside the band {k}")));
                }
                let slot = &mut diags[(d + k as i64) as usize];
                if slot.is_some() {
                    return Err(err(line, format!("diagonal {d} given twice")));
                }
                *slot = Some(floats(line, &row[1..], n - d.unsigned_abs() as usize)?);
            }
            let diags = diags
                .into_iter()
                .enumerate()
                .map(|(idx, d)| d.unwrap_or_else(|| vec![0.0; n - idx.abs_diff(k)]))
                .collect();
            MatrixText::Banded(
                BandedMatrix::from_diagonals(n, k, diags).map_err(|e| err(hline, e.to_string()))?,
            )
        }
        _ => {
            let args = header_args(hline, &toks, &["n", "nnz"])?;
            let (n, nnz) = (args[0], args[1]);
            let mut data = vec![0.0; n * n];
            let mut seen = vec![false; n * n];
            for _ in 0..nnz {
                let (line, t) = lines.expect("an `i j value` triple")?;
                if t.len() != 3 {
                    return Err(err(line, "expected `i j value`"));
                }
                let i: usize = num(line, t[0], "row index")?;
                let j: usize = num(line, t[1], "column index")?;
                if i >= n || j >= n {
                    return Err(err(line, format!("index ({i}, {j}) outside {n} x {n}")));
                }
                if std::mem::replace(&mut seen[i * n + j], true) {
                    return Err(err(line, format!("entry ({i}, {j}) given twice")));
                }
                data[i * n + j] = float(line, t[2])?;
            }
            MatrixText::Coo(DenseMatrix::new(n, n, data).map_err(|e| err(hline, e.to_string()))?)
        }
    };
    lines.finish()?;
    Ok(out)
}

fn push_row(out: &mut String, vals: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in vals {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:?}");
    }
    out.push('\n');
}

pub fn write_dense(a: &DenseMatrix) -> String {
    let mut out = format!("dense {}\n", a.rows());
    for i in 0..a.rows() {
        push_row(&mut out, a.row(i).iter().copied());
    }
    out
}

pub fn write_banded(b: &BandedMatrix) -> String {
    let mut out = format!("banded {} {}\n", b.size(), b.half_bandwidth());
    for (d, diag) in b.diagonals() {
        let _ = write!(out, "{d}");
        if !diag.is_empty() {
            out.push(' ');
        }
        push_row(&mut out, diag.iter().copied());
    }
    out
}

/// Nonzero entries in row-major order.
pub fn write_coo(a: &DenseMatrix) -> String {
    let n = a.rows();
    let entries: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, a.get(i, j)))
        .filter(|&(_, _, v)| v != 0.0)
        .collect();
    let mut out = format!("coo {n} {}\n", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{i} {j} {v:?}");
    }
    out
}

pub fn parse_points(text: &str) -> Result<IndexMetric> {
    let mut lines = Lines::new(text);
    let (hline, toks) = header(&mut lines, &["points"])?;
    let args = header_args(hline, &toks, &["n", "d"])?;
    let (n, dim) = (args[0], args[1]);
    let mut coords = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let (line, row) = lines.expect("a point")?;
        coords.extend(floats(line, &row, dim)?);
    }
    lines.finish()?;
    IndexMetric::points(n, dim, coords).map_err(|e| err(hline, e.to_string()))
}

pub fn write_points(n: usize, dim: usize, coords: &[f64]) -> String {
    let mut out = format!("points {n} {dim}\n");
    for p in coords.chunks(dim.max(1)).take(n) {
        push_row(&mut out, p.iter().copied());
    }
    out
}

/// The image sequence may span any number of lines.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let mut lines = Lines::new(text);
    let (hline, toks) = header(&mut lines, &["perm"])?;
    let n = header_args(hline, &toks, &["n"])?[0];
    let mut image = Vec::with_capacity(n);
    while let Some((line, row)) = lines.next_tokens() {
        for t in row {
            image.push(num::<usize>(line, t, "index")?);
        }
    }
    if image.len() != n {
        return Err(err(hline, format!("expected {n} indices, got {}", image.len())));
    }
    Permutation::new(image).map_err(|e| err(hline, e.to_string()))
}

pub fn write_permutation(p: &Permutation) -> String {
    let mut out = format!("perm {}\n", p.len());
    let body: Vec<String> = p.image().iter().map(|i| i.to_string()).collect();
    out.push_str(&body.join(" "));
    out.push('\n');
    out
}

/// Lines `k f_k`; a leading `symbol` header is optional.
pub fn parse_symbol(text: &str) -> Result<SymbolSeries> {
    let mut lines = Lines::new(text);
    let mut coeffs = Vec::new();
    let mut first_line = 1;
    while let Some((line, toks)) = lines.next_tokens() {
        if coeffs.is_empty() && toks == ["symbol"] {
            continue;
        }
        if coeffs.is_empty() {
            first_line = line;
        }
        if toks.len() != 2 {
            return Err(err(line, "expected `k f_k`"));
        }
        coeffs.push((num::<i128>(line, toks[0], "offset")?, float(line, toks[1])?));
    }
    SymbolSeries::new(coeffs).map_err(|e| err(first_line, e.to_string()))
}

pub fn write_symbol(f: &SymbolSeries) -> String {
    let mut out = String::from("symbol\n");
    for (k, v) in f.iter() {
        let _ = writeln!(out, "{k} {v:?}");
    }
    out
}

pub fn parse_samples(text: &str) -> Result<SampleSet> {
    let mut lines = Lines::new(text);
    let (hline, toks) = header(&mut lines, &["samples"])?;
    let args = header_args(hline, &toks, &["N", "p"])?;
    let (n, p) = (args[0], args[1]);
    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n {
        let (line, row) = lines.expect("an observation")?;
        data.extend(floats(line, &row, p)?);
    }
    lines.finish()?;
    SampleSet::new(n, p, data).map_err(|e| err(hline, e.to_string()))
}

pub fn write_samples(s: &SampleSet) -> String {
    let mut out = format!("samples {} {}\n", s.n_samples(), s.dim());
    for i in 0..s.n_samples() {
        push_row(&mut out, s.observation(i).iter().copied());
    }
    out
}
