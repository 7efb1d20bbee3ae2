//! Matrix Market reader for square dense (`array`) and sparse (`coordinate`) matrices.

use std::io::BufRead;

use hessqr::{Complex, DenseMatrix};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MmError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn err(line: usize, msg: impl Into<String>) -> MmError {
    MmError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str) -> Result<(Layout, Field, Symmetry), MmError> {
    let words: Vec<String> = line
        .split_whitespace()
        .map(|w| w.to_ascii_lowercase())
        .collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(err(1, "header must start with %%MatrixMarket"));
    }
    if words.len() != 5 {
        return Err(err(
            1,
            format!("header needs 5 fields, found {}", words.len()),
        ));
    }
    if words[1] != "matrix" {
        return Err(err(1, format!("unsupported object '{}'", words[1])));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        w => return Err(err(1, format!("unknown format '{w}'"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        w => return Err(err(1, format!("unknown field '{w}'"))),
    };
    let sym = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        w => return Err(err(1, format!("unknown symmetry '{w}'"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(err(1, "pattern field requires coordinate format"));
    }
    Ok((layout, field, sym))
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<f64, MmError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    let x: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("invalid {what} '{tok}'")))?;
    if !x.is_finite() {
        return Err(err(line, format!("{what} is not finite")));
    }
    Ok(x)
}

fn index(tok: Option<&str>, line: usize, n: usize, what: &str) -> Result<usize, MmError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    let i: usize = tok
        .parse()
        .map_err(|_| err(line, format!("invalid {what} '{tok}'")))?;
    if i == 0 || i > n {
        return Err(err(line, format!("{what} {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

fn value<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    field: Field,
    line: usize,
) -> Result<Complex<f64>, MmError> {
    Ok(match field {
        Field::Pattern => Complex::new(1.0, 0.0),
        Field::Real | Field::Integer => Complex::new(number(toks.next(), line, "value")?, 0.0),
        Field::Complex => Complex::new(
            number(toks.next(), line, "real part")?,
            number(toks.next(), line, "imaginary part")?,
        ),
    })
}

fn mirror(z: Complex<f64>, sym: Symmetry) -> Complex<f64> {
    match sym {
        Symmetry::General | Symmetry::Symmetric => z,
        Symmetry::SkewSymmetric => -z,
        Symmetry::Hermitian => z.conj(),
    }
}

pub fn read_matrix_market(reader: impl BufRead) -> Result<DenseMatrix<f64>, MmError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let (layout, field, sym) = parse_header(&first?)?;
    let mut body = Vec::new();
    for (no, l) in lines {
        let l = l?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push((no, t.to_string()));
    }
    let mut it = body.into_iter();
    let (size_line, size) = it.next().ok_or_else(|| err(1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let want = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(err(size_line, format!("size line needs {want} integers")));
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| err(size_line, format!("invalid dimension '{s}'")))
    };
    let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    if rows != cols {
        return Err(err(
            size_line,
            format!("matrix must be square, got {rows}x{cols}"),
        ));
    }
    if rows == 0 {
        return Err(err(size_line, "matrix is empty"));
    }
    let n = rows;
    let mut m = DenseMatrix::<f64>::zeros(n);
    match layout {
        Layout::Array => {
            // column-major; symmetric variants list only the lower triangle
            let cells: Vec<(usize, usize)> = (0..n)
                .flat_map(|j| (0..n).map(move |i| (i, j)))
                .filter(|&(i, j)| match sym {
                    Symmetry::General => true,
                    Symmetry::SkewSymmetric => i > j,
                    _ => i >= j,
                })
                .collect();
            let mut last_line = size_line;
            for &(i, j) in &cells {
                let (no, l) = it
                    .next()
                    .ok_or_else(|| err(last_line, format!("expected {} entries", cells.len())))?;
                last_line = no;
                let mut toks = l.split_whitespace();
                let z = value(&mut toks, field, no)?;
                if toks.next().is_some() {
                    return Err(err(no, "trailing tokens after value"));
                }
                m[(i, j)] = z;
                if i != j && sym != Symmetry::General {
                    m[(j, i)] = mirror(z, sym);
                }
            }
        }
        Layout::Coordinate => {
            let nnz = dims[2]
                .parse::<usize>()
                .map_err(|_| err(size_line, format!("invalid entry count '{}'", dims[2])))?;
            let mut last_line = size_line;
            for _ in 0..nnz {
                let (no, l) = it
                    .next()
                    .ok_or_else(|| err(last_line, format!("expected {nnz} entries")))?;
                last_line = no;
                let mut toks = l.split_whitespace();
                let i = index(toks.next(), no, n, "row index")?;
                let j = index(toks.next(), no, n, "column index")?;
                let z = value(&mut toks, field, no)?;
                if toks.next().is_some() {
                    return Err(err(no, "trailing tokens after value"));
                }
                m[(i, j)] += z;
                if i != j && sym != Symmetry::General {
                    m[(j, i)] += mirror(z, sym);
                }
            }
        }
    }
    if let Some((no, _)) = it.next() {
        return Err(err(no, "unexpected data after the last entry"));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<DenseMatrix<f64>, MmError> {
        read_matrix_market(s.as_bytes())
    }

    #[test]
    fn dense_complex_is_column_major() {
        let m =
            read("%%MatrixMarket matrix array complex general\n% c\n2 2\n1 0\n2 1\n3 0\n4 -1\n")
                .unwrap();
        assert_eq!(m[(0, 0)], Complex::new(1.0, 0.0));
        assert_eq!(m[(1, 0)], Complex::new(2.0, 1.0));
        assert_eq!(m[(0, 1)], Complex::new(3.0, 0.0));
        assert_eq!(m[(1, 1)], Complex::new(4.0, -1.0));
    }

    #[test]
    fn coordinate_hermitian_is_mirrored() {
        let m =
            read("%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1 0\n2 1 0 2\n")
                .unwrap();
        assert_eq!(m[(1, 0)], Complex::new(0.0, 2.0));
        assert_eq!(m[(0, 1)], Complex::new(0.0, -2.0));
        assert_eq!(m[(1, 1)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e =
            read("%%MatrixMarket matrix coordinate real general\n2 2 1\n\n3 1 1.0\n").unwrap_err();
        assert_eq!(e.to_string(), "line 4: row index 3 outside 1..=2");
        let e = read("%MatrixMarket matrix array real general\n1 1\n1\n").unwrap_err();
        assert!(e.to_string().starts_with("line 1:"));
        let e = read("%%MatrixMarket matrix array real general\n2 3\n").unwrap_err();
        assert!(e.to_string().contains("square"));
        let e = read("%%MatrixMarket matrix array real general\n1 1\nx\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3: invalid value 'x'");
    }

    #[test]
    fn symmetric_array_reads_lower_triangle() {
        let m = read("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n").unwrap();
        assert_eq!(m[(0, 1)], Complex::new(2.0, 0.0));
        assert_eq!(m[(1, 1)], Complex::new(3.0, 0.0));
    }
}
