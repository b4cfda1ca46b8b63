use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::{Alternative, Dataset};
use crate::error::{Error, Result};

/// Column name of criterion `j`, timestamp `t` (both 0-based).
pub fn column_name(criterion: usize, t: usize) -> String {
    format!("g{}_t{}", criterion + 1, t + 1)
}

/// Parses `g<j>_t<t>` into 1-based `(j, t)`.
fn parse_column(name: &str) -> Option<(usize, usize)> {
    let (j, t) = name.strip_prefix('g')?.split_once("_t")?;
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(j) || !all_digits(t) {
        return None;
    }
    Some((j.parse().ok()?, t.parse().ok()?))
}

/// Recovers `(m, T)` from a header, requiring criterion-major order.
fn parse_header(header: &csv::StringRecord) -> Result<(usize, usize)> {
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(Error::HeaderMismatch("expected `id,label,` followed by value columns".into()));
    }
    let cols: Vec<&str> = header.iter().skip(2).collect();
    let horizon = cols.iter().take_while(|c| parse_column(c).map(|(j, _)| j) == Some(1)).count();
    if horizon == 0 || cols.len() % horizon != 0 {
        return Err(Error::HeaderMismatch(format!("{} value columns do not form an m x T block", cols.len())));
    }
    let criteria = cols.len() / horizon;
    for (i, name) in cols.iter().enumerate() {
        let expected = column_name(i / horizon, i % horizon);
        if *name != expected {
            return Err(Error::HeaderMismatch(format!("column {} is `{name}`, expected `{expected}`", i + 3)));
        }
    }
    Ok((criteria, horizon))
}

fn parse_error(path: &Path, row: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), row, column, message: message.into() }
}

/// Reads a wide dataset file from any reader; `path` is only used in errors.
///
/// The class count is `class_count` when given, else the largest label seen
/// (1 when no row is labelled).
pub fn read_dataset(reader: impl Read, path: &Path, class_count: Option<usize>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let (criteria, horizon) = parse_header(rdr.headers()?)?;
    let width = 2 + criteria * horizon;
    let mut alts = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(parse_error(path, row, record.len(), format!("expected {width} fields, found {}", record.len())));
        }
        let label = match record[1].trim() {
            "" => None,
            s => match s.parse::<usize>() {
                Ok(0) | Err(_) => return Err(parse_error(path, row, 2, format!("bad label `{s}`"))),
                Ok(l) => Some(l),
            },
        };
        let mut series = vec![Vec::with_capacity(horizon); criteria];
        for (i, cell) in record.iter().skip(2).enumerate() {
            let column = i + 3;
            let x: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_error(path, row, column, format!("`{cell}` is not a number")))?;
            if !x.is_finite() {
                return Err(Error::NonFiniteValue(format!("{}: row {row}, column {column}", path.display())));
            }
            series[i / horizon].push(x);
        }
        alts.push(Alternative::new(&record[0], series, label));
    }
    let inferred = alts.iter().filter_map(|a| a.label).max().unwrap_or(1);
    let names = (1..=criteria).map(|j| format!("g{j}")).collect();
    Dataset::new(names, horizon, class_count.unwrap_or(inferred), alts)
}

pub fn load_dataset(path: impl AsRef<Path>, class_count: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    read_dataset(File::open(path)?, path, class_count)
}

/// Writes values with 17 significant digits so that reloading is exact.
pub fn write_dataset(dataset: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let (m, horizon) = (dataset.criteria(), dataset.horizon());
    let mut header = vec!["id".to_string(), "label".to_string()];
    for j in 0..m {
        for t in 0..horizon {
            header.push(column_name(j, t));
        }
    }
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for alt in dataset.alternatives() {
        row.clear();
        row.push(alt.id.clone());
        row.push(alt.label.map(|l| l.to_string()).unwrap_or_default());
        for s in &alt.series {
            row.extend(s.iter().map(|x| format!("{x:.16e}")));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset(dataset, File::create(path)?)
}

/// Writes `id,class` rows.
pub fn save_assignments(path: impl AsRef<Path>, ids: &[&str], classes: &[usize]) -> Result<()> {
    if ids.len() != classes.len() {
        return Err(Error::dims(ids.len(), classes.len()));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", "class"])?;
    for (id, c) in ids.iter().zip(classes) {
        w.write_record([id.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
