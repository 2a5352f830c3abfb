//! Legislature sizes against population: loading and log-log least squares.
//!
//! Logarithms are natural throughout, so the intercept is `ln` of the
//! constant in `seats = c * population^slope`.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Snapshot of national legislatures shipped with the crate.
pub const BUNDLED_LEGISLATURES: &str = include_str!("../data/legislatures.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegislatureRecord {
    pub country: String,
    pub population: u64,
    /// Both chambers combined where there are two.
    pub seats: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub log_base: &'static str,
}

/// Reads `country,population,seats` rows. Lines starting with `#` are
/// comments. Row numbers in errors count data rows from 1.
pub fn read_records<R: Read>(input: R) -> Result<Vec<LegislatureRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header_err = |message: String| Error::Data { row: 0, message };
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(header_err(e.to_string())),
    };
    if headers.is_empty() {
        return Err(Error::NoRecords);
    }
    let expected = ["country", "population", "seats"];
    if headers.iter().ne(expected) {
        return Err(header_err(format!(
            "expected header {:?}, found {:?}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<LegislatureRecord>().enumerate() {
        let row_no = i + 1;
        let record = row.map_err(|e| Error::Data {
            row: row_no,
            message: e.to_string(),
        })?;
        if record.seats == 0 {
            return Err(Error::Data {
                row: row_no,
                message: format!("{}: seats must be at least 1", record.country),
            });
        }
        if record.seats > record.population {
            return Err(Error::Data {
                row: row_no,
                message: format!(
                    "{}: seats {} exceed population {}",
                    record.country, record.seats, record.population
                ),
            });
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(records)
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<LegislatureRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    read_records(file)
}

/// The bundled snapshot, parsed.
pub fn bundled_records() -> Result<Vec<LegislatureRecord>> {
    read_records(BUNDLED_LEGISLATURES.as_bytes())
}

/// Ordinary least squares on arbitrary `(x, y)` pairs.
pub fn ols(x: &[f64], y: &[f64]) -> Result<RegressionResult> {
    let m = x.len();
    if m != y.len() {
        return Err(Error::invalid("x and y differ in length"));
    }
    if m < 2 {
        return Err(Error::invalid(format!(
            "regression needs at least 2 points, got {m}"
        )));
    }
    let mf = m as f64;
    let mx = x.iter().sum::<f64>() / mf;
    let my = y.iter().sum::<f64>() / mf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::invalid(
            "all populations are identical; slope undefined",
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // A constant response is fitted exactly.
    let r_squared = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RegressionResult {
        slope,
        intercept,
        r_squared,
        n_points: m,
        log_base: "e",
    })
}

/// Least squares of `ln(seats)` on `ln(population)`.
pub fn loglog_regression(records: &[LegislatureRecord]) -> Result<RegressionResult> {
    let x: Vec<f64> = records.iter().map(|r| (r.population as f64).ln()).collect();
    let y: Vec<f64> = records.iter().map(|r| (r.seats as f64).ln()).collect();
    ols(&x, &y)
}

/// `round(exp(intercept) * population^slope)`, at least 1.
pub fn predict_size(population: u64, reg: &RegressionResult) -> u64 {
    let v = (reg.intercept + reg.slope * (population.max(1) as f64).ln()).exp();
    (v.round() as u64).max(1)
}
