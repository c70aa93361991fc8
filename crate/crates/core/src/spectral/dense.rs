use std::io::{Read, Write};

use crate::{Error, Result};

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<f64>>) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            assert_eq!(c.len(), rows, "column length");
            data.extend(c);
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols).map(|j| self.column(j).iter().sum()).collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (j, &vj) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.column(j)) {
                *o += a * vj;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Writes a square matrix as CSV with a header row and a first column of
/// labels. Values use the shortest representation that round-trips.
pub fn write_labeled_matrix(labels: &[String], m: &DenseMatrix, out: impl Write) -> Result<()> {
    assert_eq!(labels.len(), m.rows());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (i, label) in labels.iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend((0..m.cols()).map(|j| m.get(i, j).to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<matrix stream>", e))
}

pub fn read_labeled_matrix(input: impl Read) -> Result<(Vec<String>, DenseMatrix)> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| Error::MalformedMatrix("empty file".into()))??;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = labels.len();
    let mut m = DenseMatrix::zeros(n, n);
    let mut seen = 0;
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        if i >= n {
            return Err(Error::MalformedMatrix(format!("more than {n} rows")));
        }
        if rec.len() != n + 1 || rec.get(0) != Some(labels[i].as_str()) {
            return Err(Error::MalformedMatrix(format!(
                "row {} does not match the header",
                i + 1
            )));
        }
        for j in 0..n {
            let v: f64 = rec[j + 1]
                .trim()
                .parse()
                .map_err(|_| Error::MalformedMatrix(format!("bad value {:?}", &rec[j + 1])))?;
            m.set(i, j, v);
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::MalformedMatrix(format!("expected {n} rows, found {seen}")));
    }
    Ok((labels, m))
}
