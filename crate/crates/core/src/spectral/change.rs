use std::io::Write;

use chrono::NaiveDate;

use super::{DenseMatrix, ReducedGoogleMatrix};
use crate::{Error, Result};

/// Cell-wise relative change between two reduced matrices on one subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeMatrix {
    pub labels: Vec<String>,
    /// `(R2 - R1) / R1`; NaN where `R1` is zero.
    pub delta: DenseMatrix,
    pub dates: Option<(NaiveDate, NaiveDate)>,
    /// Display clamp, applied by [`ChangeMatrix::display`] only.
    pub cap: Option<(f64, f64)>,
}

impl ChangeMatrix {
    pub fn is_undefined(&self, i: usize, j: usize) -> bool {
        self.delta.get(i, j).is_nan()
    }

    pub fn undefined_count(&self) -> usize {
        let n = self.labels.len();
        (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .filter(|&(i, j)| self.is_undefined(i, j))
            .count()
    }

    /// `delta` clamped to `cap` when set; undefined cells stay NaN.
    pub fn display(&self) -> DenseMatrix {
        let mut m = self.delta.clone();
        if let Some((lo, hi)) = self.cap {
            for j in 0..m.cols() {
                for v in m.column_mut(j) {
                    if !v.is_nan() {
                        *v = v.clamp(lo, hi);
                    }
                }
            }
        }
        m
    }

    /// Labeled dense CSV of [`ChangeMatrix::display`]; undefined cells read `NaN`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        super::write_labeled_matrix(&self.labels, &self.display(), out)
    }
}

pub fn relative_change(r1: &ReducedGoogleMatrix, r2: &ReducedGoogleMatrix) -> Result<ChangeMatrix> {
    if r1.labels != r2.labels {
        return Err(Error::SubsetMismatch(format!(
            "{} labels vs {} labels, or different order",
            r1.labels.len(),
            r2.labels.len()
        )));
    }
    if r1.censored != r2.censored {
        return Err(Error::SubsetMismatch("one matrix is censored, the other is not".into()));
    }
    let dates = match (r1.date, r2.date) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    Ok(ChangeMatrix {
        labels: r1.labels.clone(),
        delta: relative_change_dense(&r1.gr, &r2.gr)?,
        dates,
        cap: None,
    })
}

/// Same as [`relative_change`] on bare labeled matrices, e.g. read back from CSV.
pub fn relative_change_dense(m1: &DenseMatrix, m2: &DenseMatrix) -> Result<DenseMatrix> {
    if m1.rows() != m2.rows() || m1.cols() != m2.cols() {
        return Err(Error::SubsetMismatch(format!(
            "{}x{} vs {}x{}",
            m1.rows(),
            m1.cols(),
            m2.rows(),
            m2.cols()
        )));
    }
    let mut d = DenseMatrix::zeros(m1.rows(), m1.cols());
    for j in 0..m1.cols() {
        for i in 0..m1.rows() {
            let a = m1.get(i, j);
            let v = if a == 0.0 { f64::NAN } else { (m2.get(i, j) - a) / a };
            d.set(i, j, v);
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Direction;

    fn reduced(labels: &[&str], gr: DenseMatrix) -> ReducedGoogleMatrix {
        ReducedGoogleMatrix {
            subset: (0..labels.len()).collect(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            pr: vec![0.0; labels.len()],
            gr,
            direction: Direction::Reverse,
            censored: true,
            date: None,
        }
    }

    #[test]
    fn identical_is_zero() {
        let m = DenseMatrix::from_columns(2, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let r = reduced(&["a", "b"], m);
        let c = relative_change(&r, &r).unwrap();
        assert_eq!(c.delta.get(1, 0), 0.0);
        assert_eq!(c.delta.get(0, 1), 0.0);
        assert_eq!(c.undefined_count(), 2);
    }

    #[test]
    fn doubling_and_halving() {
        let a = reduced(
            &["a", "b"],
            DenseMatrix::from_columns(2, vec![vec![0.2, 0.8], vec![0.6, 0.4]]),
        );
        let b = reduced(
            &["a", "b"],
            DenseMatrix::from_columns(2, vec![vec![0.4, 0.0], vec![0.3, 0.4]]),
        );
        let c = relative_change(&a, &b).unwrap();
        assert_eq!(c.delta.get(0, 0), 1.0);
        assert_eq!(c.delta.get(1, 0), -1.0);
        assert_eq!(c.delta.get(0, 1), -0.5);
        assert_eq!(c.delta.get(1, 1), 0.0);
    }

    #[test]
    fn cap_only_affects_display() {
        let a = reduced(&["a"], DenseMatrix::from_columns(1, vec![vec![0.1]]));
        let b = reduced(&["a"], DenseMatrix::from_columns(1, vec![vec![0.5]]));
        let mut c = relative_change(&a, &b).unwrap();
        c.cap = Some((-0.5, 1.0));
        assert!((c.delta.get(0, 0) - 4.0).abs() < 1e-12);
        assert_eq!(c.display().get(0, 0), 1.0);
    }

    #[test]
    fn mismatched_subsets() {
        let m = DenseMatrix::from_columns(2, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let a = reduced(&["a", "b"], m.clone());
        let b = reduced(&["b", "a"], m);
        let e = relative_change(&a, &b).unwrap_err();
        assert!(e.to_string().contains("subset mismatch"));
    }
}
