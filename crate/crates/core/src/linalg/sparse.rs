use crate::error::{Error, Result};

/// Square sparse matrix in compressed row storage.
///
/// Column indices are sorted within every row and duplicates are summed at
/// construction. The `symmetric` flag is set only after the stored pattern and
/// values have been checked against their transposes.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseSym {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate entries are
    /// summed in the order they appear.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::DimensionMismatch(format!(
                "entry ({r}, {c}) outside a {dim}x{dim} matrix"
            )));
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        // stable: duplicates keep their insertion order
        order.sort_by_key(|&i| (triplets[i].0, triplets[i].1));

        let mut row_offsets = vec![0usize; dim + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for i in order {
            let (r, c, v) = triplets[i];
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_offsets[r + 1] += row_offsets[r];
        }
        Ok(Self {
            dim,
            row_offsets,
            col_indices,
            values,
            symmetric: false,
        })
    }

    /// Checks `|M_ij - M_ji| <= rel_tol * max|M|` for every stored entry and
    /// sets the symmetry flag on success.
    pub fn into_symmetric(mut self, rel_tol: f64) -> Result<Self> {
        let defect = self.symmetry_defect();
        let scale = self.max_abs();
        if defect > rel_tol * scale {
            return Err(Error::DimensionMismatch(format!(
                "matrix is not symmetric: defect {defect:e} against max entry {scale:e}"
            )));
        }
        self.symmetric = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates over `(col, value)` pairs stored in `row`.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[row]..self.row_offsets[row + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_offsets[row]..self.row_offsets[row + 1];
        match self.col_indices[range.clone()].binary_search(&col) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|M_ij - M_ji|` over all stored entries.
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                defect = defect.max((v - self.get(c, r)).abs());
            }
        }
        defect
    }

    /// `y = M x`
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yr = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// Coordinate text: a `dim nnz` header followed by one `row col value`
    /// line per stored entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = format!("{} {}\n", self.dim, self.nnz());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                out.push_str(&format!("{r} {c} {v:?}\n"));
            }
        }
        out
    }

    pub fn from_coordinate_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty coordinate file".into()))?;
        let mut head = header.split_whitespace();
        let dim: usize = parse_token(head.next(), "dimension")?;
        let nnz: usize = parse_token(head.next(), "entry count")?;
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let mut t = line.split_whitespace();
            let r: usize = parse_token(t.next(), "row")?;
            let c: usize = parse_token(t.next(), "column")?;
            let v: f64 = parse_token(t.next(), "value")?;
            triplets.push((r, c, v));
        }
        if triplets.len() != nnz {
            return Err(Error::Parse(format!(
                "header announces {nnz} entries, found {}",
                triplets.len()
            )));
        }
        Self::from_triplets(dim, &triplets)
    }
}

fn parse_token<T: std::str::FromStr>(token: Option<&str>, what: &str) -> Result<T> {
    token
        .ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("malformed {what}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_columns_sorted() {
        let m = SparseSym::from_triplets(2, &[(0, 1, 1.0), (0, 0, 2.0), (0, 1, 0.5), (1, 0, 1.5)])
            .unwrap();
        assert_eq!(m.col_indices(), &[0, 1, 0]);
        assert_eq!(m.get(0, 1), 1.5);
        assert_eq!(m.nnz(), 3);
        assert!(m.into_symmetric(1e-12).is_ok());
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let m = SparseSym::from_triplets(2, &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(m.symmetry_defect(), 1.0);
        assert!(m.into_symmetric(1e-12).is_err());
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        assert!(SparseSym::from_triplets(2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn coordinate_text_round_trip() {
        let m = SparseSym::from_triplets(3, &[(0, 0, 0.1), (2, 1, -1.0 / 3.0), (1, 2, 7e-300)])
            .unwrap();
        let back = SparseSym::from_coordinate_text(&m.to_coordinate_text()).unwrap();
        assert_eq!(m, back);
    }
}
