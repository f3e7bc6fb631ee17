use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};

/// Exhaustive nearest-neighbour search over a fixed set of reference points.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    refs: Matrix,
}

impl NeighborIndex {
    pub fn new(refs: Matrix) -> Result<Self> {
        if refs.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("neighbor index requires finite coordinates".into()));
        }
        Ok(NeighborIndex { refs })
    }

    pub fn len(&self) -> usize {
        self.refs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.refs.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.refs.cols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.refs.row(i)
    }

    /// The `k` reference indices closest to `point`, nearest first. Equal
    /// distances are ordered by ascending index. `exclude` removes one
    /// reference (usually the query's own row) from consideration.
    pub fn query(&self, point: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<usize>> {
        if point.len() != self.dim() {
            return Err(Error::Shape(format!(
                "query has dimension {}, index has {}",
                point.len(),
                self.dim()
            )));
        }
        let available = self.len() - usize::from(exclude.is_some_and(|e| e < self.len()));
        if k > available {
            return Err(Error::Data(format!(
                "requested {k} neighbors but only {available} reference points are available"
            )));
        }
        let mut cand: Vec<(f64, usize)> = (0..self.len())
            .filter(|&i| Some(i) != exclude)
            .map(|i| (squared_distance(point, self.refs.row(i)), i))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < cand.len() && k > 0 {
            cand.select_nth_unstable_by(k - 1, cmp);
            cand.truncate(k);
        }
        cand.truncate(k);
        cand.sort_unstable_by(cmp);
        Ok(cand.into_iter().map(|(_, i)| i).collect())
    }

    /// Neighbours of reference point `i`, excluding itself.
    pub fn query_member(&self, i: usize, k: usize) -> Result<Vec<usize>> {
        self.query(self.refs.row(i), k, Some(i))
    }
}
