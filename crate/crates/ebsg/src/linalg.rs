//! Banded linear algebra: compact banded storage, the Thomas tridiagonal
//! solver, and banded LU factorization with partial pivoting.
//!
//! The Galerkin systems produced by this crate are septa-diagonal
//! (bandwidth 3); everything here is written for a general symmetric
//! bandwidth `b` and sized `O(n·b)` in memory and `O(n·b²)` in work.

use thiserror::Error;

/// Errors from the direct solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    /// The Thomas solver hit a vanishing pivot (no pivoting is performed, so
    /// this aborts) at the named elimination step.
    #[error("tridiagonal elimination produced a vanishing pivot at row {0}")]
    ZeroPivot(usize),
    /// Banded LU found no usable pivot at the named elimination stage: the
    /// matrix is singular to working precision.
    #[error("banded matrix is singular to working precision (elimination stage {0})")]
    Singular(usize),
    /// A right-hand side or diagonal slice had the wrong length.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Square banded matrix with equal lower/upper bandwidth, stored row-compact:
/// row `i` holds the entries `A[i][i−b ..= i+b]` in a `(2b+1)`-wide stripe,
/// entry `(i, j)` at stripe offset `j − i + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    /// Zero matrix of size `n × n` with bandwidth `bw` (so `2·bw + 1`
    /// diagonals). Requires `n ≥ 1`.
    pub fn new(n: usize, bw: usize) -> Self {
        assert!(n >= 1, "matrix must have at least one row");
        Self {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Symmetric bandwidth `b`.
    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> Option<usize> {
        let b = self.bw as i64;
        let d = j as i64 - i as i64;
        if i < self.n && j < self.n && d.abs() <= b {
            Some(i * (2 * self.bw + 1) + (d + b) as usize)
        } else {
            None
        }
    }

    /// Entry `(i, j)`; zero outside the band.
    ///
    /// # Panics
    ///
    /// If `i` or `j` is outside the matrix.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(
            i < self.n && j < self.n,
            "index ({i}, {j}) outside {0}x{0} matrix",
            self.n
        );
        self.offset(i, j).map_or(0.0, |o| self.data[o])
    }

    /// Sets entry `(i, j)`.
    ///
    /// # Panics
    ///
    /// If `(i, j)` lies outside the band or the matrix.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let o = self
            .offset(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band of width {}", self.bw));
        self.data[o] = v;
    }

    /// Adds `v` to entry `(i, j)`.
    ///
    /// # Panics
    ///
    /// If `(i, j)` lies outside the band or the matrix.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let o = self
            .offset(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band of width {}", self.bw));
        self.data[o] += v;
    }

    /// Largest absolute entry (zero matrix ⇒ 0).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `y = A·x`.
    ///
    /// # Panics
    ///
    /// If `x` or `y` has length ≠ `n`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n, "matvec input length");
        assert_eq!(y.len(), self.n, "matvec output length");
        let b = self.bw;
        let w = 2 * b + 1;
        for i in 0..self.n {
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(self.n - 1);
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += row[j + b - i] * x[j];
            }
            y[i] = acc;
        }
    }

    /// Dense copy (test/diagnostic helper; `O(n²)` memory).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Solves a tridiagonal system by the Thomas algorithm (no pivoting).
///
/// `sub` and `sup` are the sub- and super-diagonals (length `n − 1`), `diag`
/// the main diagonal (length `n`). Fails with [`LinalgError::ZeroPivot`] if an
/// elimination pivot falls below `1e−14` times the largest input coefficient —
/// the systems this crate produces are strongly diagonally dominant, so that
/// threshold only trips on genuinely degenerate input.
pub fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    for (len, expected) in [(sub.len(), n - 1), (sup.len(), n - 1), (rhs.len(), n)] {
        if len != expected {
            return Err(LinalgError::DimensionMismatch { expected, got: len });
        }
    }
    let scale = diag
        .iter()
        .chain(sub)
        .chain(sup)
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    // Forward sweep: c[i] and d[i] are the normalized super-diagonal and rhs.
    let mut c = vec![0.0; n - 1.min(n)];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv.abs() <= tol {
        return Err(LinalgError::ZeroPivot(0));
    }
    if n > 1 {
        c[0] = sup[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i - 1] * c[i - 1];
        if piv.abs() <= tol {
            return Err(LinalgError::ZeroPivot(i));
        }
        if i < n - 1 {
            c[i] = sup[i] / piv;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv;
    }
    // Back substitution in place.
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// LU factorization of a [`BandedMatrix`] with partial (row) pivoting.
///
/// Row pivoting widens the upper band from `b` to `2b`; the factor storage is
/// `n × (2b + 1)` for `U` (the original stripe width) plus `n × b` for the
/// multipliers, and solving costs `O(n·b)` per right-hand side. The row
/// permutation is recorded so one factorization serves many right-hand sides.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    bw: usize,
    /// Upper factor, row-compact: `upper[k]` starts at the pivot of stage `k`.
    upper: Vec<f64>,
    /// Elimination multipliers per stage.
    lower: Vec<f64>,
    /// Row swapped with row `k` at stage `k`.
    pivot_row: Vec<usize>,
}

impl BandedLu {
    /// Factors the matrix. Fails with [`LinalgError::Singular`] when the best
    /// available pivot at some stage is below `1e−14` times the largest input
    /// entry.
    pub fn factor(a: &BandedMatrix) -> Result<Self, LinalgError> {
        let n = a.n;
        let b = a.bw;
        let w = 2 * b + 1;
        let tol = 1e-14 * a.max_abs().max(f64::MIN_POSITIVE);

        // Working copy in "skewed" layout: row i of `u` holds the matrix
        // entries A[i][i−b ..= i+b]; left-shift the first b rows so that
        // u[i][0] is always the leftmost in-matrix entry of row i.
        let mut u = a.data.clone();
        for i in 0..b.min(n) {
            let shift = b - i;
            for j in shift..w {
                u[i * w + j - shift] = u[i * w + j];
            }
            for j in (w - shift)..w {
                u[i * w + j] = 0.0;
            }
        }

        let mut lower = vec![0.0; n * b];
        let mut pivot_row = vec![0usize; n];
        // `reach` is the last row whose leading entry stage k can touch.
        for k in 0..n {
            let reach = (k + b).min(n - 1);
            // Select the largest leading entry among rows k..=reach.
            let mut best = k;
            let mut best_val = u[k * w].abs();
            for r in (k + 1)..=reach {
                let v = u[r * w].abs();
                if v > best_val {
                    best_val = v;
                    best = r;
                }
            }
            if best_val <= tol {
                return Err(LinalgError::Singular(k));
            }
            pivot_row[k] = best;
            if best != k {
                for j in 0..w {
                    u.swap(k * w + j, best * w + j);
                }
            }
            let pivot = u[k * w];
            for r in (k + 1)..=reach {
                let m = u[r * w] / pivot;
                lower[k * b + (r - k - 1)] = m;
                // Eliminate and left-shift row r by one position.
                for j in 1..w {
                    u[r * w + j - 1] = u[r * w + j] - m * u[k * w + j];
                }
                u[r * w + w - 1] = 0.0;
            }
        }
        Ok(Self {
            n,
            bw: b,
            upper: u,
            lower,
            pivot_row,
        })
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A·x = rhs` in place using the stored factors.
    ///
    /// # Panics
    ///
    /// If `rhs.len() ≠ n`.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        assert_eq!(rhs.len(), self.n, "right-hand side length");
        let n = self.n;
        let b = self.bw;
        let w = 2 * b + 1;
        // Forward: apply the recorded swaps and multipliers.
        for k in 0..n {
            let p = self.pivot_row[k];
            if p != k {
                rhs.swap(k, p);
            }
            let reach = (k + b).min(n - 1);
            for r in (k + 1)..=reach {
                rhs[r] -= self.lower[k * b + (r - k - 1)] * rhs[k];
            }
        }
        // Backward: U is row-compact with the pivot first in each row.
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            let reach = (w - 1).min(n - 1 - i);
            for j in 1..=reach {
                acc -= self.upper[i * w + j] * rhs[i + j];
            }
            rhs[i] = acc / self.upper[i * w];
        }
    }

    /// Solves `A·x = rhs`, allocating the result.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if rhs.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }
}
