//! Dense tableau simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`,
//! so the slack basis is feasible and no phase one is needed.
//!
//! Dantzig pricing, switching to Bland's rule while pivots stay degenerate.
//! Dual values are read off the objective row at the slack columns.

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    NegativeRhs(usize),
    Unbounded(usize),
    PivotLimit(usize),
    Shape(String),
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::NegativeRhs(i) => write!(f, "row {i} has negative right-hand side"),
            LpError::Unbounded(j) => write!(f, "unbounded along column {j}"),
            LpError::PivotLimit(n) => write!(f, "no optimum after {n} pivots"),
            LpError::Shape(s) => write!(f, "shape mismatch: {s}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// One multiplier per constraint row.
    pub duals: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

const EPS: f64 = 1e-11;
const DEGENERATE_STREAK: usize = 20;

struct Tableau {
    rows: usize,
    width: usize,
    cells: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width;
        let p = self.at(r, col);
        for v in &mut self.cells[r * w..(r + 1) * w] {
            *v /= p;
        }
        let prow: Vec<f64> = self.cells[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.at(i, col);
            if f != 0.0 {
                for (v, pv) in self.cells[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.cells[i * w + col] = 0.0;
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.obj[col] = 0.0;
        }
        self.basis[r] = col;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let cols = &self.obj[..self.width - 1];
        if bland {
            cols.iter().position(|&d| d < -EPS)
        } else {
            cols.iter()
                .enumerate()
                .filter(|(_, &d)| d < -EPS)
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(j, _)| j)
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, col);
            if a <= EPS {
                continue;
            }
            let ratio = self.rhs(i) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-13 || (ratio <= br + 1e-13 && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }
}

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64], max_pivots: usize) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = b.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape(format!("expected {m} rows of length {n}")));
    }
    if let Some(i) = b.iter().position(|&v| v < 0.0) {
        return Err(LpError::NegativeRhs(i));
    }
    let width = n + m + 1;
    let mut cells = vec![0.0; m * width];
    for i in 0..m {
        cells[i * width..i * width + n].copy_from_slice(&a[i]);
        cells[i * width + n + i] = 1.0;
        cells[i * width + width - 1] = b[i];
    }
    let mut obj = vec![0.0; width];
    for (o, &cj) in obj.iter_mut().zip(c) {
        *o = -cj;
    }
    let mut t = Tableau { rows: m, width, cells, obj, basis: (n..n + m).collect() };

    let mut pivots = 0;
    let mut streak = 0;
    loop {
        let Some(col) = t.entering(streak >= DEGENERATE_STREAK) else {
            break;
        };
        let row = t.leaving(col).ok_or(LpError::Unbounded(col))?;
        if pivots >= max_pivots {
            return Err(LpError::PivotLimit(pivots));
        }
        if t.rhs(row).abs() <= EPS {
            streak += 1;
        } else {
            streak = 0;
        }
        t.pivot(row, col);
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(i);
        }
    }
    let duals = t.obj[n..n + m].to_vec();
    Ok(LpSolution { x, duals, value: t.obj[width - 1], pivots })
}
