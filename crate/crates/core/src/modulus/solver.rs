//! Sparse symmetric positive definite solvers, looked up by name.

use serde::{Deserialize, Serialize};

/// Compressed sparse rows; symmetric, with the diagonal stored separately.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub diag: Vec<f64>,
    pub row_start: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row off-diagonal entries.
    pub fn from_rows(diag: Vec<f64>, rows: &[Vec<(usize, f64)>]) -> Self {
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        row_start.push(0);
        for r in rows {
            for &(c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_start.push(cols.len());
        }
        CsrMatrix { n: diag.len(), diag, row_start, cols, vals }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = self.diag[i] * x[i];
            for k in self.row_start[i]..self.row_start[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stall {
    pub iterations: usize,
    pub residual: f64,
}

pub trait LinearSolver: Send + Sync {
    fn name(&self) -> &'static str;
    /// Solves `Ax = b` starting from `x`, to relative residual `tol`.
    fn solve(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<SolveStats, Stall>;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioned conjugate gradients; `precond(r, z)` writes `z = M⁻¹r`.
fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
    precond: impl Fn(&[f64], &mut [f64]),
) -> Result<SolveStats, Stall> {
    let n = a.n;
    let bn = norm(b).max(f64::MIN_POSITIVE);
    let mut r = vec![0.0; n];
    a.mul(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let res = norm(&r) / bn;
        if res < tol {
            return Ok(SolveStats { iterations: it, residual: res });
        }
        a.mul(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // recompute the true residual before giving up
    a.mul(x, &mut ap);
    let res = (0..n).map(|i| (b[i] - ap[i]).powi(2)).sum::<f64>().sqrt() / bn;
    if res < tol {
        Ok(SolveStats { iterations: max_iter, residual: res })
    } else {
        Err(Stall { iterations: max_iter, residual: res })
    }
}

pub struct Cg;

impl LinearSolver for Cg {
    fn name(&self) -> &'static str {
        "cg"
    }
    fn solve(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<SolveStats, Stall> {
        pcg(a, b, x, tol, max_iter, |r, z| z.copy_from_slice(r))
    }
}

/// Conjugate gradients with a symmetric successive over-relaxation preconditioner.
pub struct SsorCg {
    pub omega: f64,
}

impl Default for SsorCg {
    fn default() -> Self {
        SsorCg { omega: 1.5 }
    }
}

impl SsorCg {
    /// `z = M⁻¹r` with `M = (D + ωL) D⁻¹ (D + ωU) / (ω(2−ω))`.
    fn apply(&self, a: &CsrMatrix, r: &[f64], z: &mut [f64]) {
        let w = self.omega;
        for i in 0..a.n {
            let mut s = r[i];
            for k in a.row_start[i]..a.row_start[i + 1] {
                let j = a.cols[k];
                if j < i {
                    s -= w * a.vals[k] * z[j] / a.diag[j];
                }
            }
            z[i] = s;
        }
        for i in (0..a.n).rev() {
            let mut s = z[i];
            for k in a.row_start[i]..a.row_start[i + 1] {
                if a.cols[k] > i {
                    s -= w * a.vals[k] * z[a.cols[k]];
                }
            }
            z[i] = s / a.diag[i];
        }
        let scale = w * (2.0 - w);
        for v in z.iter_mut() {
            *v *= scale;
        }
    }
}

impl LinearSolver for SsorCg {
    fn name(&self) -> &'static str {
        "ssor-cg"
    }
    fn solve(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<SolveStats, Stall> {
        pcg(a, b, x, tol, max_iter, |r, z| self.apply(a, r, z))
    }
}

#[derive(Default)]
pub struct SolverRegistry {
    solvers: Vec<Box<dyn LinearSolver>>,
}

impl SolverRegistry {
    pub fn standard() -> Self {
        let mut r = SolverRegistry::default();
        r.register(Box::new(Cg));
        r.register(Box::new(SsorCg::default()));
        r
    }

    pub fn register(&mut self, s: Box<dyn LinearSolver>) {
        self.solvers.retain(|x| x.name() != s.name());
        self.solvers.push(s);
    }

    pub fn get(&self, name: &str) -> Option<&dyn LinearSolver> {
        self.solvers.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Dirichlet Laplacian of size n.
    fn laplace_1d(n: usize) -> CsrMatrix {
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                let mut r = Vec::new();
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        CsrMatrix::from_rows(vec![2.0; n], &rows)
    }

    #[test]
    fn solvers_agree_on_linear_profile() {
        // u_0 = 0, u_{n+1} = 1 gives u_i = i/(n+1)
        let n = 200;
        let a = laplace_1d(n);
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        for s in SolverRegistry::standard().names() {
            let reg = SolverRegistry::standard();
            let solver = reg.get(s).unwrap();
            let mut x = vec![0.0; n];
            let st = solver.solve(&a, &b, &mut x, 1e-12, 10_000).unwrap();
            assert!(st.residual < 1e-12);
            for (i, v) in x.iter().enumerate() {
                assert!((v - (i + 1) as f64 / (n + 1) as f64).abs() < 1e-9, "{s}");
            }
        }
    }

    #[test]
    fn stall_is_reported() {
        let a = laplace_1d(500);
        let b = vec![1.0; 500];
        let mut x = vec![0.0; 500];
        assert!(Cg.solve(&a, &b, &mut x, 1e-14, 3).is_err());
    }

    #[test]
    fn preconditioner_reduces_iterations() {
        let a = laplace_1d(400);
        let b = vec![1.0; 400];
        let mut x = vec![0.0; 400];
        let plain = Cg.solve(&a, &b, &mut x, 1e-10, 10_000).unwrap().iterations;
        let mut y = vec![0.0; 400];
        let pre = SsorCg::default().solve(&a, &b, &mut y, 1e-10, 10_000).unwrap().iterations;
        assert!(pre <= plain, "{pre} vs {plain}");
    }
}
