//! Small dense helpers shared by the assembly and solver modules.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[0, 1]`: `(nodes, weights)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n starting from the Chebyshev-like guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

pub fn cholesky(a: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(a.clone())
        .ok_or_else(|| Error::Factorization(format!("{what} is not positive definite")))
}

/// Replaces `a` by its symmetric part and returns `max|a - aᵀ| / max|a|` of the input.
pub fn symmetrize(a: &mut DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (a[(i, j)], a[(j, i)]);
            defect = defect.max((x - y).abs());
            let m = 0.5 * (x + y);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    defect / scale
}

/// Eigenpairs of the symmetric-definite pencil `(a, b)`, ascending.
pub fn generalized_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = cholesky(b, "generalized eigenproblem metric")?;
    let l = chol.l();
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Factorization("triangular solve".into()))?;
    let mut c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| Error::Factorization("triangular solve".into()))?;
    symmetrize(&mut c);
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = a.nrows();
    let mut vectors = DMatrix::zeros(n, n);
    let lt = l.transpose();
    for (col, &i) in order.iter().enumerate() {
        let y = eig.eigenvectors.column(i).into_owned();
        let x = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::Factorization("triangular solve".into()))?;
        vectors.set_column(col, &x);
    }
    Ok((values, vectors))
}

/// Eigenvalues of the symmetric-definite pencil `(a, b)`, ascending.
pub fn generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = cholesky(b, "generalized eigenproblem metric")?;
    let l = chol.l();
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Factorization("triangular solve".into()))?;
    let mut c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| Error::Factorization("triangular solve".into()))?;
    symmetrize(&mut c);
    let mut vals: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Basis of `{x : cᵀx = 0}` as columns `e_i - (c_i / c_p) e_p`, `p = argmax |c|`.
pub fn complement_basis(c: &DVector<f64>) -> DMatrix<f64> {
    let n = c.len();
    let p = c.iamax();
    let mut q = DMatrix::zeros(n, n - 1);
    let mut col = 0;
    for i in 0..n {
        if i == p {
            continue;
        }
        q[(i, col)] = 1.0;
        q[(p, col)] = -c[i] / c[p];
        col += 1;
    }
    q
}

pub fn quad_form(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(a * x))
}
