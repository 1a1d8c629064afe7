//! Quadrature rules on the reference interval and reference triangle.
//!
//! Triangle rules are collapsed tensor products: Gauss-Legendre in the first
//! collapsed direction and Gauss-Jacobi(1,0) in the second, which absorbs the
//! collapse Jacobian. A rule of "degree d" integrates all bivariate
//! polynomials of total degree ≤ d exactly.

use crate::geom::V2;
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Volume rule on the reference triangle (0,0)-(1,0)-(0,1).
#[derive(Debug, Clone)]
pub struct TriRule {
    pub degree: usize,
    pub points: Vec<V2>,
    pub weights: Vec<f64>,
}

/// Rule on the reference interval [0,1].
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub degree: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TriRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl EdgeRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Nodes and weights of an n-point Gauss rule for the weight
/// (1-x)^alpha (1+x)^beta on [-1,1], via the Golub-Welsch eigenproblem.
/// `alpha`, `beta` are restricted to small non-negative integers here.
fn gauss_jacobi(n: usize, alpha: u32, beta: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let (af, bf) = (alpha as f64, beta as f64);
    // zeroth moment of the weight
    let mu0 = {
        // 2^(a+b+1) * B(a+1, b+1) with integer a, b
        let mut b_ab = 1.0; // B(a+1,b+1) = a! b! / (a+b+1)!
        for k in 1..=alpha {
            b_ab *= k as f64;
        }
        for k in 1..=beta {
            b_ab *= k as f64;
        }
        let mut fact = 1.0;
        for k in 1..=(alpha + beta + 1) {
            fact *= k as f64;
        }
        2f64.powi((alpha + beta + 1) as i32) * b_ab / fact
    };

    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n {
        let kf = k as f64;
        diag[k] = if k == 0 && alpha + beta == 0 {
            0.0
        } else {
            (bf * bf - af * af)
                / ((2.0 * kf + af + bf) * (2.0 * kf + af + bf + 2.0))
        };
    }
    for k in 1..n {
        let kf = k as f64;
        let num = 4.0 * kf * (kf + af) * (kf + bf) * (kf + af + bf);
        let den = (2.0 * kf + af + bf).powi(2)
            * (2.0 * kf + af + bf + 1.0)
            * (2.0 * kf + af + bf - 1.0);
        off[k - 1] = (num / den).sqrt();
    }

    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = diag[k];
    }
    for k in 0..n - 1 {
        m[(k, k + 1)] = off[k];
        m[(k + 1, k)] = off[k];
    }
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (x, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    (
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1).collect(),
    )
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0, 0)
}

fn build_edge_rule(degree: usize) -> EdgeRule {
    let n = degree / 2 + 1; // 2n-1 >= degree
    let (x, w) = gauss_legendre(n);
    EdgeRule {
        degree,
        points: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|&wi| 0.5 * wi).collect(),
    }
}

fn build_tri_rule(degree: usize) -> TriRule {
    let n = degree / 2 + 1;
    let (xa, wa) = gauss_legendre(n);
    let (xb, wb) = gauss_jacobi(n, 1, 0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for j in 0..n {
        let b = xb[j];
        for i in 0..n {
            let a = xa[i];
            let u = 0.25 * (1.0 + a) * (1.0 - b);
            let v = 0.5 * (1.0 + b);
            points.push(V2::new(u, v));
            weights.push(0.125 * wa[i] * wb[j]);
        }
    }
    TriRule {
        degree,
        points,
        weights,
    }
}

type TriCache = Mutex<HashMap<usize, Arc<TriRule>>>;
type EdgeCache = Mutex<HashMap<usize, Arc<EdgeRule>>>;

static TRI_RULES: OnceLock<TriCache> = OnceLock::new();
static EDGE_RULES: OnceLock<EdgeCache> = OnceLock::new();

/// Memoized triangle rule exact for total degree `degree`.
pub fn tri_rule(degree: usize) -> Arc<TriRule> {
    let cache = TRI_RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(degree)
        .or_insert_with(|| Arc::new(build_tri_rule(degree)))
        .clone()
}

/// Memoized interval rule on [0,1] exact for degree `degree`.
pub fn edge_rule(degree: usize) -> Arc<EdgeRule> {
    let cache = EDGE_RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(degree)
        .or_insert_with(|| Arc::new(build_edge_rule(degree)))
        .clone()
}
