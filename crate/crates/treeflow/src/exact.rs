//! Exact flow-cone projection by active-set enumeration.
//!
//! Every subset S of node constraints defines a candidate: the least-squares
//! point with those constraints tight. The candidate certifying both primal
//! feasibility (off-set slacks nonnegative) and dual feasibility (multipliers
//! nonnegative) is the projection, and it is unique, so the first certified
//! subset wins. Enumeration is exponential in the node count; the cap keeps
//! this usable as a ground-truth reference for small trees.

use crate::error::{Error, Result};
use crate::flow::FlowVector;
use crate::tree::RootedTree;

/// Largest tree the enumerator accepts.
pub const EXACT_MAX_NODES: usize = 20;

const CERT_TOL: f64 = 1e-9;

/// Exact projection of `y` onto the flow cone of `tree`, for trees of at most
/// `EXACT_MAX_NODES` nodes.
pub fn qp_project_exact(y: &[f64], tree: &RootedTree) -> Result<FlowVector> {
    let n = tree.node_count();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: y.len() });
    }
    if n > EXACT_MAX_NODES {
        return Err(Error::TreeTooLarge { nodes: n, max: EXACT_MAX_NODES });
    }

    // Dense constraint normals: row i is +1 at node i, -1 at its children.
    let mut normals = vec![vec![0.0f64; n]; n];
    for node in 0..n {
        normals[node][node] = 1.0;
        for &c in tree.children(node) {
            normals[node][c] = -1.0;
        }
    }

    let mut members = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        members.clear();
        for node in 0..n {
            if mask >> node & 1 == 1 {
                members.push(node);
            }
        }
        if let Some(x) = try_active_set(y, &normals, &members) {
            return Ok(FlowVector::new(x));
        }
    }
    unreachable!("the flow cone projection always has a KKT certificate");
}

/// Solves for the point with the given constraints tight and checks the KKT
/// certificate. Returns `None` on singular systems or failed certificates.
fn try_active_set(y: &[f64], normals: &[Vec<f64>], members: &[usize]) -> Option<Vec<f64>> {
    let k = members.len();

    // Gram matrix G = A_S A_S^T and right-hand side -A_S y.
    let mut gram = vec![vec![0.0f64; k]; k];
    let mut rhs = vec![0.0f64; k];
    for (r, &i) in members.iter().enumerate() {
        for (c, &j) in members.iter().enumerate() {
            gram[r][c] = dot(&normals[i], &normals[j]);
        }
        rhs[r] = -dot(&normals[i], y);
    }
    let lambda = solve(gram, rhs)?;
    if lambda.iter().any(|&v| v < -CERT_TOL) {
        return None;
    }

    let mut x = y.to_vec();
    for (r, &i) in members.iter().enumerate() {
        for (coord, &a) in normals[i].iter().enumerate() {
            x[coord] += lambda[r] * a;
        }
    }
    for (i, row) in normals.iter().enumerate() {
        if members.contains(&i) {
            continue;
        }
        if dot(row, &x) < -CERT_TOL {
            return None;
        }
    }
    Some(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` on (near-)singular
/// systems, which correspond to linearly dependent active sets.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())?;
        if a[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..k {
                let v = a[col][c];
                a[row][c] -= f * v;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0f64; k];
    for row in (0..k).rev() {
        let mut v = b[row];
        for c in row + 1..k {
            v -= a[row][c] * x[c];
        }
        x[row] = v / a[row][row];
    }
    Some(x)
}
