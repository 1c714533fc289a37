//! Shared test helpers: random structures and a brute-force polyhedral
//! projector used as ground truth. The projector here is deliberately
//! independent of the library's solvers: it handles general affine
//! constraints `a·x >= b` by full subset enumeration with its own
//! elimination routine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use treeflow::RootedTree;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Uniform random attachment tree: node i picks its parent among 0..i.
pub fn random_tree(n: usize, rng: &mut ChaCha12Rng) -> RootedTree {
    let mut parents = vec![-1i64];
    for i in 1..n {
        parents.push(rng.random_range(0..i) as i64);
    }
    RootedTree::from_parents(&parents).unwrap()
}

pub fn random_vec(n: usize, lo: f64, hi: f64, rng: &mut ChaCha12Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Exact projection of `y` onto `{x : a_i . x >= b_i for all i}` by trying
/// every candidate active set. Panics if no subset certifies, which cannot
/// happen for a nonempty polyhedron.
pub fn project_polyhedron(y: &[f64], constraints: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let m = constraints.len();
    assert!(m <= 16, "oracle is exponential in the constraint count");
    'mask: for mask in 0u32..(1u32 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let k = active.len();
        let mut gram = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for (r, &i) in active.iter().enumerate() {
            for (c, &j) in active.iter().enumerate() {
                gram[r][c] = dot(&constraints[i].0, &constraints[j].0);
            }
            rhs[r] = constraints[i].1 - dot(&constraints[i].0, y);
        }
        let Some(lambda) = solve_gauss(gram, rhs) else {
            continue;
        };
        if lambda.iter().any(|&l| l < -1e-9) {
            continue;
        }
        let mut x = y.to_vec();
        for (r, &i) in active.iter().enumerate() {
            for (coord, a) in constraints[i].0.iter().enumerate() {
                x[coord] += lambda[r] * a;
            }
        }
        for (i, (a, b)) in constraints.iter().enumerate() {
            if !active.contains(&i) && dot(a, &x) < b - 1e-9 {
                continue 'mask;
            }
        }
        return x;
    }
    panic!("no active set certified");
}

/// The flow-cone constraint rows of a tree: +1 at the node, -1 at each child,
/// right-hand side zero.
pub fn flow_cone_constraints(tree: &RootedTree) -> Vec<(Vec<f64>, f64)> {
    let n = tree.node_count();
    (0..n)
        .map(|node| {
            let mut a = vec![0.0; n];
            a[node] = 1.0;
            for &c in tree.children(node) {
                a[c] = -1.0;
            }
            (a, 0.0)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let mut best = col;
        for row in col + 1..k {
            if a[row][col].abs() > a[best][col].abs() {
                best = row;
            }
        }
        if a[best][col].abs() < 1e-11 {
            return None;
        }
        a.swap(col, best);
        b.swap(col, best);
        for row in 0..k {
            if row == col {
                continue;
            }
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in 0..k {
                let v = a[col][c];
                a[row][c] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}
