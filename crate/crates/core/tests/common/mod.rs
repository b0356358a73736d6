//! Test-only oracles that avoid the library's construction and solver paths.
#![allow(dead_code, clippy::needless_range_loop)]

use mnae::{Clause, Instance, OperatorMatrix};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn ident(d: usize) -> Dense {
    (0..d).map(|r| (0..d).map(|c| if r == c { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![0.0; ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn pauli_x() -> Dense {
    vec![vec![0.0, 1.0], vec![1.0, 0.0]]
}

/// `diag(+1, -1)`: bit value 0 carries z = +1.
pub fn pauli_z() -> Dense {
    vec![vec![1.0, 0.0], vec![0.0, -1.0]]
}

/// Single-qubit operator `p` on qubit `q` (1-based) of `n`. Qubit 1 is the
/// least significant bit, so it is the rightmost Kronecker factor.
pub fn on_qubit(p: &Dense, q: usize, n: usize) -> Dense {
    let id = ident(2);
    let mut out = vec![vec![1.0]];
    for k in (1..=n).rev() {
        out = kron(&out, if k == q { p } else { &id });
    }
    out
}

pub fn add(a: &Dense, b: &Dense, s: f64) -> Dense {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + s * q).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn scale(a: &Dense, s: f64) -> Dense {
    a.iter().map(|r| r.iter().map(|x| s * x).collect()).collect()
}

/// `(1 + Z_i Z_j + Z_j Z_m + Z_m Z_i) / 4` from Kronecker products.
pub fn kron_projector(n: usize, c: &Clause) -> Dense {
    let [i, j, m] = c.indices();
    let z = |q| on_qubit(&pauli_z(), q, n);
    let mut out = ident(1 << n);
    for (a, b) in [(i, j), (j, m), (m, i)] {
        out = add(&out, &matmul(&z(a), &z(b)), 1.0);
    }
    scale(&out, 0.25)
}

/// `1 + (1/n) sum X_i`.
pub fn kron_a(n: usize) -> Dense {
    let mut out = ident(1 << n);
    for q in 1..=n {
        out = add(&out, &on_qubit(&pauli_x(), q, n), 1.0 / n as f64);
    }
    out
}

pub fn kron_ising(n: usize) -> Dense {
    let mut out = vec![vec![0.0; 1 << n]; 1 << n];
    for j in 1..=n {
        out = add(&out, &on_qubit(&pauli_x(), j, n), 0.9);
        out = add(&out, &on_qubit(&pauli_z(), j, n), 0.8 * (1.0 - 0.3 * j as f64 / n as f64));
    }
    for j in 1..n {
        let zz = matmul(&on_qubit(&pauli_z(), j, n), &on_qubit(&pauli_z(), j + 1, n));
        out = add(&out, &zz, 1.0);
    }
    out
}

pub fn to_rows(op: &OperatorMatrix) -> Dense {
    let d = op.dim();
    (0..d).map(|r| (0..d).map(|c| op.get(r, c)).collect()).collect()
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter().zip(b).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max)
}

/// Cyclic Jacobi eigenvalue iteration, ascending eigenvalues and column eigenvectors.
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut m = a.clone();
    let mut v = ident(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m[p][q] * m[p][q])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[a][a].total_cmp(&m[b][b]));
    let vals = order.iter().map(|&k| m[k][k]).collect();
    let vecs = (0..n).map(|r| order.iter().map(|&k| v[r][k]).collect()).collect();
    (vals, vecs)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` distinct random triples over `n` qubits, no solution-count constraint.
pub fn random_instance(rng: &mut impl Rng, n: usize, m: usize) -> Instance {
    let mut all = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                all.push(Clause::new(i, j, k).unwrap());
            }
        }
    }
    let m = m.min(all.len());
    let clauses = index::sample(rng, all.len(), m).into_iter().map(|k| all[k]).collect();
    Instance::new(n, clauses).unwrap()
}

/// Basis state `|z>` with `z` read off bit by bit, independent of `BitString`.
pub fn brute_cost(inst: &Instance, b: usize) -> usize {
    let z = |q: usize| if b >> (q - 1) & 1 == 0 { 1i8 } else { -1 };
    inst.clauses()
        .iter()
        .filter(|c| {
            let [i, j, m] = c.indices();
            z(i) == z(j) && z(j) == z(m)
        })
        .count()
}

/// Random unit vector of length `d`.
pub fn random_state(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Gap ratio computed straight from the definition, for sorted input.
pub fn naive_gap_ratio(sorted: &[f64]) -> f64 {
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let rs: Vec<f64> = gaps.windows(2).map(|g| g[0].min(g[1]) / g[0].max(g[1])).collect();
    rs.iter().sum::<f64>() / rs.len() as f64
}
