//! Exact linear algebra over the integers: rank, rational kernels, integer
//! kernel lattices, and the enumeration oracle for minimal solutions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::IntMatrix;

/// Rank by fraction-free (Bareiss) elimination.
pub fn rank(a: &IntMatrix) -> usize {
    rank_of_rows(&a.row_vecs())
}

pub fn rank_of_rows(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let nrows = m.len();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form over the integers: rows are gcd-normalized and
/// every pivot column is zero outside its pivot row. Returns the nonzero rows
/// and their pivot columns.
fn integer_rref(rows: &[Vec<BigInt>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        normalize(&mut m[r]);
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let piv = m[r][c].clone();
            let f = m[i][c].clone();
            for j in 0..ncols {
                let v = &piv * &m[i][j] - &f * &m[r][j];
                m[i][j] = v;
            }
            normalize(&mut m[i]);
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

fn normalize(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g > BigInt::one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = row.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
    }
}

fn to_i64(v: &BigInt) -> i64 {
    v.to_i64().expect("value fits in 64 bits")
}

/// Integer vectors spanning the rational kernel of `a`, one per free column.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<i64>> {
    let k = a.cols();
    let rows: Vec<Vec<BigInt>> = (0..a.rows())
        .map(|i| a.row(i).iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (m, pivots) = integer_rref(&rows, k);
    let mut out = Vec::new();
    for f in 0..k {
        if pivots.contains(&f) {
            continue;
        }
        let l = m
            .iter()
            .zip(&pivots)
            .fold(BigInt::one(), |l, (row, &c)| l.lcm(&row[c]));
        let mut v = vec![BigInt::zero(); k];
        v[f] = l.clone();
        for (row, &c) in m.iter().zip(&pivots) {
            v[c] = -(&row[f] * &l) / &row[c];
        }
        normalize(&mut v);
        out.push(v.iter().map(to_i64).collect());
    }
    out
}

/// A linearly independent integer basis of the row span of `vectors`.
pub fn row_space_basis(vectors: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (m, _) = integer_rref(&rows, ncols);
    m.iter().map(|r| r.iter().map(to_i64).collect()).collect()
}

/// Column-style Hermite reduction: returns `(h, u)` with `a·u = h`, `u`
/// unimodular and `h` in column echelon form. The trailing `k - rank`
/// columns of `u` form a basis of the integer kernel lattice.
fn column_hermite(a: &IntMatrix) -> (Vec<Vec<i128>>, Vec<Vec<i128>>, usize) {
    let m = a.rows();
    let k = a.cols();
    let mut h: Vec<Vec<i128>> = (0..m)
        .map(|i| a.row(i).iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..k)
        .map(|i| (0..k).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_op = |mat: &mut Vec<Vec<i128>>, dst: usize, src: usize, f: i128| {
        for row in mat.iter_mut() {
            row[dst] -= f * row[src];
        }
    };
    let swap = |mat: &mut Vec<Vec<i128>>, x: usize, y: usize| {
        for row in mat.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut c = 0;
    for i in 0..m {
        if c == k {
            break;
        }
        // gcd-reduce the entries h[i][c..] into column c
        loop {
            let nz: Vec<usize> = (c..k).filter(|&j| h[i][j] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&j| h[i][j].abs()).unwrap();
            swap(&mut h, c, p);
            swap(&mut u, c, p);
            let mut done = true;
            for j in c + 1..k {
                if h[i][j] != 0 {
                    let f = h[i][j] / h[i][c];
                    col_op(&mut h, j, c, f);
                    col_op(&mut u, j, c, f);
                    if h[i][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[i][c] != 0 {
            c += 1;
        }
    }
    (h, u, c)
}

/// Integer point `x0` with `a·x0 = r`, if any, plus a basis of the integer
/// kernel lattice in lower echelon form.
fn affine_lattice(a: &IntMatrix, r: &[i64]) -> Option<(Vec<i128>, Vec<Vec<i128>>)> {
    let (h, u, rank) = column_hermite(a);
    let k = a.cols();
    // solve h·y = r on the first `rank` columns by forward substitution
    let mut y = vec![0i128; k];
    let mut col = 0;
    for i in 0..a.rows() {
        let mut rest = r[i] as i128;
        for j in 0..col {
            rest -= h[i][j] * y[j];
        }
        if col < rank && h[i][col] != 0 {
            if rest % h[i][col] != 0 {
                return None;
            }
            y[col] = rest / h[i][col];
            col += 1;
        } else if rest != 0 {
            return None;
        }
    }
    let x0: Vec<i128> = (0..k).map(|i| (0..k).map(|j| u[i][j] * y[j]).sum()).collect();
    // kernel columns, as vectors, reduced to lower echelon form
    let mut basis: Vec<Vec<i128>> = (rank..k).map(|j| (0..k).map(|i| u[i][j]).collect()).collect();
    let mut out = Vec::new();
    for row in 0..k {
        if basis.is_empty() {
            break;
        }
        loop {
            let nz: Vec<usize> = (0..basis.len()).filter(|&b| basis[b][row] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&b) = nz.first() {
                    let mut v = basis.remove(b);
                    if v[row] < 0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    out.push(v);
                }
                break;
            }
            let p = *nz.iter().min_by_key(|&&b| basis[b][row].abs()).unwrap();
            for &b in &nz {
                if b != p {
                    let f = basis[b][row] / basis[p][row];
                    for i in 0..k {
                        basis[b][i] -= f * basis[p][i];
                    }
                }
            }
        }
    }
    Some((x0, out))
}

/// Minimal solutions of `a·x = r` over `N^k` with `‖x‖₁ ≤ cap`, found by
/// walking every point of the solution lattice inside the box `[0, cap]^k`.
/// For `r = 0` the zero vector is excluded, giving the Hilbert basis
/// elements within the cap.
pub fn bruteforce_min_solutions(a: &IntMatrix, r: &[i64], cap: u64) -> Vec<Vec<i64>> {
    assert_eq!(r.len(), a.rows());
    let homogeneous = r.iter().all(|&x| x == 0);
    let Some((x0, basis)) = affine_lattice(a, r) else {
        return Vec::new();
    };
    let cap = cap as i128;
    let k = a.cols();
    let mut found = Vec::new();
    let pivot: Vec<usize> = basis
        .iter()
        .map(|v| v.iter().position(|&x| x != 0).expect("nonzero basis vector"))
        .collect();

    fn walk(
        level: usize,
        cur: &mut Vec<i128>,
        basis: &[Vec<i128>],
        pivot: &[usize],
        cap: i128,
        found: &mut Vec<Vec<i128>>,
    ) {
        if level == basis.len() {
            if cur.iter().all(|&x| x >= 0) && cur.iter().sum::<i128>() <= cap {
                found.push(cur.clone());
            }
            return;
        }
        // rows above the pivot are already fixed by earlier levels
        let p = pivot[level];
        if cur[..p].iter().any(|&x| x < 0 || x > cap) {
            return;
        }
        let step = basis[level][p];
        let base = cur[p];
        // need 0 <= base + z·step <= cap, step > 0
        let lo = Integer::div_floor(&(-base), &step) - 1;
        let hi = Integer::div_floor(&(cap - base), &step) + 1;
        for z in lo..=hi {
            let v = base + z * step;
            if v < 0 || v > cap {
                continue;
            }
            for (c, b) in cur.iter_mut().zip(&basis[level]) {
                *c += z * b;
            }
            walk(level + 1, cur, basis, pivot, cap, found);
            for (c, b) in cur.iter_mut().zip(&basis[level]) {
                *c -= z * b;
            }
        }
    }

    let mut cur = x0;
    walk(0, &mut cur, &basis, &pivot, cap, &mut found);
    let mut sols: Vec<Vec<i64>> = found
        .into_iter()
        .map(|v| v.into_iter().map(|x| x as i64).collect::<Vec<i64>>())
        .filter(|v| !(homogeneous && v.iter().all(|&x| x == 0)))
        .collect();
    sols.sort();
    sols.dedup();
    let minimal: Vec<Vec<i64>> = sols
        .iter()
        .filter(|v| {
            !sols
                .iter()
                .any(|w| w != *v && w.iter().zip(v.iter()).all(|(a, b)| a <= b))
        })
        .cloned()
        .collect();
    debug_assert!(minimal.iter().all(|v| v.len() == k));
    minimal
}
