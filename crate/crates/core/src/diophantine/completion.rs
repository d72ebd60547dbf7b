//! Contejean–Devie completion on a homogenized system `[A | -r]` where the
//! last variable is capped at 1, preceded by an order-preserving variable
//! elimination pass.

use std::collections::HashMap;

use num_integer::Integer;

/// Result of the completion: nonzero minimal solutions of the reduced
/// homogenized system, split by the value of the homogenizing variable.
pub(crate) struct Completion {
    pub homogeneous: Vec<Vec<i64>>,
    pub particular: Vec<Vec<i64>>,
    pub nodes: usize,
}

/// `H·z = 0` with `z ≥ 0`, the last column being the homogenizing variable.
/// `expand` maps reduced variables back: `full = expand · reduced`, with a
/// nonnegative matrix stored column-wise.
struct Reduced {
    rows: Vec<Vec<i64>>,
    expand: Vec<Vec<i64>>,
    last_frozen: bool,
}

impl Reduced {
    fn ncols(&self) -> usize {
        self.expand.len()
    }

    fn last(&self) -> usize {
        self.ncols() - 1
    }

    fn remove_col(&mut self, c: usize) {
        debug_assert!(c != self.last());
        for r in &mut self.rows {
            r.remove(c);
        }
        self.expand.remove(c);
    }

    /// `z_src := z_src + f·z_dst`, i.e. column `dst` absorbs `f` times column
    /// `src` in the matrix and the expansion.
    fn absorb(&mut self, dst: usize, src: usize, f: i64) {
        for r in &mut self.rows {
            r[dst] += f * r[src];
        }
        let (s, d) = (self.expand[src].clone(), &mut self.expand[dst]);
        for (x, y) in d.iter_mut().zip(&s) {
            *x += f * y;
        }
    }

    fn freeze_last(&mut self) {
        self.last_frozen = true;
        let l = self.last();
        for r in &mut self.rows {
            r[l] = 0;
        }
    }

    fn normalize_rows(&mut self) {
        for r in &mut self.rows {
            let g = r.iter().fold(0i64, |g, &x| g.gcd(&x));
            if g > 1 {
                r.iter_mut().for_each(|x| *x /= g);
            }
            if let Some(&f) = r.iter().find(|&&x| x != 0) {
                if f < 0 {
                    r.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        self.rows.retain(|r| r.iter().any(|&x| x != 0));
        self.rows.sort();
        self.rows.dedup();
    }

    /// One elimination; returns false at a fixpoint.
    fn step(&mut self) -> bool {
        self.normalize_rows();
        let last = self.last();
        for ri in 0..self.rows.len() {
            let row = &self.rows[ri];
            let nz: Vec<usize> = (0..row.len()).filter(|&j| row[j] != 0).collect();
            // all coefficients of one sign: every variable involved is 0
            if nz.iter().all(|&j| row[j] > 0) || nz.iter().all(|&j| row[j] < 0) {
                for &j in nz.iter().rev() {
                    if j == last {
                        self.freeze_last();
                    } else {
                        self.remove_col(j);
                    }
                }
                return true;
            }
            let vars: Vec<usize> = nz.iter().copied().filter(|&j| j != last).collect();
            let rho = row[last];
            match *vars.as_slice() {
                // α·v + ρ·z' = 0 with opposite signs
                [a] => {
                    let alpha = row[a];
                    if rho % alpha == 0 {
                        let c = -rho / alpha;
                        debug_assert!(c > 0);
                        self.absorb(last, a, c);
                        self.remove_col(a);
                    } else {
                        self.freeze_last();
                        self.remove_col(a);
                    }
                    return true;
                }
                [a, b] => {
                    let (alpha, beta) = (row[a], row[b]);
                    if alpha + beta == 0 {
                        // v_a - v_b = c·z'
                        if rho % alpha != 0 {
                            self.freeze_last();
                            return true;
                        }
                        let c = -rho / alpha;
                        let (elim, keep, off) = if c >= 0 { (a, b, c) } else { (b, a, -c) };
                        self.absorb(keep, elim, 1);
                        if off > 0 {
                            self.absorb(last, elim, off);
                        }
                        self.remove_col(elim);
                        return true;
                    }
                    if rho == 0 {
                        // α·v_a = -β·v_b: both are multiples of one variable t
                        let g = alpha.abs().gcd(&beta.abs());
                        let fa = beta.abs() / g;
                        let fb = alpha.abs() / g;
                        for r in &mut self.rows {
                            r[a] = fa * r[a] + fb * r[b];
                        }
                        let eb = self.expand[b].clone();
                        for (x, y) in self.expand[a].iter_mut().zip(&eb) {
                            *x = fa * *x + fb * y;
                        }
                        self.remove_col(b);
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }
}

/// Completion of the homogenized system `[A | -r] (x, z') = 0`, `z' ≤ 1`.
/// Returns `None` when more than `max_nodes` search nodes would be needed.
pub(crate) fn complete(a_rows: &[Vec<i64>], r: &[i64], k: usize, max_nodes: usize) -> Option<Completion> {
    let mut red = Reduced {
        rows: a_rows
            .iter()
            .zip(r)
            .map(|(row, &ri)| {
                let mut v = row.clone();
                v.push(-ri);
                v
            })
            .collect(),
        expand: (0..=k)
            .map(|j| (0..=k).map(|i| i64::from(i == j)).collect())
            .collect(),
        last_frozen: false,
    };
    while red.step() {}

    let n = red.ncols();
    let last = red.last();
    let cols: Vec<Vec<i64>> = (0..n).map(|j| red.rows.iter().map(|r| r[j]).collect()).collect();
    let cap = |j: usize, x: &[i64]| -> bool {
        if j == last {
            !red.last_frozen && x[j] < 1
        } else {
            true
        }
    };
    let dot = |u: &[i64], v: &[i64]| -> i64 { u.iter().zip(v).map(|(a, b)| a * b).sum() };

    let mut solutions: Vec<Vec<i64>> = Vec::new();
    let mut frontier: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    let zero = vec![0i64; n];
    for j in 0..n {
        if cap(j, &zero) {
            let mut x = zero.clone();
            x[j] = 1;
            frontier.push((x, cols[j].clone()));
        }
    }
    let mut nodes = 0usize;
    while !frontier.is_empty() {
        nodes += frontier.len();
        if nodes > max_nodes {
            return None;
        }
        let mut open = Vec::with_capacity(frontier.len());
        for (x, ax) in frontier {
            if ax.iter().all(|&v| v == 0) {
                solutions.push(x);
            } else {
                open.push((x, ax));
            }
        }
        let mut next: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        for (x, ax) in &open {
            for j in 0..n {
                if !cap(j, x) || dot(ax, &cols[j]) >= 0 {
                    continue;
                }
                let mut y = x.clone();
                y[j] += 1;
                if next.contains_key(&y) {
                    continue;
                }
                if solutions
                    .iter()
                    .any(|s| y.iter().zip(s).all(|(a, b)| a >= b))
                {
                    continue;
                }
                let ay: Vec<i64> = ax.iter().zip(&cols[j]).map(|(a, b)| a + b).collect();
                next.insert(y, ay);
            }
        }
        frontier = next.into_iter().collect();
    }

    let mut homogeneous = Vec::new();
    let mut particular = Vec::new();
    for s in &solutions {
        let mut full = vec![0i64; k + 1];
        for (j, &v) in s.iter().enumerate() {
            if v != 0 {
                for (f, e) in full.iter_mut().zip(&red.expand[j]) {
                    *f += v * e;
                }
            }
        }
        let z = full.pop().expect("homogenizing variable");
        match z {
            0 => homogeneous.push(full),
            1 => particular.push(full),
            _ => unreachable!("homogenizing variable is capped at 1"),
        }
    }
    homogeneous.sort();
    particular.sort();
    Some(Completion {
        homogeneous,
        particular,
        nodes,
    })
}
