//! Banded LU with partial pivoting and Reverse Cuthill–McKee ordering, enough
//! to factor a symmetry-reduced Liouvillian without going dense.

use std::collections::VecDeque;

use crate::quantum::C64;

/// Row-wise sparse square matrix, entries `(col, value)`.
pub(crate) type SparseRows = Vec<Vec<(usize, C64)>>;

/// Symmetric-pattern RCM permutation: `perm[new] = old`.
pub(crate) fn reverse_cuthill_mckee(rows: &SparseRows) -> Vec<usize> {
    let n = rows.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &(j, _) in row {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Node at (near) maximal eccentricity in the component of `seed`.
fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut current = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let (levels, last) = bfs_levels(current, adj);
        let candidate = last.into_iter().min_by_key(|&u| (degree[u], u)).unwrap_or(current);
        if levels <= ecc {
            break;
        }
        ecc = levels;
        current = candidate;
    }
    current
}

fn bfs_levels(start: usize, adj: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let mut dist = std::collections::HashMap::new();
    dist.insert(start, 0usize);
    let mut frontier = vec![start];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in &adj[v] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(u) {
                    e.insert(depth + 1);
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            return (depth, frontier);
        }
        depth += 1;
        frontier = next;
    }
}

/// LU factors of a general band matrix in LAPACK `gbtrf` layout.
pub(crate) struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<C64>,
    piv: Vec<usize>,
}

#[derive(Debug)]
pub(crate) struct Singular {
    pub column: usize,
}

impl BandedLu {
    /// `rows` must already be in the banded ordering; `kl`/`ku` bound
    /// `row − col` and `col − row` respectively. Pivots with magnitude below
    /// `pivot_floor` count as singular.
    pub fn factor(rows: &SparseRows, kl: usize, ku: usize, pivot_floor: f64) -> Result<Self, Singular> {
        let n = rows.len();
        let ldab = 2 * kl + ku + 1;
        let mut lu = Self { n, kl, ku, ldab, ab: vec![C64::new(0.0, 0.0); ldab * n], piv: vec![0; n] };
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                let i = lu.idx(r, c);
                lu.ab[i] += v;
            }
        }
        lu.factorize(pivot_floor)?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(r + self.kl + self.ku >= c && r <= c + self.kl, "({r},{c}) outside band");
        c * self.ldab + (self.kl + self.ku + r - c)
    }

    fn factorize(&mut self, pivot_floor: f64) -> Result<(), Singular> {
        let n = self.n;
        let kv = self.kl + self.ku;
        let mut ju = 0usize;
        for j in 0..n {
            let km = self.kl.min(n - 1 - j);
            let mut p = j;
            let mut best = self.ab[self.idx(j, j)].norm();
            for r in j + 1..=j + km {
                let v = self.ab[self.idx(r, j)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            self.piv[j] = p;
            if !(best > pivot_floor) {
                return Err(Singular { column: j });
            }
            ju = ju.max((j + self.ku + (p - j)).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let (a, b) = (self.idx(j, c), self.idx(p, c));
                    self.ab.swap(a, b);
                }
            }
            let inv = C64::new(1.0, 0.0) / self.ab[self.idx(j, j)];
            for r in j + 1..=j + km {
                let i = self.idx(r, j);
                self.ab[i] *= inv;
            }
            for c in j + 1..=ju {
                let u = self.ab[self.idx(j, c)];
                if u == C64::new(0.0, 0.0) {
                    continue;
                }
                // Column c and column j are contiguous runs in `ab`.
                let base_c = c * self.ldab + kv - c;
                let base_j = j * self.ldab + kv - j;
                for r in j + 1..=j + km {
                    let l = self.ab[base_j + r];
                    self.ab[base_c + r] -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, b: &mut [C64]) {
        let n = self.n;
        let kv = self.kl + self.ku;
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != C64::new(0.0, 0.0) {
                for r in j + 1..=j + km {
                    b[r] -= self.ab[self.idx(r, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[self.idx(j, j)];
            let bj = b[j];
            for r in j.saturating_sub(kv)..j {
                b[r] -= self.ab[self.idx(r, j)] * bj;
            }
        }
    }
}

/// Applies `perm[new] = old` to rows and columns; returns the permuted
/// matrix with the band widths `(kl, ku)`.
pub(crate) fn permute(rows: &SparseRows, perm: &[usize]) -> (SparseRows, usize, usize) {
    let n = rows.len();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let (mut kl, mut ku) = (0, 0);
    let out: SparseRows = perm
        .iter()
        .enumerate()
        .map(|(r, &old)| {
            rows[old]
                .iter()
                .map(|&(c, v)| {
                    let c = inv[c];
                    if r > c {
                        kl = kl.max(r - c);
                    } else {
                        ku = ku.max(c - r);
                    }
                    (c, v)
                })
                .collect()
        })
        .collect();
    (out, kl, ku)
}
