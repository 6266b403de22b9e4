//! Integer matrix and lattice arithmetic over ℤ^d.
//!
//! Lattices are given by the column span of an integer matrix. The column
//! Hermite normal form provides canonical coset representatives, membership
//! tests, solutions of `A·x = b` over ℤ, and lattice indices — everything the
//! lattice-based dynamical families need for their meet computations.

/// Dense row-major integer matrix with `i128` entries. The dynamical families
/// deal in tiny dimensions (d ≤ 8) and short products, so overflow headroom
/// matters more than speed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Mat {
    pub rows: usize,
    pub cols: usize,
    a: Vec<i128>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Mat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x as i128);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> i128 {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.a[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out
                        .at(i, j)
                        .checked_add(aik.checked_mul(other.at(k, j)).expect("matrix overflow"))
                        .expect("matrix overflow");
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.at(i, j).checked_mul(v[j]).expect("matrix overflow"))
                    .try_fold(0i128, i128::checked_add)
                    .expect("matrix overflow")
            })
            .collect()
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "dimension mismatch");
        let mut out = Mat::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.at(i, j));
            }
        }
        out
    }

    fn swap_cols(&mut self, j1: usize, j2: usize) {
        if j1 == j2 {
            return;
        }
        for i in 0..self.rows {
            let t = self.at(i, j1);
            self.set(i, j1, self.at(i, j2));
            self.set(i, j2, t);
        }
    }

    /// col[dst] += q · col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: i128) {
        if q == 0 {
            return;
        }
        for i in 0..self.rows {
            let v = self
                .at(i, dst)
                .checked_add(q.checked_mul(self.at(i, src)).expect("matrix overflow"))
                .expect("matrix overflow");
            self.set(i, dst, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self.set(i, j, -self.at(i, j));
        }
    }
}

/// Column Hermite normal form `A·U = H` with `U` unimodular.
///
/// Pivot columns are in echelon position: pivot `i` sits at
/// `(pivots[i].0, pivots[i].1 = i)` with strictly increasing pivot rows,
/// positive pivot entries, zeroes to the right of each pivot in its row, and
/// entries to the left reduced into `[0, pivot)`.
#[derive(Clone, Debug)]
pub(crate) struct ColumnHnf {
    pub h: Mat,
    pub u: Mat,
    /// `(row, col)` of each pivot, in column order.
    pub pivots: Vec<(usize, usize)>,
}

pub(crate) fn column_hnf(a: &Mat) -> ColumnHnf {
    let mut h = a.clone();
    let mut u = Mat::identity(a.cols);
    let mut pivots = Vec::new();
    let mut c = 0usize;
    for r in 0..h.rows {
        if c == h.cols {
            break;
        }
        if !(c..h.cols).any(|j| h.at(r, j) != 0) {
            continue;
        }
        // Euclidean elimination across columns c..cols in row r.
        loop {
            let mut best: Option<usize> = None;
            for j in c..h.cols {
                if h.at(r, j) != 0 && best.map_or(true, |b| h.at(r, j).abs() < h.at(r, b).abs()) {
                    best = Some(j);
                }
            }
            let b = best.expect("nonzero entry exists");
            h.swap_cols(c, b);
            u.swap_cols(c, b);
            let pivot = h.at(r, c);
            let mut done = true;
            for j in c + 1..h.cols {
                let q = div_floor(h.at(r, j), pivot);
                h.add_col(j, c, -q);
                u.add_col(j, c, -q);
                if h.at(r, j) != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.at(r, c) < 0 {
            h.negate_col(c);
            u.negate_col(c);
        }
        let pivot = h.at(r, c);
        for j in 0..c {
            let q = div_floor(h.at(r, j), pivot);
            h.add_col(j, c, -q);
            u.add_col(j, c, -q);
        }
        pivots.push((r, c));
        c += 1;
    }
    ColumnHnf { h, u, pivots }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Solves `A·x = b` over ℤ for the matrix behind `hnf`; returns a particular
/// solution in the original generator coordinates, or `None` when `b` is not
/// in the column span.
pub(crate) fn solve_in_lattice(hnf: &ColumnHnf, b: &[i128]) -> Option<Vec<i128>> {
    assert_eq!(b.len(), hnf.h.rows, "dimension mismatch");
    let mut y = vec![0i128; hnf.h.cols];
    let mut residual: Vec<i128> = b.to_vec();
    for &(r, c) in &hnf.pivots {
        let pivot = hnf.h.at(r, c);
        if residual[r] % pivot != 0 {
            return None;
        }
        let q = residual[r] / pivot;
        y[c] = q;
        for (i, entry) in residual.iter_mut().enumerate() {
            *entry = entry
                .checked_sub(q.checked_mul(hnf.h.at(i, c)).expect("matrix overflow"))
                .expect("matrix overflow");
        }
    }
    if residual.iter().any(|&v| v != 0) {
        return None;
    }
    Some(hnf.u.mul_vec(&y))
}

/// Membership test `b ∈ L(A)`.
#[cfg(test)]
pub(crate) fn in_lattice(hnf: &ColumnHnf, b: &[i128]) -> bool {
    solve_in_lattice(hnf, b).is_some()
}

/// Canonical representative of the coset `v + L(A)` for a full-rank lattice:
/// the unique coset member whose `i`-th coordinate lies in `[0, H[i][i])`.
/// Returns `None` when the lattice is not of full rank.
pub(crate) fn coset_reduce(hnf: &ColumnHnf, v: &[i128]) -> Option<Vec<i128>> {
    if hnf.pivots.len() != hnf.h.rows {
        return None;
    }
    let mut rep: Vec<i128> = v.to_vec();
    for &(r, c) in &hnf.pivots {
        let pivot = hnf.h.at(r, c);
        let q = div_floor(rep[r], pivot);
        for (i, entry) in rep.iter_mut().enumerate() {
            *entry = entry
                .checked_sub(q.checked_mul(hnf.h.at(i, c)).expect("matrix overflow"))
                .expect("matrix overflow");
        }
    }
    Some(rep)
}

/// Index `[ℤ^d : L(A)]` for a full-rank lattice (product of HNF pivots);
/// `None` when rank-deficient.
pub(crate) fn lattice_index(hnf: &ColumnHnf) -> Option<i128> {
    if hnf.pivots.len() != hnf.h.rows {
        return None;
    }
    let mut det = 1i128;
    for &(r, c) in &hnf.pivots {
        det = det.checked_mul(hnf.h.at(r, c)).expect("matrix overflow");
    }
    Some(det)
}

/// Basis matrix (d × rank) of the intersection `L(A) ∩ L(B)`, computed from
/// the kernel of `[A | −B]`: a vector lies in both lattices exactly when
/// `A·x = B·y` for integer `x`, `y`.
pub(crate) fn lattice_intersection(a: &Mat, b: &Mat) -> Mat {
    let mut neg_b = b.clone();
    for i in 0..neg_b.rows {
        for j in 0..neg_b.cols {
            neg_b.set(i, j, -neg_b.at(i, j));
        }
    }
    let stacked = a.hstack(&neg_b);
    let hnf = column_hnf(&stacked);
    let mut members: Vec<Vec<i128>> = Vec::new();
    for j in 0..hnf.h.cols {
        if (0..hnf.h.rows).all(|i| hnf.h.at(i, j) == 0) {
            let coeffs: Vec<i128> = (0..a.cols).map(|i| hnf.u.at(i, j)).collect();
            members.push(a.mul_vec(&coeffs));
        }
    }
    let mut out = Mat::zero(a.rows, members.len());
    for (j, col) in members.iter().enumerate() {
        for (i, &entry) in col.iter().enumerate() {
            out.set(i, j, entry);
        }
    }
    out
}

/// Canonical form of a lattice basis: the HNF matrix restricted to its pivot
/// columns. Two bases span the same full-rank lattice iff these agree.
pub(crate) fn canonical_basis(a: &Mat) -> Mat {
    let hnf = column_hnf(a);
    let mut out = Mat::zero(a.rows, hnf.pivots.len());
    for (k, &(_, c)) in hnf.pivots.iter().enumerate() {
        for i in 0..a.rows {
            out.set(i, k, hnf.h.at(i, c));
        }
    }
    out
}

/// All canonical coset representatives of ℤ^d modulo a full-rank lattice, in
/// lexicographic order. The caller must keep the index small.
pub(crate) fn coset_representatives(hnf: &ColumnHnf) -> Option<Vec<Vec<i128>>> {
    if hnf.pivots.len() != hnf.h.rows {
        return None;
    }
    let d = hnf.h.rows;
    let bounds: Vec<i128> = {
        let mut b = vec![0i128; d];
        for &(r, c) in &hnf.pivots {
            b[r] = hnf.h.at(r, c);
        }
        b
    };
    let mut out = Vec::new();
    let mut cur = vec![0i128; d];
    loop {
        // Box points are not automatically canonical for non-diagonal HNF, so
        // reduce each one.
        let rep = coset_reduce(hnf, &cur)?;
        if !out.contains(&rep) {
            out.push(rep);
        }
        let mut i = d;
        loop {
            if i == 0 {
                out.sort();
                return Some(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < bounds[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}
