//! Exact rational scalars, vectors and matrices.
//!
//! Everything downstream runs on these: map matrices, projectors, polytope
//! computations. Scalars are arbitrary-precision rationals kept in canonical
//! form (positive denominator, fully reduced) by `num-rational`. Matrices are
//! dense and row-major; scenarios at desk scale have at most a few hundred
//! dimensions, so sparsity would buy nothing.
//!
//! Elimination pivots on the first nonzero entry in column order and fully
//! normalizes each step, so every routine here is deterministic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational scalar, always in canonical form
/// (`den > 0`, `gcd(|num|, den) = 1`, zero is `0/1`).
pub type Rational = num_rational::BigRational;

/// A plain coefficient vector; length is fixed by the context that owns it.
pub type RatVector = Vec<Rational>;

/// Shorthand for a small rational constant.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer constant.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Canonical textual form: `p/q`, or just `p` when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `p/q` or `p`; the result is reduced to canonical form.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| crate::Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// Dot product of two equal-length vectors.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// `a + c*b`, elementwise.
pub fn add_scaled(a: &[Rational], c: &Rational, b: &[Rational]) -> RatVector {
    assert_eq!(a.len(), b.len(), "add_scaled: length mismatch");
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

/// Scales a vector by a constant.
pub fn scale(a: &[Rational], c: &Rational) -> RatVector {
    a.iter().map(|x| x * c).collect()
}

/// Kronecker product of two vectors, first factor slowest.
pub fn kron_vec(a: &[Rational], b: &[Rational]) -> RatVector {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Rescales a nonzero rational vector to relatively prime integers,
/// preserving sign; the zero vector is returned unchanged.
pub fn primitive_integer_form(v: &[Rational]) -> RatVector {
    let mut den_lcm = BigInt::one();
    for x in v {
        den_lcm = num_integer::lcm(den_lcm, x.denom().clone());
    }
    let mut ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&den_lcm / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for n in &ints {
        g = num_integer::gcd(g, n.abs());
    }
    if g.is_zero() {
        return v.to_vec();
    }
    for n in &mut ints {
        *n = &*n / &g;
    }
    ints.into_iter().map(Rational::from_integer).collect()
}

/// Dense exact-rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        RatMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<RatVector>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            entries.extend(r);
        }
        RatMatrix {
            rows: nrows,
            cols: ncols,
            entries,
        }
    }

    /// Builds a matrix from an array of i64 rows; test and fixture helper.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat_int(v)).collect())
                .collect(),
        )
    }

    /// Column vector times row vector.
    pub fn outer(col: &[Rational], row: &[Rational]) -> Self {
        let mut m = Self::zeros(col.len(), row.len());
        for (i, c) in col.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, r) in row.iter().enumerate() {
                m.set(i, j, c * r);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> RatVector {
        self.row(r).to_vec()
    }

    pub fn col_vec(&self, c: usize) -> RatVector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rational::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add: shape mismatch"
        );
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "sub: shape mismatch"
        );
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rational]) -> RatVector {
        assert_eq!(self.cols, v.len(), "mul_vec: dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    /// Row vector times matrix.
    pub fn row_mul(&self, v: &[Rational]) -> RatVector {
        assert_eq!(self.rows, v.len(), "row_mul: dimension mismatch");
        let mut out = vec![Rational::zero(); self.cols];
        for (r, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for c in 0..self.cols {
                let e = self.get(r, c);
                if !e.is_zero() {
                    out[c] += coeff * e;
                }
            }
        }
        out
    }

    /// Kronecker product, first factor slowest in both indices.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let b = other.get(r2, c2);
                        if !b.is_zero() {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack: column mismatch");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        RatMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Reduces to row echelon form in place; returns the pivot columns.
    ///
    /// Pivoting takes the first nonzero entry in column order and normalizes
    /// the pivot row, giving the unique reduced row echelon form.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let found = (pivot_row..self.rows).find(|&r| !self.get(r, col).is_zero());
            let Some(r0) = found else { continue };
            if r0 != pivot_row {
                for c in 0..self.cols {
                    self.entries
                        .swap(r0 * self.cols + c, pivot_row * self.cols + c);
                }
            }
            let inv = self.get(pivot_row, col).recip();
            for c in col..self.cols {
                let v = self.get(pivot_row, c) * &inv;
                self.set(pivot_row, c, v);
            }
            for r in 0..self.rows {
                if r == pivot_row || self.get(r, col).is_zero() {
                    continue;
                }
                let f = self.get(r, col).clone();
                for c in col..self.cols {
                    let v = self.get(r, c) - &f * self.get(pivot_row, c);
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }
}

/// Exact rank via rational Gaussian elimination.
pub fn rank(m: &RatMatrix) -> usize {
    m.rref().1.len()
}

/// Exact basis of the right null space; `cols - rank(m)` vectors, each
/// corresponding to one free column of the reduced form.
pub fn kernel_basis(m: &RatMatrix) -> Vec<RatVector> {
    let (r, pivots) = m.rref();
    let n = m.cols();
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; n];
        for (row, &col) in pivots.iter().enumerate() {
            v[col] = Some(row);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut vec = vec![Rational::zero(); n];
        vec[free] = Rational::one();
        for (col, slot) in pivot_set.iter().enumerate() {
            if let Some(row) = slot {
                vec[col] = -r.get(*row, free).clone();
            }
        }
        basis.push(vec);
    }
    basis
}

/// Exact solution of `M x = b` if one exists (free variables set to zero).
pub fn solve(m: &RatMatrix, b: &[Rational]) -> Option<RatVector> {
    assert_eq!(m.rows(), b.len(), "solve: rhs length mismatch");
    let mut aug = RatMatrix::zeros(m.rows(), m.cols() + 1);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, m.cols(), b[r].clone());
    }
    let (red, pivots) = aug.rref();
    if pivots.contains(&m.cols()) {
        return None; // a row reduced to 0 = 1
    }
    let mut x = vec![Rational::zero(); m.cols()];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = red.get(row, m.cols()).clone();
    }
    Some(x)
}

/// Inverse of a square nonsingular matrix; panics when singular (callers
/// establish nonsingularity first).
pub fn inverse(m: &RatMatrix) -> RatMatrix {
    assert_eq!(m.rows(), m.cols(), "inverse: not square");
    let n = m.rows();
    let mut aug = RatMatrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, n + r, Rational::one());
    }
    let (red, pivots) = aug.rref();
    assert_eq!(
        pivots,
        (0..n).collect::<Vec<_>>(),
        "inverse: matrix is singular"
    );
    let mut out = RatMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, red.get(r, n + c).clone());
        }
    }
    out
}

/// Exact Moore-Penrose pseudoinverse via rank factorization `M = B C`,
/// with `M⁺ = Cᵀ (C Cᵀ)⁻¹ (Bᵀ B)⁻¹ Bᵀ`; satisfies all four Penrose
/// identities exactly.
pub fn pseudo_inverse(m: &RatMatrix) -> RatMatrix {
    let (red, pivots) = m.rref();
    let r = pivots.len();
    if r == 0 {
        return RatMatrix::zeros(m.cols(), m.rows());
    }
    // B: pivot columns of M (m x r); C: first r rows of the RREF (r x n).
    let mut b = RatMatrix::zeros(m.rows(), r);
    for (j, &col) in pivots.iter().enumerate() {
        for i in 0..m.rows() {
            b.set(i, j, m.get(i, col).clone());
        }
    }
    let mut c = RatMatrix::zeros(r, m.cols());
    for i in 0..r {
        for j in 0..m.cols() {
            c.set(i, j, red.get(i, j).clone());
        }
    }
    let ct = c.transpose();
    let bt = b.transpose();
    let cct_inv = inverse(&c.mul(&ct));
    let btb_inv = inverse(&bt.mul(&b));
    ct.mul(&cct_inv).mul(&btb_inv).mul(&bt)
}

/// True when `v` lies in the row span of `rows`.
pub fn in_span(rows: &[RatVector], v: &[Rational]) -> bool {
    if v.iter().all(Rational::is_zero) {
        return true;
    }
    if rows.is_empty() {
        return false;
    }
    let mat = RatMatrix::from_rows(rows.to_vec()).transpose();
    solve(&mat, v).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent rank oracle: size of the largest nonvanishing minor,
    /// computed by cofactor-expansion determinants. Exponential, so only
    /// used on tiny matrices.
    fn rank_by_minors(m: &RatMatrix) -> usize {
        fn det(m: &RatMatrix) -> Rational {
            let n = m.rows();
            if n == 0 {
                return Rational::one();
            }
            if n == 1 {
                return m.get(0, 0).clone();
            }
            let mut acc = Rational::zero();
            for j in 0..n {
                if m.get(0, j).is_zero() {
                    continue;
                }
                let mut sub = RatMatrix::zeros(n - 1, n - 1);
                for r in 1..n {
                    let mut cc = 0;
                    for c in 0..n {
                        if c == j {
                            continue;
                        }
                        sub.set(r - 1, cc, m.get(r, c).clone());
                        cc += 1;
                    }
                }
                let term = m.get(0, j) * det(&sub);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            fn go(
                start: usize,
                n: usize,
                k: usize,
                cur: &mut Vec<usize>,
                out: &mut Vec<Vec<usize>>,
            ) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for i in start..n {
                    cur.push(i);
                    go(i + 1, n, k, cur, out);
                    cur.pop();
                }
            }
            go(0, n, k, &mut cur, &mut out);
            out
        }
        for k in (1..=m.rows().min(m.cols())).rev() {
            for rows in subsets(m.rows(), k) {
                for cols in subsets(m.cols(), k) {
                    let mut sub = RatMatrix::zeros(k, k);
                    for (i, &r) in rows.iter().enumerate() {
                        for (j, &c) in cols.iter().enumerate() {
                            sub.set(i, j, m.get(r, c).clone());
                        }
                    }
                    if !det(&sub).is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    /// The Collins-Gisin reconstruction matrix for cardinality (3,2); its
    /// rank anchors the elimination code against the minor oracle.
    fn g_matrix_3_2() -> RatMatrix {
        RatMatrix::from_i64_rows(&[
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[1, -1, -1, 0],
            &[0, 0, 0, 1],
            &[1, 0, 0, -1],
        ])
    }

    #[test]
    fn rational_formatting_round_trips() {
        assert_eq!(format_rational(&rat(1, 2)), "1/2");
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(parse_rational("7/3").unwrap(), rat(7, 3));
        assert_eq!(parse_rational("-5").unwrap(), rat_int(-5));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(rank(&RatMatrix::identity(5)), 5);
        assert_eq!(rank(&RatMatrix::zeros(3, 3)), 0);
    }

    #[test]
    fn rank_of_collins_gisin_reconstruction() {
        let g = g_matrix_3_2();
        assert_eq!(rank_by_minors(&g), 4);
        assert_eq!(rank(&g), 4);
    }

    #[test]
    fn kernel_of_single_row() {
        let m = RatMatrix::from_i64_rows(&[&[1, 1, -1, -1]]);
        let basis = kernel_basis(&m);
        assert_eq!(basis.len(), 3);
        for v in &basis {
            assert!(m.mul_vec(v).iter().all(Rational::is_zero));
        }
        assert!(kernel_basis(&RatMatrix::identity(4)).is_empty());
    }

    #[test]
    fn solve_cases() {
        let id = RatMatrix::identity(3);
        let b = vec![rat(1, 2), rat_int(3), rat(-1, 5)];
        assert_eq!(solve(&id, &b).unwrap(), b);

        let under = RatMatrix::from_i64_rows(&[&[1, 1]]);
        let x = solve(&under, &[rat_int(1)]).unwrap();
        assert_eq!(&x[0] + &x[1], rat_int(1));

        let infeasible = RatMatrix::from_i64_rows(&[&[1], &[1]]);
        assert!(solve(&infeasible, &[rat_int(1), rat_int(2)]).is_none());
    }

    #[test]
    fn pseudo_inverse_of_invertible_is_inverse() {
        let m = RatMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let p = pseudo_inverse(&m);
        assert_eq!(m.mul(&p), RatMatrix::identity(2));
    }

    #[test]
    fn pseudo_inverse_of_zero() {
        let p = pseudo_inverse(&RatMatrix::zeros(2, 3));
        assert_eq!(p, RatMatrix::zeros(3, 2));
    }

    fn penrose_identities_hold(m: &RatMatrix) -> bool {
        let p = pseudo_inverse(m);
        let mp = m.mul(&p);
        let pm = p.mul(m);
        mp.mul(m) == *m && pm.mul(&p) == p && mp.transpose() == mp && pm.transpose() == pm
    }

    #[test]
    fn pseudo_inverse_rank_one() {
        // u v^T for u = (1, 1/2, -3), v = (2, 5)
        let u = vec![rat_int(1), rat(1, 2), rat_int(-3)];
        let v = vec![rat_int(2), rat_int(5)];
        let m = RatMatrix::outer(&u, &v);
        assert_eq!(rank(&m), 1);
        assert!(penrose_identities_hold(&m));
    }

    #[test]
    fn primitive_integer_form_examples() {
        let v = vec![rat(1, 2), rat(-1, 3), rat_int(0)];
        assert_eq!(
            primitive_integer_form(&v),
            vec![rat_int(3), rat_int(-2), rat_int(0)]
        );
        let z = vec![rat_int(0), rat_int(0)];
        assert_eq!(primitive_integer_form(&z), z);
        let w = vec![rat_int(4), rat_int(-6)];
        assert_eq!(primitive_integer_form(&w), vec![rat_int(2), rat_int(-3)]);
    }

    #[test]
    fn in_span_examples() {
        let rows = vec![
            vec![rat_int(1), rat_int(0), rat_int(1)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
        ];
        assert!(in_span(&rows, &[rat_int(2), rat_int(3), rat_int(5)]));
        assert!(!in_span(&rows, &[rat_int(0), rat_int(0), rat_int(1)]));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_matrix(max_dim: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            proptest::collection::vec(arb_rational(), r * c)
                .prop_map(move |entries| RatMatrix::from_entries(r, c, entries))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn constructed_rationals_are_canonical(n in -1000i64..1000, d in 1i64..1000) {
            let r = rat(n, d);
            prop_assert!(r.denom() > &BigInt::zero());
            prop_assert!(num_integer::gcd(r.numer().abs(), r.denom().clone()).is_one()
                || r.numer().is_zero() && r.denom().is_one());
        }

        #[test]
        fn rank_plus_nullity_is_cols(m in arb_matrix(5)) {
            prop_assert_eq!(rank(&m) + kernel_basis(&m).len(), m.cols());
        }

        #[test]
        fn rank_matches_minor_oracle(m in arb_matrix(3)) {
            prop_assert_eq!(rank(&m), rank_by_minors(&m));
        }

        #[test]
        fn penrose_identities(m in arb_matrix(4)) {
            prop_assert!(penrose_identities_hold(&m));
        }

        #[test]
        fn solve_agrees_with_rank_criterion(m in arb_matrix(4), bs in proptest::collection::vec(arb_rational(), 1..=4)) {
            let b: Vec<_> = (0..m.rows()).map(|i| bs.get(i).cloned().unwrap_or_else(Rational::zero)).collect();
            let aug = {
                let mut rows: Vec<RatVector> = m.iter_rows().map(|r| r.to_vec()).collect();
                for (row, val) in rows.iter_mut().zip(&b) {
                    row.push(val.clone());
                }
                RatMatrix::from_rows(rows)
            };
            let solvable = rank(&aug) == rank(&m);
            match solve(&m, &b) {
                Some(x) => {
                    prop_assert!(solvable);
                    prop_assert_eq!(m.mul_vec(&x), b);
                }
                None => prop_assert!(!solvable),
            }
        }

        #[test]
        fn kernel_vectors_are_annihilated(m in arb_matrix(5)) {
            for v in kernel_basis(&m) {
                prop_assert!(m.mul_vec(&v).iter().all(Rational::is_zero));
            }
        }
    }
}
