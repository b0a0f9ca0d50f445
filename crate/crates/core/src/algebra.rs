//! Exact integer and rational linear algebra.
//!
//! Everything here works on arbitrary-precision integers; there is no floating
//! point anywhere in this module.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of big integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        IntMatrix { rows, cols, data: values.iter().map(|&v| BigInt::from(v)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn mul_rational_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = BigRational::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += BigRational::from_integer(a.clone()) * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        out
    }

    /// Sub-matrix made of the given rows (in order).
    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                out[(i, c)] = self[(r, c)].clone();
            }
        }
        out
    }

    /// Sub-matrix made of the given columns (in order).
    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c];
            if !v.is_zero() {
                let add = v * k;
                self.data[dst * self.cols + c] += add;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src];
            if !v.is_zero() {
                let add = v * k;
                self.data[r * self.cols + dst] += add;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = -v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries of `S` (length `min(rows, cols)`), zeros included.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Invariant factors strictly greater than one.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect()
    }
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let mut s = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    reduce_to_diagonal(&mut s, Some(&mut u), Some(&mut v));
    fix_divisibility(&mut s, Some(&mut u), Some(&mut v));
    SmithDecomposition { u, s, v }
}

/// Invariant factors (diagonal of the Smith form) without tracking transforms.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    let mut s = a.clone();
    reduce_to_diagonal(&mut s, None, None);
    fix_divisibility(&mut s, None, None);
    (0..s.rows.min(s.cols)).map(|i| s[(i, i)].clone()).collect()
}

fn reduce_to_diagonal(s: &mut IntMatrix, mut u: Option<&mut IntMatrix>, mut v: Option<&mut IntMatrix>) {
    let (m, n) = (s.rows, s.cols);
    for t in 0..m.min(n) {
        // Pivot: smallest nonzero absolute value in the trailing block.
        let Some((pr, pc)) = min_abs_entry(s, t) else { break };
        s.swap_rows(t, pr);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(t, pr);
        }
        s.swap_cols(t, pc);
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(t, pc);
        }
        loop {
            let mut done = true;
            // Clear column t below the pivot.
            for r in t + 1..m {
                if s[(r, t)].is_zero() {
                    continue;
                }
                let q = floor_div(&s[(r, t)], &s[(t, t)]);
                let k = -q;
                s.add_row_multiple(r, t, &k);
                if let Some(u) = u.as_deref_mut() {
                    u.add_row_multiple(r, t, &k);
                }
                if !s[(r, t)].is_zero() {
                    done = false;
                }
            }
            // Clear row t right of the pivot.
            for c in t + 1..n {
                if s[(t, c)].is_zero() {
                    continue;
                }
                let q = floor_div(&s[(t, c)], &s[(t, t)]);
                let k = -q;
                s.add_col_multiple(c, t, &k);
                if let Some(v) = v.as_deref_mut() {
                    v.add_col_multiple(c, t, &k);
                }
                if !s[(t, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
            // Remainders left behind are smaller than the pivot; move the
            // smallest of them into pivot position and repeat.
            let mut best: Option<(usize, usize)> = None;
            for r in t + 1..m {
                if !s[(r, t)].is_zero() && best.is_none_or(|(br, bc)| s[(r, t)].abs() < s[(br, bc)].abs()) {
                    best = Some((r, t));
                }
            }
            for c in t + 1..n {
                if !s[(t, c)].is_zero() && best.is_none_or(|(br, bc)| s[(t, c)].abs() < s[(br, bc)].abs()) {
                    best = Some((t, c));
                }
            }
            if let Some((br, bc)) = best {
                if bc == t {
                    s.swap_rows(t, br);
                    if let Some(u) = u.as_deref_mut() {
                        u.swap_rows(t, br);
                    }
                } else {
                    s.swap_cols(t, bc);
                    if let Some(v) = v.as_deref_mut() {
                        v.swap_cols(t, bc);
                    }
                }
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(t);
            }
        }
    }
}

/// Enforce d_1 | d_2 | ... on an already diagonal matrix.
fn fix_divisibility(s: &mut IntMatrix, mut u: Option<&mut IntMatrix>, mut v: Option<&mut IntMatrix>) {
    let k = s.rows.min(s.cols);
    // Zeros go last.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| s[(i, i)].is_zero());
    if order.iter().enumerate().any(|(i, &j)| i != j) {
        // Apply the permutation with swaps on both sides.
        let mut pos: Vec<usize> = (0..k).collect();
        for target in 0..k {
            let src = pos.iter().position(|&p| p == order[target]).unwrap();
            if src != target {
                s.swap_rows(target, src);
                s.swap_cols(target, src);
                if let Some(u) = u.as_deref_mut() {
                    u.swap_rows(target, src);
                }
                if let Some(v) = v.as_deref_mut() {
                    v.swap_cols(target, src);
                }
                pos.swap(target, src);
            }
        }
    }
    let r = (0..k).filter(|&i| !s[(i, i)].is_zero()).count();
    for i in 0..r {
        for j in i + 1..r {
            let a = s[(i, i)].clone();
            let b = s[(j, j)].clone();
            if b.is_multiple_of(&a) {
                continue;
            }
            // diag(a, b) -> diag(g, l) with g = gcd, l = lcm.
            let ext = a.extended_gcd(&b);
            let (g, x, y) = (ext.gcd, ext.x, ext.y);
            let a_g = &a / &g;
            let b_g = &b / &g;
            // Row/column operations realising the 2x2 reduction:
            // add row j to row i, then combine columns.
            s.add_row_multiple(i, j, &BigInt::one());
            if let Some(u) = u.as_deref_mut() {
                u.add_row_multiple(i, j, &BigInt::one());
            }
            // Now rows i: [a, b]; row j: [0, b]. Column transform
            // [[x, -b/g], [y, a/g]] has determinant 1.
            col_transform(s, i, j, &x, &-&b_g, &y, &a_g);
            if let Some(v) = v.as_deref_mut() {
                col_transform(v, i, j, &x, &-&b_g, &y, &a_g);
            }
            // Row i is now [g, 0]; row j is [b*y, b*a/g]. Clear (j, i).
            let q = &s[(j, i)] / &g;
            s.add_row_multiple(j, i, &-&q);
            if let Some(u) = u.as_deref_mut() {
                u.add_row_multiple(j, i, &-&q);
            }
            if s[(j, j)].is_negative() {
                s.negate_row(j);
                if let Some(u) = u.as_deref_mut() {
                    u.negate_row(j);
                }
            }
            debug_assert!(s[(i, j)].is_zero() && s[(j, i)].is_zero());
        }
    }
}

/// Replace columns (i, j) by (x*ci + y*cj, p*ci + q*cj).
fn col_transform(m: &mut IntMatrix, i: usize, j: usize, x: &BigInt, p: &BigInt, y: &BigInt, q: &BigInt) {
    for r in 0..m.rows {
        let ci = m[(r, i)].clone();
        let cj = m[(r, j)].clone();
        m[(r, i)] = x * &ci + y * &cj;
        m[(r, j)] = p * &ci + q * &cj;
    }
}

fn min_abs_entry(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in t..s.rows {
        for c in t..s.cols {
            let e = &s[(r, c)];
            if e.is_zero() {
                continue;
            }
            if best.is_none_or(|(br, bc)| e.abs() < s[(br, bc)].abs()) {
                best = Some((r, c));
                if e.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Rounded quotient so that |a - q*b| <= |b|/2.
fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = a.div_mod_floor(b);
    // The floor remainder has the sign of `b`, so stepping `q` up always
    // brings it closer to zero.
    if (&r * &two).abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(a: &IntMatrix) -> BigInt {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[(r, k)].is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = v / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    sign * m[(n - 1, n - 1)].clone()
}

/// The unique rational `x` with `A x = b`.
pub fn solve_exact(a: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigRational>> {
    let rhs: Vec<Vec<BigRational>> = b.iter().map(|v| vec![BigRational::from_integer(v.clone())]).collect();
    let sol = solve_many(a, rhs)?;
    Ok(sol.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Solve `A X = B` for a block of right-hand sides. `rhs[i]` is row `i` of `B`.
pub fn solve_many(a: &IntMatrix, rhs: Vec<Vec<BigRational>>) -> Result<Vec<Vec<BigRational>>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("solve needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    if rhs.len() != n {
        return Err(Error::Dimension(format!("right-hand side has {} rows, expected {n}", rhs.len())));
    }
    let k = rhs.first().map_or(0, |r| r.len());
    // Fraction-free forward elimination on the augmented integer system,
    // with right-hand sides scaled to a common denominator first.
    let mut denom = BigInt::one();
    for row in &rhs {
        for v in row {
            denom = denom.lcm(v.denom());
        }
    }
    let mut m = IntMatrix::zeros(n, n + k);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = a[(r, c)].clone();
        }
        for (c, v) in rhs[r].iter().enumerate() {
            m[(r, n + c)] = v.numer() * (&denom / v.denom());
        }
    }
    let mut prev = BigInt::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
            return Err(Error::Singular);
        };
        m.swap_rows(col, p);
        for i in col + 1..n {
            for j in col + 1..n + k {
                let v = &m[(i, j)] * &m[(col, col)] - &m[(i, col)] * &m[(col, j)];
                m[(i, j)] = v / &prev;
            }
            m[(i, col)] = BigInt::zero();
        }
        prev = m[(col, col)].clone();
    }
    // Back substitution in rationals.
    let mut x = vec![vec![BigRational::zero(); k]; n];
    for c in 0..k {
        for r in (0..n).rev() {
            let mut acc = BigRational::from_integer(m[(r, n + c)].clone());
            for j in r + 1..n {
                if !m[(r, j)].is_zero() {
                    acc -= BigRational::from_integer(m[(r, j)].clone()) * &x[j][c];
                }
            }
            x[r][c] = acc / BigRational::from_integer(m[(r, r)].clone());
        }
    }
    let d = BigRational::from_integer(denom);
    for row in x.iter_mut() {
        for v in row.iter_mut() {
            *v = &*v / &d;
        }
    }
    Ok(x)
}

/// Exact inverse as a rational matrix, row-major (`inv[r][c]`).
pub fn inverse(a: &IntMatrix) -> Result<Vec<Vec<BigRational>>> {
    let n = a.rows;
    let rhs = (0..n)
        .map(|r| (0..n).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    solve_many(a, rhs)
}

/// Some integer `y` with `A y = b`, or `None` if `b` is not in `A Z^n`.
///
/// Free coordinates of the Smith parameterisation are set to zero, so the
/// answer is a deterministic function of `(A, b)`.
pub fn lattice_solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "rhs length mismatch");
    let snf = smith_normal_form(a);
    lattice_solve_with(&snf, b)
}

/// Same as [`lattice_solve`] but reusing a precomputed decomposition of `A`.
pub fn lattice_solve_with(snf: &SmithDecomposition, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let mut w = vec![BigInt::zero(); snf.v.rows];
    for (i, ci) in c.iter().enumerate() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !ci.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ci.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            w[i] = q;
        }
    }
    Some(snf.v.mul_vec(&w))
}

/// Order of the finite cokernel `Z^rows / A Z^cols`, or `None` if it is infinite.
pub fn cokernel_order(a: &IntMatrix) -> Option<BigInt> {
    let f = invariant_factors(a);
    if f.len() < a.rows || f.iter().any(|d| d.is_zero()) {
        return None;
    }
    Some(f.iter().product())
}

/// Order of the subgroup of `coker(A)` generated by the columns of `gens`,
/// for square nonsingular `A`.
///
/// The generators are mapped through the Smith form of `A` into
/// `⊕ Z/d_k`, so only a small matrix over the nontrivial factors is
/// reduced, which avoids coefficient growth in the stacked `[A | gens]`.
pub fn subgroup_order_in_cokernel(a: &IntMatrix, gens: &IntMatrix) -> Result<BigInt> {
    if !a.is_square() || a.rows != gens.rows {
        return Err(Error::Dimension(format!("{}x{} with {} generator rows", a.rows, a.cols, gens.rows)));
    }
    let snf = smith_normal_form(a);
    let d: Vec<BigInt> = snf.diagonal().into_iter().map(|x| x.abs()).collect();
    if d.iter().any(|x| x.is_zero()) {
        return Err(Error::Singular);
    }
    let keep: Vec<usize> = (0..d.len()).filter(|&k| !d[k].is_one()).collect();
    if keep.is_empty() || gens.cols == 0 {
        return Ok(BigInt::one());
    }
    let images = snf.u.select_rows(&keep).mul(gens);
    let k = keep.len();
    let mut m = IntMatrix::zeros(k, k + gens.cols);
    for (r, &kk) in keep.iter().enumerate() {
        m[(r, r)] = d[kk].clone();
        for c in 0..gens.cols {
            m[(r, k + c)] = images[(r, c)].mod_floor(&d[kk]);
        }
    }
    let total: BigInt = keep.iter().map(|&kk| d[kk].clone()).product();
    let coker: BigInt = invariant_factors(&m).iter().map(|x| x.abs()).product();
    Ok(total / coker)
}

/// Rank over the rationals.
pub fn rank(a: &IntMatrix) -> usize {
    let mut m = a.clone();
    let mut r = 0;
    let mut prev = BigInt::one();
    for col in 0..m.cols {
        let Some(p) = (r..m.rows).find(|&i| !m[(i, col)].is_zero()) else { continue };
        m.swap_rows(r, p);
        for i in r + 1..m.rows {
            for j in col + 1..m.cols {
                let v = &m[(i, j)] * &m[(r, col)] - &m[(i, col)] * &m[(r, j)];
                m[(i, j)] = v / &prev;
            }
            m[(i, col)] = BigInt::zero();
        }
        prev = m[(r, col)].clone();
        r += 1;
        if r == m.rows {
            break;
        }
    }
    r
}

/// Trial-division factorisation; `None` if a cofactor above `limit^2` remains unfactored.
pub fn factorize(n: &BigInt, limit: u64) -> Option<Vec<(BigInt, u32)>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return None;
    }
    let mut p = BigInt::from(2u32);
    let mut steps = 0u64;
    while &p * &p <= n {
        if steps > limit {
            return None;
        }
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1 } else { 2 };
        steps += 1;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    Some(out)
}

pub fn format_factorization(f: &[(BigInt, u32)]) -> String {
    if f.is_empty() {
        return "1".to_string();
    }
    f.iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect::<Vec<_>>()
        .join("·")
}

/// Floor of a rational as a big integer.
pub fn floor_rational(q: &BigRational) -> BigInt {
    q.numer().div_floor(q.denom())
}

/// Representative of `q mod 1` in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    q - BigRational::from_integer(floor_rational(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn check_snf(a: &IntMatrix) {
        let d = smith_normal_form(a);
        assert_eq!(d.u.mul(a).mul(&d.v), d.s);
        assert!(det_exact(&d.u).abs().is_one());
        assert!(det_exact(&d.v).abs().is_one());
        let diag = d.diagonal();
        for r in 0..d.s.rows() {
            for c in 0..d.s.cols() {
                if r != c {
                    assert!(d.s[(r, c)].is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(!w[0].is_zero() && w[1].is_multiple_of(&w[0]), "{diag:?}");
            }
        }
        assert!(diag.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn snf_diag_2_3() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let d = smith_normal_form(&a);
        assert_eq!(d.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        check_snf(&a);
    }

    #[test]
    fn snf_identity_and_scalar() {
        let d = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(d.s, IntMatrix::identity(3));
        let d = smith_normal_form(&m(&[&[-4]]));
        assert_eq!(d.diagonal(), vec![BigInt::from(4)]);
    }

    #[test]
    fn snf_rectangular_and_singular() {
        check_snf(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        check_snf(&m(&[&[1, 2], &[2, 4], &[3, 6]]));
        check_snf(&m(&[&[0, 0], &[0, 0]]));
        check_snf(&m(&[&[6, 10, 15]]));
    }

    #[test]
    fn det_small() {
        assert_eq!(det_exact(&m(&[&[-4]])), BigInt::from(-4));
        assert_eq!(det_exact(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det_exact(&m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn solve_scalar() {
        let x = solve_exact(&m(&[&[-4]]), &[BigInt::from(1)]).unwrap();
        assert_eq!(x, vec![BigRational::new((-1).into(), 4.into())]);
        let x = solve_exact(&m(&[&[2, 1], &[1, 3]]), &[BigInt::zero(), BigInt::zero()]).unwrap();
        assert!(x.iter().all(|v| v.is_zero()));
        assert!(matches!(solve_exact(&m(&[&[1, 2], &[2, 4]]), &[1.into(), 1.into()]), Err(Error::Singular)));
    }

    #[test]
    fn lattice_cases() {
        assert!(lattice_solve(&m(&[&[2]]), &[BigInt::from(3)]).is_none());
        let a = m(&[&[2, 3]]);
        let y = lattice_solve(&a, &[BigInt::from(1)]).unwrap();
        assert_eq!(a.mul_vec(&y), vec![BigInt::from(1)]);
    }

    #[test]
    fn factorize_known_orders() {
        let f = factorize(&BigInt::from(100352u64), 1_000_000).unwrap();
        assert_eq!(format_factorization(&f), "2^11·7^2");
    }

    #[test]
    fn floor_and_frac() {
        let q = BigRational::new((-7).into(), 4.into());
        assert_eq!(floor_rational(&q), BigInt::from(-2));
        assert_eq!(frac(&q), BigRational::new(1.into(), 4.into()));
    }
}
