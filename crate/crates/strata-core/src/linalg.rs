//! Internal exact linear algebra over ℚ(i): dense matrices, reduced row
//! echelon form, kernels, minimal polynomials, and root extraction of monic
//! polynomials over ℚ(i) (linear factors located through Gaussian-integer
//! divisor search, quadratics through exact square roots).

use num_bigint::BigInt;
use num_integer::Integer;
use num::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::GaussianRational;

type Gq = GaussianRational;

/// Dense matrix over ℚ(i), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QiMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Gq>,
}

impl QiMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Gq::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for k in 0..n {
            *m.at_mut(k, k) = Gq::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Gq>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                *m.at_mut(i, j) = v;
            }
        }
        m
    }

    pub fn from_columns(cols: Vec<Vec<Gq>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zero(r, c);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.into_iter().enumerate() {
                *m.at_mut(i, j) = v;
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

    pub fn at(&self, r: usize, c: usize) -> &Gq {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Gq {
        &mut self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<Gq> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Gq>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    *out.at_mut(i, j) = &cur + &(a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Gq]) -> Vec<Gq> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Gq::zero();
                for j in 0..self.cols {
                    let a = self.at(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc = &acc + &(a * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = &*a - b;
        }
        out
    }

    pub fn scale(&self, c: &Gq) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = &*a * c;
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self.at(row, j).clone();
                *self.at_mut(row, j) = self.at(p, j).clone();
                *self.at_mut(p, j) = tmp;
            }
            let inv = self.at(row, col).inv().expect("pivot nonzero");
            for j in 0..self.cols {
                let v = self.at(row, j) * &inv;
                *self.at_mut(row, j) = v;
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    for j in 0..self.cols {
                        let v = &(self.at(r, j) - &(&factor * self.at(row, j)));
                        *self.at_mut(r, j) = v.clone();
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel {v : M·v = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<Gq>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Gq::zero(); self.cols];
            v[f] = Gq::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.at(r, f);
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of M·x = b, if consistent.
    pub fn solve(&self, b: &[Gq]) -> Option<Vec<Gq>> {
        assert_eq!(self.rows, b.len());
        let mut aug = QiMatrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = b[r].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Gq::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }
}

/// Row-reduces a spanning set to an RREF basis (deterministic).
pub(crate) fn span_basis(vectors: &[Vec<Gq>]) -> Vec<Vec<Gq>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = QiMatrix::from_rows(vectors.to_vec());
    let pivots = m.rref();
    (0..pivots.len()).map(|r| (0..m.cols).map(|c| m.at(r, c).clone()).collect()).collect()
}

/// Basis of the joint kernel ∩ ker(opᵢ), all operators d×d on the same space.
pub(crate) fn joint_kernel(dim: usize, ops: &[QiMatrix]) -> Vec<Vec<Gq>> {
    // Iteratively restrict: keep a column basis K of the running intersection
    // and intersect with each kernel in the coordinates of K.
    let mut k = QiMatrix::identity(dim);
    for op in ops {
        if k.cols == 0 {
            break;
        }
        let restricted = op.mul(&k);
        let inner = restricted.kernel_basis();
        if inner.len() == k.cols {
            continue;
        }
        k = if inner.is_empty() {
            QiMatrix::zero(dim, 0)
        } else {
            k.mul(&QiMatrix::from_columns(inner))
        };
    }
    k.columns()
}

/// Monic minimal polynomial of a square operator, coefficients low→high
/// (last = 1). Computed from the first linear dependence among its powers.
pub(crate) fn operator_min_poly(op: &QiMatrix) -> Vec<Gq> {
    let n = op.rows;
    assert_eq!(op.rows, op.cols);
    if n == 0 {
        return vec![Gq::one()]; // minimal polynomial of the empty operator: 1
    }
    let flat = |m: &QiMatrix| -> Vec<Gq> {
        (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| m.at(r, c).clone()).collect()
    };
    let mut powers = vec![QiMatrix::identity(n)];
    loop {
        // Look for c_0 I + c_1 M + … + M^k = 0.
        let k = powers.len();
        let last = powers.last().unwrap().mul(op);
        let mut rows: Vec<Vec<Gq>> = powers.iter().map(flat).collect();
        rows.push(flat(&last));
        // Solve Σ cᵢ·power_i = -last over the first k powers.
        let mat = QiMatrix::from_columns(rows[..k].to_vec());
        let target: Vec<Gq> = rows[k].iter().map(|c| -c).collect();
        if let Some(sol) = mat.solve(&target) {
            let mut coeffs = sol;
            coeffs.push(Gq::one());
            return coeffs;
        }
        powers.push(last);
        assert!(powers.len() <= n + 1, "minimal polynomial search exceeded dimension");
    }
}

/// Evaluates a coefficient vector (low→high) at x.
pub(crate) fn poly_eval(coeffs: &[Gq], x: &Gq) -> Gq {
    let mut acc = Gq::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Divides a monic polynomial by (x − r); `r` must be a root.
pub(crate) fn deflate(coeffs: &[Gq], r: &Gq) -> Vec<Gq> {
    let d = coeffs.len() - 1;
    let mut q = vec![Gq::zero(); d];
    let mut carry = Gq::zero();
    for k in (0..d).rev() {
        carry = &coeffs[k + 1] + &(r * &carry);
        q[k] = carry.clone();
    }
    debug_assert!(poly_eval(coeffs, r).is_zero(), "deflation by a non-root");
    q
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
fn sqrt_rational(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().sqrt();
    let den = r.denom().sqrt();
    if &(&num * &num) == r.numer() && &(&den * &den) == r.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

/// Exact square root in ℚ(i), if one exists.
pub(crate) fn sqrt_gq(z: &Gq) -> Option<Gq> {
    if z.is_zero() {
        return Some(Gq::zero());
    }
    let a = z.re().clone();
    let b = z.im().clone();
    if b.is_zero() {
        if let Some(x) = sqrt_rational(&a) {
            return Some(Gq::new(x, BigRational::zero()));
        }
        if let Some(y) = sqrt_rational(&-&a) {
            return Some(Gq::new(BigRational::zero(), y));
        }
        return None;
    }
    // (x + yi)² = a + bi with n = |z| rational: x² = (a+n)/2, y = b/(2x).
    let n = sqrt_rational(&(&a * &a + &b * &b))?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let x2 = (&a + &n) * &half;
    let x = sqrt_rational(&x2)?;
    if x.is_zero() {
        return None;
    }
    let y = &b * &half / &x;
    let cand = Gq::new(x, y);
    if &(&cand * &cand) == z {
        Some(cand)
    } else {
        None
    }
}

// --- Gaussian integers ------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GInt(BigInt, BigInt);

impl GInt {
    fn norm(&self) -> BigInt {
        &self.0 * &self.0 + &self.1 * &self.1
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }

    fn mul(&self, o: &GInt) -> GInt {
        GInt(&self.0 * &o.0 - &self.1 * &o.1, &self.0 * &o.1 + &self.1 * &o.0)
    }

    fn conj(&self) -> GInt {
        GInt(self.0.clone(), -self.1.clone())
    }

    /// Rounded division (Gaussian-integer Euclidean step).
    fn div_round(&self, o: &GInt) -> GInt {
        let n = o.norm();
        let num = self.mul(&o.conj());
        let round = |x: BigInt| -> BigInt {
            // nearest integer to x / n (n > 0)
            let two_x = BigInt::from(2) * x;
            let (q, r) = two_x.div_mod_floor(&(BigInt::from(2) * &n));
            if r > n.clone() {
                q + 1
            } else {
                q
            }
        };
        GInt(round(num.0), round(num.1))
    }

    fn sub(&self, o: &GInt) -> GInt {
        GInt(&self.0 - &o.0, &self.1 - &o.1)
    }

    fn rem(&self, o: &GInt) -> GInt {
        self.sub(&o.mul(&self.div_round(o)))
    }

    fn gcd(a: &GInt, b: &GInt) -> GInt {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        x
    }

    fn divides(&self, z: &GInt) -> bool {
        !self.is_zero() && z.rem(self).is_zero()
    }

    fn exact_div(&self, o: &GInt) -> GInt {
        let q = self.div_round(o);
        debug_assert!(self.sub(&o.mul(&q)).is_zero());
        q
    }
}

/// Trial-division factorization of n > 0 within a work bound.
fn factor_u128(mut n: u128) -> Option<Vec<(u128, u32)>> {
    let mut out = Vec::new();
    let mut push = |p: u128, k: u32| {
        if k > 0 {
            out.push((p, k));
        }
    };
    let mut k = 0;
    while n % 2 == 0 {
        n /= 2;
        k += 1;
    }
    push(2, k);
    let mut p: u128 = 3;
    while p.checked_mul(p).is_some_and(|sq| sq <= n) {
        if p > 50_000_000 {
            return None; // give up: factor search bound exceeded
        }
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        push(p, k);
        p += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    Some(out)
}

/// Finds a square root of −1 modulo a prime p ≡ 1 (mod 4).
fn sqrt_minus_one_mod(p: u128) -> u128 {
    let pow_mod = |mut b: u128, mut e: u128, m: u128| -> u128 {
        let mut acc: u128 = 1;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(b).expect("modpow overflow") % m;
            }
            b = b.checked_mul(b).expect("modpow overflow") % m;
            e >>= 1;
        }
        acc
    };
    for a in 2.. {
        let x = pow_mod(a, (p - 1) / 4, p);
        if x.checked_mul(x).expect("overflow") % p == p - 1 {
            return x;
        }
    }
    unreachable!()
}

/// Gaussian prime factorization (up to units); `None` if out of bounds.
fn gaussian_factor(z: &GInt) -> Option<Vec<(GInt, u32)>> {
    let n = z.norm();
    let n128 = n.to_u128()?;
    if n128 == 0 {
        return None;
    }
    let rational_factors = factor_u128(n128)?;
    let mut rest = z.clone();
    let mut out: Vec<(GInt, u32)> = Vec::new();
    let mut take = |rest: &mut GInt, pi: GInt| {
        let mut k = 0;
        while pi.divides(rest) {
            *rest = rest.exact_div(&pi);
            k += 1;
        }
        if k > 0 {
            out.push((pi, k));
        }
    };
    for (p, _) in rational_factors {
        let pb = BigInt::from(p);
        if p == 2 {
            take(&mut rest, GInt(BigInt::one(), BigInt::one()));
        } else if p % 4 == 3 {
            take(&mut rest, GInt(pb, BigInt::zero()));
        } else {
            let x = sqrt_minus_one_mod(p);
            let pi = GInt::gcd(&GInt(pb.clone(), BigInt::zero()), &GInt(BigInt::from(x), BigInt::one()));
            take(&mut rest, pi.clone());
            take(&mut rest, pi.conj());
        }
    }
    debug_assert!(rest.norm().is_one(), "unit remainder expected");
    Some(out)
}

/// All divisors of z up to units (includes 1, excludes unit multiples).
fn gaussian_divisors(z: &GInt) -> Option<Vec<GInt>> {
    let factors = gaussian_factor(z)?;
    let count: u64 = factors.iter().map(|(_, k)| *k as u64 + 1).product();
    if count > 100_000 {
        return None;
    }
    let mut divs = vec![GInt(BigInt::one(), BigInt::zero())];
    for (p, k) in factors {
        let mut next = Vec::with_capacity(divs.len() * (k as usize + 1));
        for d in &divs {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..k {
                cur = cur.mul(&p);
                next.push(cur.clone());
            }
        }
        divs = next;
    }
    Some(divs)
}

const UNITS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Splits a monic polynomial over ℚ(i) into linear factors as far as possible.
///
/// Returns the list of roots (with multiplicity) and, if the polynomial does
/// not split completely, the remaining monic factor with no roots in ℚ(i).
/// `Err` reports a factorization work-bound overflow — the answer is then
/// unknown, not "does not split".
pub(crate) fn qi_roots(poly: &[Gq]) -> Result<(Vec<Gq>, Option<Vec<Gq>>), String> {
    assert!(poly.last().is_some_and(|c| c.is_one()), "monic polynomial expected");
    let mut cur: Vec<Gq> = poly.to_vec();
    let mut roots = Vec::new();
    'outer: while cur.len() > 1 {
        let deg = cur.len() - 1;
        if cur[0].is_zero() {
            roots.push(Gq::zero());
            cur = deflate(&cur, &Gq::zero());
            continue;
        }
        if deg == 1 {
            roots.push(-&cur[0]);
            cur = vec![Gq::one()];
            continue;
        }
        if deg == 2 {
            // x² + bx + c: roots (−b ± √(b²−4c))/2.
            let b = cur[1].clone();
            let c = cur[0].clone();
            let disc = &(&b * &b) - &(&Gq::from_int(4) * &c);
            match sqrt_gq(&disc) {
                Some(s) => {
                    let half = Gq::from_ratio(1, 2);
                    let r1 = &(&-&b + &s) * &half;
                    let r2 = &(&-&b - &s) * &half;
                    roots.push(r1.clone());
                    cur = deflate(&cur, &r1);
                    debug_assert!(poly_eval(&cur, &r2).is_zero());
                }
                None => return Ok((roots, Some(cur))),
            }
            continue;
        }
        // General degree: clear denominators and search divisor quotients.
        let mut denom_lcm = BigInt::one();
        for c in &cur {
            denom_lcm = denom_lcm.lcm(c.re().denom());
            denom_lcm = denom_lcm.lcm(c.im().denom());
        }
        let scaled: Vec<GInt> = cur
            .iter()
            .map(|c| {
                let re = c.re() * BigRational::from_integer(denom_lcm.clone());
                let im = c.im() * BigRational::from_integer(denom_lcm.clone());
                GInt(re.to_integer(), im.to_integer())
            })
            .collect();
        let a0 = scaled[0].clone();
        let ad = scaled.last().unwrap().clone();
        let (Some(num_divs), Some(den_divs)) = (gaussian_divisors(&a0), gaussian_divisors(&ad))
        else {
            return Err(format!(
                "factor search bound exceeded for a degree-{deg} factor with constant term of norm {}",
                a0.norm()
            ));
        };
        if num_divs.len().saturating_mul(den_divs.len()) > 400_000 {
            return Err(format!("too many root candidates for a degree-{deg} factor"));
        }
        for num in &num_divs {
            for den in &den_divs {
                for (ur, ui) in UNITS {
                    let n = num.mul(&GInt(BigInt::from(ur), BigInt::from(ui)));
                    let cand = Gq::new(
                        BigRational::new(n.0.clone(), BigInt::one()),
                        BigRational::new(n.1.clone(), BigInt::one()),
                    );
                    let d = Gq::new(
                        BigRational::new(den.0.clone(), BigInt::one()),
                        BigRational::new(den.1.clone(), BigInt::one()),
                    );
                    let r = cand.div(&d).expect("nonzero divisor");
                    if poly_eval(&cur, &r).is_zero() {
                        roots.push(r.clone());
                        cur = deflate(&cur, &r);
                        continue 'outer;
                    }
                }
            }
        }
        return Ok((roots, Some(cur)));
    }
    Ok((roots, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gq(s: &str) -> Gq {
        s.parse().unwrap()
    }

    #[track_caller]
    fn assert_roots(poly: &[&str], expect: &[&str]) {
        let coeffs: Vec<Gq> = poly.iter().map(|s| gq(s)).collect();
        let (mut roots, rest) = qi_roots(&coeffs).unwrap();
        assert!(rest.is_none(), "expected full split, remainder {rest:?}");
        let mut want: Vec<Gq> = expect.iter().map(|s| gq(s)).collect();
        roots.sort();
        want.sort();
        assert_eq!(roots, want);
    }

    #[test]
    fn rref_and_kernel() {
        let m = QiMatrix::from_rows(vec![
            vec![gq("1"), gq("2"), gq("3")],
            vec![gq("2"), gq("4"), gq("6")],
        ]);
        assert_eq!(m.rank(), 1);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = QiMatrix::from_rows(vec![vec![gq("1"), gq("1")], vec![gq("0"), gq("1")]]);
        let x = m.solve(&[gq("3"), gq("1")]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![gq("3"), gq("1")]);
        let sing = QiMatrix::from_rows(vec![vec![gq("1"), gq("1")], vec![gq("1"), gq("1")]]);
        assert!(sing.solve(&[gq("0"), gq("1")]).is_none());
    }

    #[test]
    fn min_poly_of_diagonal() {
        // diag(2, 2, i) has minimal polynomial (x-2)(x-i).
        let mut m = QiMatrix::zero(3, 3);
        *m.at_mut(0, 0) = gq("2");
        *m.at_mut(1, 1) = gq("2");
        *m.at_mut(2, 2) = gq("i");
        let p = operator_min_poly(&m);
        assert_eq!(p.len(), 3);
        assert!(poly_eval(&p, &gq("2")).is_zero());
        assert!(poly_eval(&p, &gq("i")).is_zero());
    }

    #[test]
    fn sqrt_in_qi() {
        assert_eq!(sqrt_gq(&gq("-1")), Some(gq("i")));
        let s = sqrt_gq(&gq("2*i")).unwrap();
        assert_eq!(&s * &s, gq("2*i"));
        assert_eq!(sqrt_gq(&gq("2")), None); // √2 ∉ ℚ(i)
        assert_eq!(sqrt_gq(&gq("9/4")), Some(gq("3/2")));
    }

    #[test]
    fn roots_linear_quadratic() {
        assert_roots(&["-2", "1"], &["2"]); // x - 2
        assert_roots(&["1", "0", "1"], &["i", "-i"]); // x² + 1
        assert_roots(&["2", "-3", "1"], &["1", "2"]); // (x-1)(x-2)
        // x² - 2 stays irreducible over ℚ(i).
        let (roots, rest) = qi_roots(&[gq("-2"), gq("0"), gq("1")]).unwrap();
        assert!(roots.is_empty());
        assert_eq!(rest.unwrap().len(), 3);
    }

    #[test]
    fn roots_higher_degree() {
        // (x-1)(x-2)(x-17) = x³ - 20x² + 71x - 34... compute instead via eval checks.
        let poly = {
            let roots = [gq("1"), gq("2"), gq("17")];
            let mut p = vec![Gq::one()];
            for r in &roots {
                // multiply by (x - r)
                let mut next = vec![Gq::zero(); p.len() + 1];
                for (k, c) in p.iter().enumerate() {
                    next[k + 1] = &next[k + 1] + c;
                    next[k] = &next[k] - &(c * r);
                }
                p = next;
            }
            p
        };
        let (mut roots, rest) = qi_roots(&poly).unwrap();
        assert!(rest.is_none());
        roots.sort();
        assert_eq!(roots, vec![gq("1"), gq("2"), gq("17")]);
    }

    #[test]
    fn roots_gaussian() {
        // (x - (1+i))(x - (1-i)) = x² - 2x + 2
        assert_roots(&["2", "-2", "1"], &["1+i", "1-i"]);
        // (x-i)(x-2i)(x-3) — degree 3 forces the divisor search.
        let poly = vec![gq("6"), gq("-2+9*i"), gq("-3-3*i"), gq("1")];
        assert!(poly_eval(&poly, &gq("i")).is_zero(), "fixture sanity");
        let (mut roots, rest) = qi_roots(&poly).unwrap();
        assert!(rest.is_none());
        roots.sort();
        let mut want = vec![gq("i"), gq("2*i"), gq("3")];
        want.sort();
        assert_eq!(roots, want);
    }

    #[test]
    fn joint_kernel_refines() {
        // ker(diag(0,1,0)) ∩ ker(diag(0,0,1)) = span(e₁).
        let mut a = QiMatrix::zero(3, 3);
        *a.at_mut(1, 1) = gq("1");
        let mut b = QiMatrix::zero(3, 3);
        *b.at_mut(2, 2) = gq("1");
        let k = joint_kernel(3, &[a, b]);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![gq("1"), gq("0"), gq("0")]);
    }
}
