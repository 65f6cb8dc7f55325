//! Exact rational linear algebra.
//!
//! Vectors are plain `Vec<Q>`; matrices are dense and row-major. Subspaces are
//! stored by their reduced row echelon basis, which makes equality of
//! subspaces a structural comparison.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Q = BigRational;
pub type QVector = Vec<Q>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("zero vector has no projective point")]
    ZeroVector,
    #[error("flag is not complete: {0}")]
    IncompleteFlag(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> QVector {
    v.iter().map(|&x| qi(x)).collect()
}

pub fn int_to_q(v: &[BigInt]) -> QVector {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

pub fn parse_q(s: &str) -> Result<Q, LinalgError> {
    let s = s.trim();
    let bad = || LinalgError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `p/q` form, or just `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn vec_add(a: &[Q], b: &[Q]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Q], b: &[Q]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Q], c: &Q) -> QVector {
    a.iter().map(|x| x * c).collect()
}

pub fn vec_neg(a: &[Q]) -> QVector {
    a.iter().map(|x| -x).collect()
}

pub fn unit_vector(d: usize, i: usize) -> QVector {
    let mut v = vec![Q::zero(); d];
    v[i] = Q::one();
    v
}

/// Random integral basis of ℚ^d with entries in [−r, r].
pub fn random_basis<R: rand::Rng>(rng: &mut R, d: usize, r: i64) -> Vec<QVector> {
    loop {
        let b: Vec<QVector> = (0..d).map(|_| (0..d).map(|_| qi(rng.gen_range(-r..=r))).collect()).collect();
        if is_independent(&b) {
            return b;
        }
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: &[QVector]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        QMatrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[QVector]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(&rows.iter().map(|r| qvec(r)).collect::<Vec<_>>())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> QVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<QVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_cols(&self) -> Vec<QVector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> QVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Q] {
        &self.data
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_q).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn lcm_of_denominators(v: &[Q]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales a rational vector to an integer vector; returns the vector and the scale.
pub fn clear_denominators(v: &[Q]) -> (Vec<BigInt>, BigInt) {
    let l = lcm_of_denominators(v);
    let ints = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    (ints, l)
}

/// Fraction-free (Bareiss) determinant of an integer matrix, rows given.
pub fn det_int(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact determinant: rows are cleared of denominators, then Bareiss.
pub fn det(m: &QMatrix) -> Q {
    assert!(m.is_square(), "det of non-square matrix");
    let mut scale = BigInt::one();
    let rows: Vec<Vec<BigInt>> = m
        .to_rows()
        .iter()
        .map(|r| {
            let (ints, l) = clear_denominators(r);
            scale *= l;
            ints
        })
        .collect();
    Q::new(det_int(&rows), scale)
}

pub fn det_of_vectors(v: &[QVector]) -> Q {
    det(&QMatrix::from_rows(v))
}

/// Reduced row echelon form of the given rows with `ncols` columns.
/// Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVector], ncols: usize) -> (Vec<QVector>, Vec<usize>) {
    let mut a: Vec<QVector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(rows: &[QVector]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    rref(rows, ncols).1.len()
}

pub fn is_independent(rows: &[QVector]) -> bool {
    rank(rows) == rows.len()
}

/// Basis of { x : rows · x = 0 } in ℚ^ncols.
pub fn nullspace(rows: &[QVector], ncols: usize) -> Vec<QVector> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Some solution x of m·x = b, if one exists.
pub fn solve(m: &QMatrix, b: &[Q]) -> Option<QVector> {
    assert_eq!(m.nrows(), b.len());
    let n = m.ncols();
    let aug: Vec<QVector> = (0..m.nrows())
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

pub fn inverse(m: &QMatrix) -> Result<QMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let n = m.nrows();
    let aug: Vec<QVector> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.extend(unit_vector(n, i));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(LinalgError::Singular);
    }
    Ok(QMatrix::from_rows(&r.iter().map(|row| row[n..].to_vec()).collect::<Vec<_>>()))
}

/// The dual basis v¹..v^d with ⟨v^i, v_j⟩ = δ_ij.
pub fn dual_basis(b: &[QVector]) -> Result<Vec<QVector>, LinalgError> {
    let d = b.len();
    if let Some(v) = b.iter().find(|v| v.len() != d) {
        return Err(LinalgError::DimensionMismatch { expected: d, found: v.len() });
    }
    // Rows of B⁻ᵀ: with B having the v_j as columns, (B⁻¹)_i · v_j = δ_ij.
    let inv = inverse(&QMatrix::from_cols(b))?;
    Ok(inv.to_rows())
}

/// Linear subspace of ℚ^ambient, stored by its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<QVector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[QVector]) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient));
        let (basis, pivots) = rref(vectors, ambient);
        Subspace { ambient, basis, pivots }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient).map(|i| unit_vector(ambient, i)).collect();
        Subspace { ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of v ∈ self in the echelon basis: the entries at the pivots.
    pub fn coords(&self, v: &[Q]) -> QVector {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn from_coords(&self, c: &[Q]) -> QVector {
        let mut v = vec![Q::zero(); self.ambient];
        for (ci, b) in c.iter().zip(&self.basis) {
            if ci.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x += ci * y;
            }
        }
        v
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let c = self.coords(v);
        self.from_coords(&c).as_slice() == v
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Linear functionals cutting out the subspace.
    pub fn annihilator(&self) -> Vec<QVector> {
        nullspace(&self.basis, self.ambient)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == self.ambient {
            return other.clone();
        }
        if other.dim() == other.ambient {
            return self.clone();
        }
        let mut eqs = self.annihilator();
        eqs.extend(other.annihilator());
        Subspace::span(self.ambient, &nullspace(&eqs, self.ambient))
    }
}

/// Complete flag 0 ⊊ 𝓕₁ ⊊ … ⊊ 𝓕_d = V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    spaces: Vec<Subspace>,
}

impl Flag {
    pub fn standard(d: usize) -> Self {
        Self::from_basis(&(0..d).map(|i| unit_vector(d, i)).collect::<Vec<_>>()).expect("standard basis")
    }

    /// Flag of partial spans ⟨b₁⟩ ⊂ ⟨b₁,b₂⟩ ⊂ ….
    pub fn from_basis(b: &[QVector]) -> Result<Self, LinalgError> {
        let d = b.len();
        let spaces: Vec<Subspace> = (1..=d).map(|i| Subspace::span(d, &b[..i])).collect();
        Self::new(spaces)
    }

    pub fn new(spaces: Vec<Subspace>) -> Result<Self, LinalgError> {
        let d = spaces.len();
        for (i, s) in spaces.iter().enumerate() {
            if s.ambient() != d {
                return Err(LinalgError::IncompleteFlag(format!("space {} lives in dimension {}", i + 1, s.ambient())));
            }
            if s.dim() != i + 1 {
                return Err(LinalgError::IncompleteFlag(format!("space {} has dimension {}", i + 1, s.dim())));
            }
            if i > 0 && !s.contains_subspace(&spaces[i - 1]) {
                return Err(LinalgError::IncompleteFlag(format!("space {} does not contain space {}", i + 1, i)));
            }
        }
        Ok(Flag { spaces })
    }

    pub fn dim(&self) -> usize {
        self.spaces.len()
    }

    /// 𝓕_i for i = 1..=d.
    pub fn space(&self, i: usize) -> &Subspace {
        &self.spaces[i - 1]
    }

    /// A basis f₁..f_d with f_i ∈ 𝓕_i \ 𝓕_{i−1}.
    pub fn adapted_basis(&self) -> Vec<QVector> {
        let mut out: Vec<QVector> = Vec::new();
        for s in &self.spaces {
            let v = s.basis().iter().find(|b| {
                let mut t = out.clone();
                t.push((*b).clone());
                is_independent(&t)
            });
            out.push(v.expect("flag step adds a vector").clone());
        }
        out
    }
}

/// Index of the ℤ-span of the vectors in its saturation, extended
/// multiplicatively to rational vectors.
pub fn saturation_index(vectors: &[QVector]) -> Result<Q, LinalgError> {
    let k = vectors.len();
    if k == 0 {
        return Ok(Q::one());
    }
    let d = vectors[0].len();
    if !is_independent(vectors) {
        return Err(LinalgError::Dependent);
    }
    let mut scale = BigInt::one();
    let rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| {
            let (ints, l) = clear_denominators(v);
            scale *= l;
            ints
        })
        .collect();
    let mut g = BigInt::zero();
    for cols in itertools::Itertools::combinations(0..d, k) {
        let minor: Vec<Vec<BigInt>> = rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        g = g.gcd(&det_int(&minor));
    }
    Ok(Q::new(g, scale).abs())
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Primitive integer vector with positive first nonzero entry, or None for zero.
pub fn canonical_int(v: &[BigInt]) -> Option<Vec<BigInt>> {
    let g = gcd_all(v);
    if g.is_zero() {
        return None;
    }
    let first = v.iter().find(|x| !x.is_zero()).unwrap();
    let g = if first.is_negative() { -g } else { g };
    Some(v.iter().map(|x| x / &g).collect())
}

/// Canonical integral representative of the line through v.
pub fn canonical_point(v: &[Q]) -> Result<Vec<BigInt>, LinalgError> {
    let (ints, _) = clear_denominators(v);
    canonical_int(&ints).ok_or(LinalgError::ZeroVector)
}

pub fn canonical_point_q(v: &[Q]) -> Result<QVector, LinalgError> {
    canonical_point(v).map(|p| int_to_q(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_i64(rows)
    }

    fn perm_expansion(a: &QMatrix) -> Q {
        let n = a.nrows();
        (0..n)
            .permutations(n)
            .map(|p| {
                let s = crate::lin::perm_sign(&p);
                let prod = (0..n).fold(Q::one(), |acc, i| acc * &a[(i, p[i])]);
                prod * qi(s as i64)
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&QMatrix::identity(3)), qi(1));
        assert_eq!(det(&m(&[&[1, 0], &[1, 2]])), qi(2));
        let a = m(&[&[3, -5, 2, 0], &[1, 4, -2, 5], &[-3, 0, 1, 1], &[2, 2, -4, -5]]);
        assert_eq!(det(&a), perm_expansion(&a));
        let b = QMatrix::from_rows(&[vec![qr(1, 2), qr(1, 3)], vec![qi(2), qr(-1, 5)]]);
        assert_eq!(det(&b), qr(1, 2) * qr(-1, 5) - qr(1, 3) * qi(2));
    }

    #[test]
    fn dual_basis_examples() {
        let d = dual_basis(&[qvec(&[1, 0]), qvec(&[1, 1])]).unwrap();
        assert_eq!(d, vec![qvec(&[1, -1]), qvec(&[0, 1])]);
        let e = dual_basis(&[qvec(&[1, 0]), qvec(&[0, 1])]).unwrap();
        assert_eq!(e, vec![qvec(&[1, 0]), qvec(&[0, 1])]);
        assert_eq!(dual_basis(&[qvec(&[1, 2]), qvec(&[2, 4])]), Err(LinalgError::Singular));
    }

    #[test]
    fn intersect_examples() {
        let u = Subspace::span(3, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]);
        let w = Subspace::span(3, &[qvec(&[0, 1, 0]), qvec(&[0, 0, 1])]);
        assert_eq!(u.intersect(&w), Subspace::span(3, &[qvec(&[0, 1, 0])]));
        assert_eq!(u.intersect(&u), u);
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturation_index(&[qvec(&[2, 0]), qvec(&[0, 3])]).unwrap(), qi(6));
        assert_eq!(saturation_index(&[qvec(&[1, 0])]).unwrap(), qi(1));
        assert_eq!(saturation_index(&[qvec(&[2, 4])]).unwrap(), qi(2));
        assert_eq!(saturation_index(&[vec![qr(1, 2), qi(0)]]).unwrap(), qr(1, 2));
        assert!(saturation_index(&[qvec(&[1, 1]), qvec(&[2, 2])]).is_err());
    }

    #[test]
    fn canonical_point_examples() {
        let v = vec![qr(-2, 3), qr(4, 3)];
        assert_eq!(canonical_point_q(&v).unwrap(), qvec(&[1, -2]));
        assert_eq!(canonical_point_q(&qvec(&[0, 1])).unwrap(), qvec(&[0, 1]));
        assert_eq!(canonical_point_q(&qvec(&[0, -5])).unwrap(), qvec(&[0, 1]));
        assert_eq!(canonical_point(&qvec(&[0, 0])), Err(LinalgError::ZeroVector));
    }

    #[test]
    fn flag_checks() {
        let f = Flag::standard(3);
        assert_eq!(f.space(2), &Subspace::span(3, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]));
        assert!(Flag::from_basis(&[qvec(&[1, 0]), qvec(&[2, 0])]).is_err());
        assert_eq!(f.adapted_basis().len(), 3);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("-4/6").unwrap(), qr(-2, 3));
        assert_eq!(fmt_q(&qr(-2, 3)), "-2/3");
        assert_eq!(fmt_q(&qi(5)), "5");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec(-5i64..=5, n * n).prop_map(move |v| {
            QMatrix::from_rows(&v.chunks(n).map(qvec).collect::<Vec<_>>())
        })
    }

    proptest! {
        #[test]
        fn det_multiplicative(a in small_matrix(3), b in small_matrix(3)) {
            prop_assert_eq!(det(&a.mul(&b)), det(&a) * det(&b));
        }

        #[test]
        fn det_matches_expansion(a in small_matrix(4)) {
            prop_assert_eq!(det(&a), perm_expansion(&a));
        }

        #[test]
        fn dual_det_is_reciprocal(a in small_matrix(3)) {
            let rows = a.to_rows();
            let d = det_of_vectors(&rows);
            prop_assume!(!d.is_zero());
            let dual = dual_basis(&rows).unwrap();
            prop_assert_eq!(det_of_vectors(&dual), d.recip());
            for (i, u) in dual.iter().enumerate() {
                for (j, v) in rows.iter().enumerate() {
                    prop_assert_eq!(dot(u, v), if i == j { qi(1) } else { qi(0) });
                }
            }
        }

        #[test]
        fn dimension_formula(a in small_matrix(4), k in 0usize..4, l in 0usize..4) {
            let rows = a.to_rows();
            let u = Subspace::span(4, &rows[..k]);
            let w = Subspace::span(4, &rows[l..]);
            let i = u.intersect(&w);
            prop_assert_eq!(i.dim() + u.sum(&w).dim(), u.dim() + w.dim());
            prop_assert!(u.contains_subspace(&i) && w.contains_subspace(&i));
            let mut stacked: Vec<QVector> = u.annihilator();
            stacked.extend(w.annihilator());
            prop_assert_eq!(i, Subspace::span(4, &nullspace(&stacked, 4)));
        }

        #[test]
        fn canonical_point_projective(v in proptest::collection::vec(-9i64..=9, 3), p in -7i64..=7, q in 1i64..=5) {
            let v = qvec(&v);
            prop_assume!(v.iter().any(|x| !x.is_zero()) && p != 0);
            let c = canonical_point_q(&v).unwrap();
            prop_assert_eq!(canonical_point_q(&c).unwrap(), c.clone());
            prop_assert_eq!(canonical_point_q(&vec_scale(&v, &qr(p, q))).unwrap(), c);
        }

        #[test]
        fn saturation_unimodular_invariant(a in small_matrix(2), s in -3i64..=3) {
            let rows = a.to_rows();
            prop_assume!(!det_of_vectors(&rows).is_zero());
            let u = m(&[&[1, s], &[0, 1]]);
            let moved = u.mul(&a).to_rows();
            prop_assert_eq!(saturation_index(&moved).unwrap(), saturation_index(&rows).unwrap());
        }
    }
}
