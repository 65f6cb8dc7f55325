//! The Steinberg module St(V) of V = ℚ^d.
//!
//! An apartment is a tuple of projective points. Keys store the points in
//! sorted order; the permutation sign goes into the coefficient, and
//! scaling is absorbed by canonical point representatives. Apartments with
//! fewer than d points are elements of St(W) for their span W ⊆ V.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lin::{perm_sign, sort_with_sign, Lin};
use crate::qlinalg::{
    canonical_int, canonical_point, det_int, int_to_q, inverse, is_independent, nullspace, qi, Flag, LinalgError,
    QMatrix, QVector, Subspace, Q,
};

/// Canonical primitive integer representative of a line.
pub type Point = Vec<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinbergError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point is zero")]
    ZeroPoint,
    #[error("apartment is not full rank in dimension {0}")]
    NotFullRank(usize),
    #[error("non-integral input")]
    NonIntegral,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Sorted tuple of canonical points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Apartment(Vec<Point>);

impl Apartment {
    /// Canonicalizes the vectors; returns the sorted apartment and the sign
    /// of the sort, or None when the vectors are dependent.
    pub fn new(vectors: &[QVector]) -> Option<(Apartment, i32)> {
        let pts: Option<Vec<Point>> = vectors.iter().map(|v| canonical_point(v).ok()).collect();
        Self::from_points(pts?)
    }

    pub fn from_points(mut pts: Vec<Point>) -> Option<(Apartment, i32)> {
        let sign = sort_with_sign(&mut pts);
        if sign == 0 {
            return None;
        }
        if pts.len() > 1 && !is_independent(&pts.iter().map(|p| int_to_q(p)).collect::<Vec<_>>()) {
            return None;
        }
        Some((Apartment(pts), sign))
    }

    /// Integer vectors, canonicalized up to sign per point.
    pub fn from_int(vectors: &[Vec<BigInt>]) -> Option<(Apartment, i32)> {
        let pts: Option<Vec<Point>> = vectors.iter().map(|v| canonical_int(v)).collect();
        Self::from_points(pts?)
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vectors(&self) -> Vec<QVector> {
        self.0.iter().map(|p| int_to_q(p)).collect()
    }

    pub fn span(&self, ambient: usize) -> Subspace {
        Subspace::span(ambient, &self.vectors())
    }

    pub fn det(&self) -> BigInt {
        det_int(&self.0)
    }
}

impl fmt::Display for Apartment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.0.iter().map(|p| format!("({})", p.iter().join(","))).collect();
        write!(f, "[{}]", pts.join(", "))
    }
}

/// Finite ℚ-combination of apartments in a fixed ambient ℚ^d.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SteinbergElement {
    ambient: usize,
    terms: Lin<Apartment>,
}

impl SteinbergElement {
    pub fn zero(ambient: usize) -> Self {
        SteinbergElement { ambient, terms: Lin::new() }
    }

    pub fn from_lin(ambient: usize, terms: Lin<Apartment>) -> Self {
        SteinbergElement { ambient, terms }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn terms(&self) -> &Lin<Apartment> {
        &self.terms
    }

    pub fn into_terms(self) -> Lin<Apartment> {
        self.terms
    }

    pub fn add_apartment(&mut self, vectors: &[QVector], c: Q) {
        if let Some((a, s)) = Apartment::new(vectors) {
            self.terms.add_term(a, c * qi(s as i64));
        }
    }

    pub fn add_assign(&mut self, other: &SteinbergElement) {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        self.terms.add_assign(&other.terms);
    }

    pub fn sub(&self, other: &SteinbergElement) -> SteinbergElement {
        let mut out = self.clone();
        out.terms.sub_assign(&other.terms);
        out
    }

    pub fn scaled(&self, c: &Q) -> SteinbergElement {
        SteinbergElement { ambient: self.ambient, terms: self.terms.scaled(c) }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_zero()
    }

    /// Flag normal form; true iff the element vanishes in St.
    pub fn is_zero(&self) -> bool {
        normal_form(self).is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }
}

impl fmt::Display for SteinbergElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(a, c)| format!("{}·{}", crate::qlinalg::fmt_q(c), a)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical single-apartment element; zero for dependent vectors.
pub fn make_apartment(vectors: &[QVector]) -> SteinbergElement {
    let ambient = vectors.first().map_or(0, |v| v.len());
    let mut x = SteinbergElement::zero(ambient);
    x.add_apartment(vectors, Q::one());
    x
}

/// Lines 𝓕_{d−|S|+1} ∩ ⟨w_S⟩ for every subset S (bitmask) of the points, in
/// coordinates where the flag is standard.
fn suffix_lines(w: &[QVector]) -> Vec<Option<QVector>> {
    let d = w.len();
    let mut out = vec![None; 1 << d];
    for mask in 1usize..(1 << d) {
        let s: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
        let i = d - s.len() + 1;
        // Combinations Σ c_j w_j whose coordinates i..d vanish.
        let eqs: Vec<QVector> = (i..d).map(|r| s.iter().map(|&j| w[j][r].clone()).collect()).collect();
        let ns = nullspace(&eqs, s.len());
        if ns.len() == 1 {
            let mut v = vec![Q::zero(); d];
            for (c, &j) in ns[0].iter().zip(&s) {
                for (x, y) in v.iter_mut().zip(&w[j]) {
                    *x += c * y;
                }
            }
            out[mask] = Some(v);
        }
    }
    out
}

/// Expansion of one full-rank apartment in the standard-flag basis of ℚ^d.
fn expand_standard(w: &[QVector]) -> Lin<Vec<QVector>> {
    let d = w.len();
    let lines = suffix_lines(w);
    let mut out = Lin::new();
    'perm: for tau in (0..d).permutations(d) {
        let mut pts = Vec::with_capacity(d);
        for i in 0..d {
            let mask = tau[i..].iter().fold(0usize, |m, &j| m | 1 << j);
            match &lines[mask] {
                Some(v) => pts.push(v.clone()),
                None => continue 'perm,
            }
        }
        out.add_term(pts, qi(perm_sign(&tau) as i64));
    }
    out
}

fn add_expansion(out: &mut Lin<Apartment>, vectors: &[QVector], c: &Q, map_back: impl Fn(&QVector) -> QVector) {
    for (pts, s) in expand_standard(vectors) {
        let amb: Vec<QVector> = pts.iter().map(&map_back).collect();
        if let Some((a, sign)) = Apartment::new(&amb) {
            out.add_term(a, c * &s * qi(sign as i64));
        }
    }
}

/// Rewrites x in the basis attached to a complete flag of the ambient space.
pub fn flag_expand(x: &SteinbergElement, f: &Flag) -> Result<SteinbergElement, SteinbergError> {
    let d = x.ambient;
    if f.dim() != d {
        return Err(SteinbergError::DimensionMismatch { expected: d, found: f.dim() });
    }
    let basis = f.adapted_basis();
    let to_flag = inverse(&QMatrix::from_cols(&basis))?;
    let from_flag = QMatrix::from_cols(&basis);
    let mut out = Lin::new();
    for (a, c) in x.terms.iter() {
        if a.len() != d {
            return Err(SteinbergError::NotFullRank(d));
        }
        let coords: Vec<QVector> = a.vectors().iter().map(|v| to_flag.mul_vec(v)).collect();
        add_expansion(&mut out, &coords, c, |v| from_flag.mul_vec(v));
    }
    Ok(SteinbergElement { ambient: d, terms: out })
}

/// Standard-flag normal form. Apartments on a proper subspace W are expanded
/// in the flag of W induced by its echelon basis.
pub fn normal_form(x: &SteinbergElement) -> SteinbergElement {
    let d = x.ambient;
    let mut groups: BTreeMap<Subspace, Vec<(&Apartment, &Q)>> = BTreeMap::new();
    for (a, c) in x.terms.iter() {
        groups.entry(a.span(d)).or_default().push((a, c));
    }
    let mut out = Lin::new();
    for (w, items) in groups {
        for (a, c) in items {
            let coords: Vec<QVector> = a.vectors().iter().map(|v| w.coords(v)).collect();
            add_expansion(&mut out, &coords, c, |v| w.from_coords(v));
        }
    }
    SteinbergElement { ambient: d, terms: out }
}

pub fn is_zero(x: &SteinbergElement) -> bool {
    x.is_zero()
}

/// Concatenation product of two elements on V₁ = ℚ^{d₁} and V₂ = ℚ^{d₂},
/// embedded as coordinate blocks of V₁ ⊕ V₂.
pub fn st_multiply(a: &SteinbergElement, b: &SteinbergElement) -> SteinbergElement {
    let (d1, d2) = (a.ambient, b.ambient);
    let mut out = Lin::new();
    for (x, c) in a.terms.iter() {
        for (y, e) in b.terms.iter() {
            let mut pts: Vec<Point> =
                x.points().iter().map(|p| p.iter().cloned().chain(std::iter::repeat(BigInt::zero()).take(d2)).collect()).collect();
            pts.extend(y.points().iter().map(|p| std::iter::repeat(BigInt::zero()).take(d1).chain(p.iter().cloned()).collect()));
            if let Some((ap, s)) = Apartment::from_points(pts) {
                out.add_term(ap, c * e * qi(s as i64));
            }
        }
    }
    SteinbergElement { ambient: d1 + d2, terms: out }
}

/// Concatenation product of two elements living on subspaces of the same ambient space.
pub fn st_concat(a: &SteinbergElement, b: &SteinbergElement) -> Result<SteinbergElement, SteinbergError> {
    if a.ambient != b.ambient {
        return Err(SteinbergError::DimensionMismatch { expected: a.ambient, found: b.ambient });
    }
    let mut out = Lin::new();
    for (x, c) in a.terms.iter() {
        for (y, e) in b.terms.iter() {
            let pts: Vec<Point> = x.points().iter().chain(y.points()).cloned().collect();
            if let Some((ap, s)) = Apartment::from_points(pts) {
                out.add_term(ap, c * e * qi(s as i64));
            }
        }
    }
    Ok(SteinbergElement { ambient: a.ambient, terms: out })
}

/// Residue ∂_P along the line P = ⟨p⟩, landing in V/⟨p⟩ identified with the
/// coordinate complement of the first nonzero coordinate of p.
pub fn residue(x: &SteinbergElement, p: &[Q]) -> Result<SteinbergElement, SteinbergError> {
    let d = x.ambient;
    if p.len() != d {
        return Err(SteinbergError::DimensionMismatch { expected: d, found: p.len() });
    }
    let p = canonical_point(p).map_err(|_| SteinbergError::ZeroPoint)?;
    let j = p.iter().position(|c| !c.is_zero()).unwrap();
    let pq = int_to_q(&p);
    let project = |v: &Point| -> QVector {
        let vq = int_to_q(v);
        let f = &vq[j] / &pq[j];
        (0..d).filter(|&i| i != j).map(|i| &vq[i] - &f * &pq[i]).collect()
    };
    let mut out = SteinbergElement::zero(d - 1);
    for (a, c) in x.terms.iter() {
        let Some(i) = a.points().iter().position(|q| *q == p) else { continue };
        let rest: Vec<QVector> = a.points().iter().enumerate().filter(|&(k, _)| k != i).map(|(_, q)| project(q)).collect();
        let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
        out.add_apartment(&rest, c * sign);
    }
    Ok(out)
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // nearest integer to n/d, d > 0
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

fn det2(a: &[BigInt], b: &[BigInt]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Splitting point for a 2-dimensional apartment [v₁,v₂] with |det| > 1.
///
/// The children [w,v₂] and [v₁,w] have determinants a = det(w,v₂) and
/// b = det(v₁,w). The map w ↦ (a,b) embeds ℤ² as a lattice of covolume
/// |det|; a reduced basis of that lattice yields children of size O(√|det|).
/// Ties prefer points inside the cone of v₁, v₂ (the mediant), then lexicographic order.
fn move_dim2(v1: &[BigInt], v2: &[BigInt]) -> Point {
    let dd = det2(v1, v2).abs();
    let image = |w: &[BigInt]| (det2(w, v2), det2(v1, w));
    let norm = |w: &[BigInt]| {
        let (a, b) = image(w);
        &a * &a + &b * &b
    };
    let inner = |u: &[BigInt], w: &[BigInt]| {
        let (a, b) = image(u);
        let (c, e) = image(w);
        a * c + b * e
    };
    let mut b1: Point = vec![BigInt::one(), BigInt::zero()];
    let mut b2: Point = vec![BigInt::zero(), BigInt::one()];
    loop {
        if norm(&b1) > norm(&b2) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = round_div(&inner(&b1, &b2), &norm(&b1));
        if mu.is_zero() {
            break;
        }
        b2 = b2.iter().zip(&b1).map(|(x, y)| x - &mu * y).collect();
    }
    let sum: Point = b1.iter().zip(&b2).map(|(x, y)| x + y).collect();
    let diff: Point = b1.iter().zip(&b2).map(|(x, y)| x - y).collect();
    let score = |w: &Point| {
        let (a, b) = image(w);
        let outside = (&a * &b).is_negative();
        (a.abs().max(b.abs()), a.abs() + b.abs(), outside, canonical_int(w))
    };
    let best = [b1, b2, sum, diff].into_iter().filter(|w| w.iter().any(|c| !c.is_zero())).min_by_key(score).unwrap();
    let w = canonical_int(&best).unwrap();
    let (a, b) = image(&w);
    assert!(a.abs() < dd && b.abs() < dd, "lattice move failed to shrink determinant");
    w
}

/// Unimodular integer matrix U (rows) with U·v = e₁, for primitive v.
fn unimodular_to_e1(v: &[BigInt]) -> Vec<Vec<BigInt>> {
    let d = v.len();
    let mut u: Vec<Vec<BigInt>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut x = v.to_vec();
    for i in (1..d).rev() {
        if x[i].is_zero() {
            continue;
        }
        let eg = x[i - 1].extended_gcd(&x[i]);
        let g = eg.gcd;
        let (a, b) = (eg.x, eg.y);
        let (p, q) = (&x[i] / &g, &x[i - 1] / &g);
        // [[a, b], [−p, q]] has determinant 1 and sends (x[i−1], x[i]) to (g, 0).
        let ri = u[i - 1].clone();
        let rj = u[i].clone();
        u[i - 1] = ri.iter().zip(&rj).map(|(s, t)| &a * s + &b * t).collect();
        u[i] = ri.iter().zip(&rj).map(|(s, t)| -&p * s + &q * t).collect();
        x[i - 1] = g;
        x[i] = BigInt::zero();
    }
    if x[0].is_negative() {
        u[0] = u[0].iter().map(|c| -c).collect();
    }
    u
}

fn mat_vec_int(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// A point w such that every child of relation (3), [v with v_i replaced
/// by w], is strictly smaller than v; None for unimodular input.
///
/// Dimension 2 uses the lattice move. In higher dimension, with h the last
/// coordinate and k = max |h(v_i)|: two points at level k give w = v_a − v_b;
/// a single point v_P at level k leads to the quotient by ⟨v_P⟩, whose move
/// is lifted to a point w with 0 ≤ h(w) < k.
pub fn choose_move(points: &[Point]) -> Option<Point> {
    let n = points.len();
    if n <= 1 || det_int(points).abs().is_one() {
        return None;
    }
    if n == 2 {
        return Some(move_dim2(&points[0], &points[1]));
    }
    let h = |v: &[BigInt]| v[n - 1].clone();
    let pts: Vec<Point> = points.iter().map(|p| if h(p).is_negative() { p.iter().map(|c| -c).collect() } else { p.clone() }).collect();
    let k = pts.iter().map(|p| h(p)).max().unwrap();
    let top: Vec<usize> = (0..n).filter(|&i| h(&pts[i]) == k).collect();
    if top.len() >= 2 {
        let w: Point = pts[top[0]].iter().zip(&pts[top[1]]).map(|(a, b)| a - b).collect();
        return canonical_int(&w);
    }
    let vp = &pts[top[0]];
    let u = unimodular_to_e1(vp);
    let quotient: Vec<Point> = (0..n).filter(|&i| i != top[0]).map(|i| mat_vec_int(&u, &pts[i])[1..].to_vec()).collect();
    let wbar = match quotient.iter().find(|q| !crate::qlinalg::gcd_all(q).is_one()) {
        Some(q) => canonical_int(q).unwrap(),
        None => {
            let prim: Vec<Point> = quotient.iter().map(|q| canonical_int(q).unwrap()).collect();
            choose_move(&prim).expect("quotient of a non-unimodular apartment is non-unimodular")
        }
    };
    let uq: Vec<QVector> = u.iter().map(|r| int_to_q(r)).collect();
    let uinv = inverse(&QMatrix::from_rows(&uq)).expect("unimodular");
    let lift_q = uinv.mul_vec(&int_to_q(&std::iter::once(BigInt::zero()).chain(wbar).collect::<Vec<_>>()));
    let lift: Point = lift_q.iter().map(|c| c.to_integer()).collect();
    let t = -h(&lift).div_floor(&k);
    let w: Point = lift.iter().zip(vp).map(|(a, b)| a + &t * b).collect();
    Some(w)
}

/// Rewrites x as a combination of unimodular apartments.
pub fn ash_rudolph_reduce(x: &SteinbergElement) -> Result<SteinbergElement, SteinbergError> {
    let d = x.ambient;
    let mut work: Lin<Apartment> = Lin::new();
    for (a, c) in x.terms.iter() {
        if a.len() != d {
            return Err(SteinbergError::NotFullRank(d));
        }
        work.add_term(a.clone(), c.clone());
    }
    let mut out = Lin::new();
    while let Some((a, c)) = work.pop_first() {
        match choose_move(a.points()) {
            None => out.add_term(a, c),
            Some(w) => {
                for i in 0..d {
                    let mut pts = a.points().to_vec();
                    pts[i] = w.clone();
                    if let Some((child, s)) = Apartment::from_int(&pts) {
                        work.add_term(child, &c * qi(s as i64));
                    }
                }
            }
        }
    }
    Ok(SteinbergElement { ambient: d, terms: out })
}

/// Rational input convenience: the apartment must have integral canonical points.
pub fn ash_rudolph_apartment(vectors: &[QVector]) -> Result<SteinbergElement, SteinbergError> {
    if vectors.iter().flatten().any(|c| !c.is_integer()) {
        return Err(SteinbergError::NonIntegral);
    }
    ash_rudolph_reduce(&make_apartment(vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{qr, qvec, vec_add, vec_scale};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn apt(vs: &[&[i64]]) -> SteinbergElement {
        make_apartment(&vs.iter().map(|v| qvec(v)).collect::<Vec<_>>())
    }

    fn random_basis(rng: &mut ChaCha8Rng, d: usize, r: i64) -> Vec<QVector> {
        loop {
            let b: Vec<QVector> = (0..d).map(|_| (0..d).map(|_| qi(rng.gen_range(-r..=r))).collect()).collect();
            if is_independent(&b) {
                return b;
            }
        }
    }

    #[test]
    fn make_apartment_examples() {
        assert_eq!(apt(&[&[0, 1], &[1, 0]]), apt(&[&[1, 0], &[0, 1]]).scaled(&qi(-1)));
        assert!(apt(&[&[1, 0], &[2, 0]]).is_empty());
        assert_eq!(apt(&[&[-2, 0], &[1, 1]]), apt(&[&[1, 0], &[1, 1]]));
    }

    #[test]
    fn flag_expand_examples() {
        let f = Flag::standard(2);
        let e = apt(&[&[1, 0], &[0, 1]]);
        assert_eq!(flag_expand(&e, &f).unwrap(), e);
        let x = apt(&[&[0, 1], &[1, 1]]);
        let mut expect = apt(&[&[1, 0], &[1, 1]]);
        expect.add_assign(&apt(&[&[1, 0], &[0, 1]]).scaled(&qi(-1)));
        assert_eq!(flag_expand(&x, &f).unwrap(), expect);
        assert_eq!(normal_form(&x), expect);
        let bad = Flag::standard(3);
        assert!(flag_expand(&x, &bad).is_err());
    }

    #[test]
    fn flag_expand_nonstandard_flag_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = Flag::from_basis(&random_basis(&mut rng, 3, 4)).unwrap();
            let x = make_apartment(&random_basis(&mut rng, 3, 4));
            let y = flag_expand(&x, &f).unwrap();
            assert_eq!(flag_expand(&y, &f).unwrap(), y);
            assert!(x.sub(&y).is_zero());
        }
    }

    #[test]
    fn relation_three_is_zero() {
        let mut x = apt(&[&[1, 0], &[0, 1]]);
        x.add_assign(&apt(&[&[1, 0], &[1, 1]]).scaled(&qi(-1)));
        x.add_assign(&apt(&[&[1, 1], &[0, 1]]).scaled(&qi(-1)));
        assert!(x.is_zero());
        assert!(!apt(&[&[1, 0], &[0, 1]]).is_zero());
        let v = vec![qvec(&[2, 3]), qvec(&[1, -4])];
        let w = vec![vec_scale(&v[0], &qr(7, 3)), v[1].clone()];
        assert!(make_apartment(&v).sub(&make_apartment(&w)).is_zero());
    }

    #[test]
    fn subspace_apartments_normalize_on_span() {
        // [e₂, e₁+e₂] on the plane x₃ = 0 inside ℚ³.
        let x = apt(&[&[0, 1, 0], &[1, 1, 0]]);
        let nf = normal_form(&x);
        let mut expect = apt(&[&[1, 0, 0], &[1, 1, 0]]);
        expect.add_assign(&apt(&[&[1, 0, 0], &[0, 1, 0]]).scaled(&qi(-1)));
        assert_eq!(nf, expect);
    }

    #[test]
    fn multiply_examples() {
        let e1 = apt(&[&[1]]);
        assert_eq!(st_multiply(&e1, &e1), apt(&[&[1, 0], &[0, 1]]));
        let a = apt(&[&[1, 0]]);
        let b = apt(&[&[0, 1]]);
        assert!(st_concat(&a, &a).unwrap().is_empty());
        assert_eq!(st_concat(&b, &a).unwrap(), apt(&[&[1, 0], &[0, 1]]).scaled(&qi(-1)));
    }

    #[test]
    fn residue_examples() {
        let x = apt(&[&[1, 0], &[0, 1]]);
        assert_eq!(residue(&x, &qvec(&[1, 0])).unwrap(), apt(&[&[1]]));
        assert!(residue(&x, &qvec(&[0, 0, 1])).is_err());
        let y = apt(&[&[0, 1], &[1, 1]]);
        assert!(residue(&y, &qvec(&[1, 0])).unwrap().is_empty());
    }

    #[test]
    fn residue_kills_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let b = random_basis(&mut rng, 3, 3);
            let w = vec_add(&b[0], &b[1]);
            let mut rel = make_apartment(&b);
            for i in 0..3 {
                let mut c = b.clone();
                c[i] = w.clone();
                rel.add_assign(&make_apartment(&c).scaled(&qi(-1)));
            }
            assert!(residue(&rel, &b[0]).unwrap().is_zero());
            assert!(residue(&rel, &w).unwrap().is_zero());
        }
    }

    #[test]
    fn ash_rudolph_examples() {
        let x = apt(&[&[1, 0], &[1, 2]]);
        let r = ash_rudolph_reduce(&x).unwrap();
        let mut expect = apt(&[&[1, 0], &[1, 1]]);
        expect.add_assign(&apt(&[&[1, 1], &[1, 2]]));
        assert_eq!(r, expect);
        let e = apt(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(ash_rudolph_reduce(&e).unwrap(), e);
        assert_eq!(ash_rudolph_apartment(&[vec![qr(1, 2)]]), Err(SteinbergError::NonIntegral));
    }

    #[test]
    fn unimodular_matrix_sends_point_to_e1() {
        let v: Vec<BigInt> = [6, -10, 15, 7].iter().map(|&x| BigInt::from(x)).collect();
        let u = unimodular_to_e1(&v);
        let img = mat_vec_int(&u, &v);
        assert_eq!(img, vec![BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero()]);
        assert!(det_int(&u).abs().is_one());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn ash_rudolph_is_unimodular_and_equal(seed in 0u64..10_000, d in 2usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_basis(&mut rng, d, 4);
            let x = make_apartment(&b);
            let r = ash_rudolph_reduce(&x).unwrap();
            prop_assert!(r.terms().keys().all(|a| a.det().abs().is_one()));
            prop_assert!(x.sub(&r).is_zero());
        }

        #[test]
        fn graded_commutativity(seed in 0u64..10_000, d1 in 1usize..=2, d2 in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = make_apartment(&random_basis(&mut rng, d1, 3));
            let b = make_apartment(&random_basis(&mut rng, d2, 3));
            let ab = st_multiply(&a, &b);
            // b·a lives on V₂ ⊕ V₁; swap the coordinate blocks back.
            let ba = st_multiply(&b, &a);
            let mut swapped = SteinbergElement::zero(d1 + d2);
            for (ap, c) in ba.terms().iter() {
                let vs: Vec<QVector> = ap.vectors().iter().map(|v| v[d2..].iter().chain(&v[..d2]).cloned().collect()).collect();
                swapped.add_apartment(&vs, c.clone());
            }
            let sign = if (d1 * d2) % 2 == 0 { qi(1) } else { qi(-1) };
            prop_assert!(ab.sub(&swapped.scaled(&sign)).is_zero());
        }

        #[test]
        fn normal_form_is_idempotent(seed in 0u64..10_000, d in 2usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = make_apartment(&random_basis(&mut rng, d, 5));
            let y = normal_form(&x);
            prop_assert_eq!(normal_form(&y), y);
        }
    }
}
