//! Bar complex of the Steinberg algebra.
//!
//! Words whose letters are all lines are keyed by their canonical points.
//! Words with a letter of dimension ≥ 2 only arise from the differential and
//! live in a separate bucket; such letters are stored in flag normal form on
//! their span, expanded multilinearly.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lin::{shuffles, Lin};
use crate::poly::{fmt_mono, Mono};
use crate::qlinalg::{dot, fmt_q, int_to_q, is_independent, qi, rref, QVector, Q};
use crate::steinberg::{normal_form, st_concat, Apartment, Point, SteinbergElement};

pub type LineWord = Vec<Point>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarError {
    #[error("letters of the two words are not independent")]
    OverlappingSupports,
    #[error("element has words with letters of dimension ≥ 2")]
    MixedWords,
    #[error("functional is zero")]
    ZeroFunctional,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BarElement {
    ambient: usize,
    lines: Lin<(LineWord, Mono)>,
    mixed: Lin<(Vec<Apartment>, Mono)>,
}

impl BarElement {
    pub fn zero(ambient: usize) -> Self {
        BarElement { ambient, lines: Lin::new(), mixed: Lin::new() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn lines(&self) -> &Lin<(LineWord, Mono)> {
        &self.lines
    }

    pub fn mixed(&self) -> &Lin<(Vec<Apartment>, Mono)> {
        &self.mixed
    }

    pub fn from_lines(ambient: usize, lines: Lin<(LineWord, Mono)>) -> Self {
        BarElement { ambient, lines, mixed: Lin::new() }
    }

    pub fn add_line_word(&mut self, word: LineWord, mono: Mono, c: Q) {
        self.lines.add_term((word, mono), c);
    }

    /// Adds a word given by vectors, canonicalizing each line.
    pub fn add_vectors(&mut self, word: &[QVector], mono: Mono, c: Q) {
        let pts: LineWord = word.iter().map(|v| crate::qlinalg::canonical_point(v).expect("nonzero letter")).collect();
        self.add_line_word(pts, mono, c);
    }

    /// Adds a word whose letters are normal-form apartments.
    pub fn add_word(&mut self, letters: Vec<Apartment>, mono: Mono, c: Q) {
        if letters.iter().all(|a| a.len() == 1) {
            let w = letters.into_iter().map(|a| a.points()[0].clone()).collect();
            self.lines.add_term((w, mono), c);
        } else {
            self.mixed.add_term((letters, mono), c);
        }
    }

    pub fn add_assign(&mut self, other: &BarElement) {
        self.lines.add_assign(&other.lines);
        self.mixed.add_assign(&other.mixed);
    }

    pub fn add_scaled(&mut self, other: &BarElement, c: &Q) {
        self.lines.add_scaled(&other.lines, c);
        self.mixed.add_scaled(&other.mixed, c);
    }

    pub fn sub(&self, other: &BarElement) -> BarElement {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn scaled(&self, c: &Q) -> BarElement {
        let mut out = BarElement::zero(self.ambient);
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.lines.is_zero() && self.mixed.is_zero()
    }

    pub fn len(&self) -> usize {
        self.lines.len() + self.mixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Appends a letter to every line word: x ⊗ [p].
    pub fn append_line(&self, p: &Point) -> BarElement {
        let mut out = BarElement::zero(self.ambient);
        for ((w, m), c) in self.lines.iter() {
            let mut w = w.clone();
            w.push(p.clone());
            out.lines.add_term((w, m.clone()), c.clone());
        }
        out
    }

    /// Words of all (line or mixed) kinds as letter lists.
    fn words(&self) -> Vec<(Vec<Apartment>, Mono, Q)> {
        let mut out: Vec<_> = self
            .lines
            .iter()
            .map(|((w, m), c)| (w.iter().map(|p| line_letter(p)).collect(), m.clone(), c.clone()))
            .collect();
        out.extend(self.mixed.iter().map(|((w, m), c)| (w.clone(), m.clone(), c.clone())));
        out
    }
}

impl std::fmt::Display for BarElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for ((w, m), c) in self.lines.iter() {
            let letters: Vec<String> = w.iter().map(|p| format!("({})", p.iter().join(","))).collect();
            let tail = if m.iter().all(|&e| e == 0) { String::new() } else { format!("⊗{}", fmt_mono(m)) };
            parts.push(format!("{}·[{}]{}", fmt_q(c), letters.join("|"), tail));
        }
        for ((w, m), c) in self.mixed.iter() {
            let letters: Vec<String> = w.iter().map(|a| a.to_string()).collect();
            parts.push(format!("{}·[{}]⊗{}", fmt_q(c), letters.join("|"), fmt_mono(m)));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn line_letter(p: &Point) -> Apartment {
    Apartment::from_points(vec![p.clone()]).expect("nonzero line").0
}

/// Bar differential ∂[a₁|…|a_m] = Σ_j (−1)^{j−1}[…|a_j a_{j+1}|…].
pub fn bar_differential(x: &BarElement) -> BarElement {
    let d = x.ambient;
    let mut out = BarElement::zero(d);
    for (letters, mono, c) in x.words() {
        for j in 0..letters.len().saturating_sub(1) {
            let a = SteinbergElement::from_lin(d, Lin::single(letters[j].clone(), Q::one()));
            let b = SteinbergElement::from_lin(d, Lin::single(letters[j + 1].clone(), Q::one()));
            let merged = normal_form(&st_concat(&a, &b).expect("same ambient"));
            let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
            for (ap, e) in merged.terms().iter() {
                let mut w = letters[..j].to_vec();
                w.push(ap.clone());
                w.extend_from_slice(&letters[j + 2..]);
                out.add_word(w, mono.clone(), &c * &sign * e);
            }
        }
    }
    out
}

/// Shuffle product of two elements with jointly independent letters.
/// Monomials multiply.
pub fn bar_shuffle(x: &BarElement, y: &BarElement) -> Result<BarElement, BarError> {
    let d = x.ambient;
    let mut out = BarElement::zero(d);
    for (wa, ma, ca) in x.words() {
        for (wb, mb, cb) in y.words() {
            let pts: Vec<QVector> = wa.iter().chain(&wb).flat_map(|a| a.vectors()).collect();
            if !pts.is_empty() && !is_independent(&pts) {
                return Err(BarError::OverlappingSupports);
            }
            let m = crate::poly::mono_mul(&ma, &mb);
            for w in shuffles(&wa, &wb) {
                out.add_word(w, m.clone(), &ca * &cb);
            }
        }
    }
    Ok(out)
}

/// All m+1 splits of a word.
pub fn deconcat<T: Clone>(w: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    (0..=w.len()).map(|i| (w[..i].to_vec(), w[i..].to_vec())).collect()
}

/// Deconcatenation of the line words of x as a tensor.
pub fn deconcat_element(x: &BarElement) -> Lin<(LineWord, LineWord, Mono)> {
    let mut out = Lin::new();
    for ((w, m), c) in x.lines.iter() {
        for (a, b) in deconcat(w) {
            out.add_term((a, b, m.clone()), c.clone());
        }
    }
    out
}

/// Keeps the words none of whose lines lie in the hyperplane h = 0.
pub fn p_h_project(x: &BarElement, h: &[Q]) -> Result<BarElement, BarError> {
    if !x.mixed.is_zero() {
        return Err(BarError::MixedWords);
    }
    if h.iter().all(|c| c.is_zero()) {
        return Err(BarError::ZeroFunctional);
    }
    let mut out = BarElement::zero(x.ambient);
    for ((w, m), c) in x.lines.iter() {
        if w.iter().all(|p| !dot(h, &int_to_q(p)).is_zero()) {
            out.lines.add_term((w.clone(), m.clone()), c.clone());
        }
    }
    Ok(out)
}

/// Row-reduced span of all nontrivial shuffles u ⧢ v of words in k letters,
/// with words indexed by permutations of 0..k in lexicographic order.
struct ShuffleSpan {
    index: HashMap<Vec<usize>, usize>,
    rows: Vec<QVector>,
    pivots: Vec<usize>,
}

impl ShuffleSpan {
    fn build(k: usize) -> ShuffleSpan {
        let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
        let index: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = perms.len();
        let mut rels = Vec::new();
        // u ⧢ v = v ⧢ u, so the subset containing letter 0 can be taken first.
        for mask in 1usize..(1 << k) - 1 {
            if mask & 1 == 0 {
                continue;
            }
            let a: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            let b: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
            for u in a.iter().cloned().permutations(a.len()) {
                for v in b.iter().cloned().permutations(b.len()) {
                    let mut row = vec![Q::zero(); n];
                    for w in shuffles(&u, &v) {
                        row[index[&w]] += Q::one();
                    }
                    rels.push(row);
                }
            }
        }
        let (rows, pivots) = rref(&rels, n);
        ShuffleSpan { index, rows, pivots }
    }

    fn reduce(&self, x: &mut [Q]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if x[p].is_zero() {
                continue;
            }
            let f = x[p].clone();
            for (a, b) in x.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
    }
}

fn shuffle_span(k: usize) -> Arc<ShuffleSpan> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ShuffleSpan>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&k) {
        return s.clone();
    }
    let s = Arc::new(ShuffleSpan::build(k));
    cache.lock().unwrap().insert(k, s.clone());
    s
}

/// Canonical representative modulo the span of nontrivial shuffles. The
/// result is supported on the non-pivot words of each letter set.
pub fn shuffle_span_reduce(x: &BarElement) -> Result<BarElement, BarError> {
    if !x.mixed.is_zero() {
        return Err(BarError::MixedWords);
    }
    let mut groups: BTreeMap<(Vec<Point>, Mono), Vec<(&LineWord, &Q)>> = BTreeMap::new();
    for ((w, m), c) in x.lines.iter() {
        let mut letters = w.clone();
        letters.sort();
        groups.entry((letters, m.clone())).or_default().push((w, c));
    }
    let mut out = BarElement::zero(x.ambient);
    for ((letters, mono), words) in groups {
        let k = letters.len();
        if k <= 1 || letters.windows(2).any(|p| p[0] == p[1]) {
            for (w, c) in words {
                out.lines.add_term((w.clone(), mono.clone()), c.clone());
            }
            continue;
        }
        let span = shuffle_span(k);
        let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
        let mut v = vec![Q::zero(); perms.len()];
        for (w, c) in words {
            let p: Vec<usize> = w.iter().map(|pt| letters.binary_search(pt).unwrap()).collect();
            v[span.index[&p]] += c;
        }
        span.reduce(&mut v);
        for (p, c) in perms.iter().zip(v) {
            let w: LineWord = p.iter().map(|&i| letters[i].clone()).collect();
            out.lines.add_term((w, mono.clone()), c);
        }
    }
    Ok(out)
}

/// Deterministic functional with coordinates in {1..97}.
pub fn random_functional(rng: &mut impl rand::Rng, d: usize) -> QVector {
    (0..d).map(|_| qi(rng.gen_range(1..=97))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::zero_mono;
    use crate::qlinalg::qvec;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(v: &[i64]) -> Point {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn word(ws: &[&[i64]]) -> BarElement {
        let d = ws[0].len();
        let mut x = BarElement::zero(d);
        x.add_line_word(ws.iter().map(|w| pt(w)).collect(), zero_mono(d), Q::one());
        x
    }

    fn random_word(rng: &mut ChaCha8Rng, d: usize) -> BarElement {
        loop {
            let vs: Vec<QVector> = (0..d).map(|_| (0..d).map(|_| qi(rng.gen_range(-3..=3))).collect()).collect();
            if is_independent(&vs) {
                let mut x = BarElement::zero(d);
                x.add_vectors(&vs, zero_mono(d), Q::one());
                return x;
            }
        }
    }

    #[test]
    fn differential_examples() {
        let x = word(&[&[1, 0], &[0, 1]]);
        let dx = bar_differential(&x);
        let mut expect = BarElement::zero(2);
        let (a, sign) = Apartment::new(&[qvec(&[1, 0]), qvec(&[0, 1])]).unwrap();
        expect.add_word(vec![a], zero_mono(2), qi(sign as i64));
        assert_eq!(dx, expect);

        let y = word(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let dy = bar_differential(&y);
        let (e12, s12) = Apartment::new(&[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]).unwrap();
        let (e23, s23) = Apartment::new(&[qvec(&[0, 1, 0]), qvec(&[0, 0, 1])]).unwrap();
        let l1 = line_letter(&pt(&[1, 0, 0]));
        let l3 = line_letter(&pt(&[0, 0, 1]));
        let mut expect = BarElement::zero(3);
        expect.add_word(vec![e12, l3], zero_mono(3), qi(s12 as i64));
        expect.add_word(vec![l1, e23], zero_mono(3), -qi(s23 as i64));
        assert_eq!(dy, expect);
    }

    #[test]
    fn differential_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..30 {
            let d = 2 + i % 3;
            let x = random_word(&mut rng, d);
            assert!(bar_differential(&bar_differential(&x)).is_zero());
        }
    }

    #[test]
    fn shuffle_examples() {
        let s = bar_shuffle(&word(&[&[1, 0]]), &word(&[&[0, 1]])).unwrap();
        let mut expect = word(&[&[1, 0], &[0, 1]]);
        expect.add_assign(&word(&[&[0, 1], &[1, 0]]));
        assert_eq!(s, expect);
        let t = bar_shuffle(&word(&[&[1, 0, 0], &[0, 1, 0]]), &word(&[&[0, 0, 1]])).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(bar_shuffle(&word(&[&[1, 0]]), &word(&[&[2, 0]])), Err(BarError::OverlappingSupports));
    }

    #[test]
    fn shuffle_is_associative() {
        let a = word(&[&[1, 0, 0, 0], &[1, 1, 0, 0]]);
        let b = word(&[&[0, 0, 1, 0]]);
        let c = word(&[&[0, 1, 0, 1]]);
        let left = bar_shuffle(&bar_shuffle(&a, &b).unwrap(), &c).unwrap();
        let right = bar_shuffle(&a, &bar_shuffle(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn deconcat_counts() {
        for m in 1..=3usize {
            let w: Vec<usize> = (0..m).collect();
            let splits = deconcat(&w);
            assert_eq!(splits.len(), m + 1);
            assert!(splits.iter().all(|(a, b)| [a.clone(), b.clone()].concat() == w));
        }
    }

    #[test]
    fn projection_examples() {
        let x = word(&[&[1, 0], &[0, 1]]);
        assert_eq!(p_h_project(&x, &qvec(&[1, 1])).unwrap(), x);
        assert!(p_h_project(&x, &qvec(&[1, 0])).unwrap().is_zero());
        assert_eq!(p_h_project(&x, &qvec(&[0, 0])), Err(BarError::ZeroFunctional));
    }

    #[test]
    fn reduce_examples() {
        let mut x = word(&[&[1, 0], &[0, 1]]);
        x.add_assign(&word(&[&[0, 1], &[1, 0]]));
        assert!(shuffle_span_reduce(&x).unwrap().is_zero());
        // (0,1) sorts before (1,0), so [e₂|e₁] is the pivot word.
        let y = word(&[&[0, 1], &[1, 0]]);
        assert_eq!(shuffle_span_reduce(&y).unwrap(), word(&[&[1, 0], &[0, 1]]).scaled(&qi(-1)));
        assert!(shuffle_span_reduce(&BarElement::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn quotient_dimension_is_lie_dimension() {
        // Lie^c_k has dimension (k−1)!.
        for (k, dim) in [(2usize, 1usize), (3, 2), (4, 6)] {
            let s = shuffle_span(k);
            let n: usize = (1..=k).product();
            assert_eq!(n - s.pivots.len(), dim);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn reduce_is_idempotent_and_kills_shuffles(seed in 0u64..10_000, split in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_word(&mut rng, 4);
            let ((w, m), _) = x.lines().iter().next().unwrap();
            let mut a = BarElement::zero(4);
            a.add_line_word(w[..split].to_vec(), m.clone(), Q::one());
            let mut b = BarElement::zero(4);
            b.add_line_word(w[split..].to_vec(), m.clone(), Q::one());
            let sh = bar_shuffle(&a, &b).unwrap();
            prop_assert!(shuffle_span_reduce(&sh).unwrap().is_zero());
            let r = shuffle_span_reduce(&x).unwrap();
            prop_assert_eq!(shuffle_span_reduce(&r).unwrap(), r.clone());
            prop_assert!(!r.is_zero());
            // x − r lies in the shuffle span
            prop_assert!(shuffle_span_reduce(&x.sub(&r)).unwrap().is_zero());
        }
    }
}
