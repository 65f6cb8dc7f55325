//! Cones, the partial-fraction realization ρ of St ⊗ 𝕊, and Fourier
//! coefficients of lattice polylogarithm distributions.
//!
//! ρ is injective, so evaluating it at random points gives a probabilistic
//! zero test that is independent of the flag normal form.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lin::Lin;
use crate::poly::{self, factorial, Mono, Poly};
use crate::qlinalg::{clear_denominators, det_of_vectors, dot, dual_basis, gcd_all, int_to_q, is_independent, qi, solve, QMatrix, QVector, Q};
use crate::st2::St2Element;
use crate::steinberg::{Apartment, SteinbergElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("apartment is degenerate")]
    Degenerate,
    #[error("rays are not linearly independent")]
    NotSimplicial,
    #[error("evaluation point hits a pole")]
    Pole,
    #[error("every sampled point hit a pole")]
    PersistentPoles,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular support: the series does not converge at an integer point")]
    SingularSupport,
    #[error("apartments must be full rank for the oracle")]
    NotFullRank,
}

/// Simplicial cone ℝ≥0 v₁ + … + ℝ≥0 v_k, or its relative interior when `open`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    rays: Vec<QVector>,
    ambient: usize,
    open: bool,
}

impl Cone {
    /// Rays are rescaled to primitive integer vectors in the same direction.
    pub fn new(ambient: usize, rays: &[QVector], open: bool) -> Result<Cone, ConeError> {
        if let Some(r) = rays.iter().find(|r| r.len() != ambient) {
            return Err(ConeError::DimensionMismatch { expected: ambient, found: r.len() });
        }
        if !rays.is_empty() && !is_independent(rays) {
            return Err(ConeError::NotSimplicial);
        }
        let rays = rays
            .iter()
            .map(|r| {
                let (ints, _) = clear_denominators(r);
                let g = gcd_all(&ints);
                int_to_q(&ints.iter().map(|x| x / &g).collect::<Vec<BigInt>>())
            })
            .collect();
        Ok(Cone { rays, ambient, open })
    }

    pub fn rays(&self) -> &[QVector] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    /// Coefficients of ν in the rays, if ν lies in their span.
    fn ray_coords(&self, nu: &[Q]) -> Option<QVector> {
        if self.rays.is_empty() {
            return nu.iter().all(|x| x.is_zero()).then(Vec::new);
        }
        solve(&QMatrix::from_cols(&self.rays), nu)
    }

    pub fn contains(&self, nu: &[Q]) -> bool {
        match self.ray_coords(nu) {
            Some(c) if self.open => c.iter().all(|x| x.is_positive()),
            Some(c) => c.iter().all(|x| !x.is_negative()),
            None => false,
        }
    }

    /// True when ν is in the closed cone but not in its relative interior.
    pub fn on_wall(&self, nu: &[Q]) -> bool {
        match self.ray_coords(nu) {
            Some(c) => c.iter().all(|x| !x.is_negative()) && c.iter().any(|x| x.is_zero()),
            None => false,
        }
    }
}

/// [C(v₁..v_d)] ↦ sgn det(v₁..v_d)·[v₁..v_d]; lower-dimensional cones map to 0.
pub fn cone_to_steinberg(c: &Cone) -> SteinbergElement {
    let mut out = SteinbergElement::zero(c.ambient);
    if c.dim() == c.ambient {
        let s = det_of_vectors(&c.rays);
        let sign = if s.is_negative() { -Q::one() } else { Q::one() };
        out.add_apartment(&c.rays, sign);
    }
    out
}

/// c / ∏ ⟨u, z⟩^n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFractionTerm {
    pub coeff: Q,
    pub factors: Vec<(QVector, u32)>,
}

impl PartialFractionTerm {
    pub fn degree(&self) -> i64 {
        -self.factors.iter().map(|(_, n)| *n as i64).sum::<i64>()
    }
}

/// ρ([v]⊗f) = f(−∂) applied to det(v¹..v^d)/∏⟨v^i, z⟩. On the monomial
/// ∏ v_i^{n_i−1}/(n_i−1)! this is det(v¹..v^d)/∏⟨v^i, z⟩^{n_i}.
pub fn rho(a: &Apartment, f: &Poly) -> Result<Vec<PartialFractionTerm>, ConeError> {
    let v = a.vectors();
    if v.is_empty() || v.len() != v[0].len() {
        return Err(ConeError::Degenerate);
    }
    let dual = dual_basis(&v).map_err(|_| ConeError::Degenerate)?;
    let det = det_of_vectors(&dual);
    // e_j = Σ_i ⟨v^i, e_j⟩ v_i, so f in the variables v_i is f(e ↦ D e).
    let in_v = poly::act(&QMatrix::from_rows(&dual), f);
    let mut out = Vec::new();
    for (m, c) in in_v.iter() {
        let weight: BigInt = m.iter().map(|&e| factorial(e)).product();
        let factors = dual.iter().zip(m).map(|(u, &e)| (u.clone(), e + 1)).collect();
        out.push(PartialFractionTerm { coeff: c * &det * Q::from_integer(weight), factors });
    }
    Ok(out)
}

/// ρ of the apartment with the symmetric part ∏ v_i^{n_i−1}/(n_i−1)! in its own vectors.
pub fn rho_weighted(a: &Apartment, ns: &[u32]) -> Result<Vec<PartialFractionTerm>, ConeError> {
    let v = a.vectors();
    if ns.len() != v.len() {
        return Err(ConeError::DimensionMismatch { expected: v.len(), found: ns.len() });
    }
    let d = v.first().map_or(0, |x| x.len());
    rho(a, &poly::divided_power_product(&v, ns, d))
}

/// Exact value of Σ terms at z.
pub fn eval_pfrac(terms: &[PartialFractionTerm], z: &[Q]) -> Result<Q, ConeError> {
    let mut total = Q::zero();
    for t in terms {
        let mut den = Q::one();
        for (u, n) in &t.factors {
            let l = dot(u, z);
            if l.is_zero() {
                return Err(ConeError::Pole);
            }
            den *= num_traits::pow(l, *n as usize);
        }
        total += &t.coeff / den;
    }
    Ok(total)
}

/// Elements of St ⊗ 𝕊 keyed by (apartment, monomial in e₁..e_d).
pub type StSym = Lin<(Apartment, Mono)>;

pub fn st_sym_of(x: &SteinbergElement) -> StSym {
    let d = x.ambient();
    x.terms().iter().map(|(a, c)| ((a.clone(), poly::zero_mono(d)), c.clone())).collect()
}

fn rho_st_sym(x: &StSym) -> Result<Vec<PartialFractionTerm>, ConeError> {
    let mut out = Vec::new();
    for ((a, m), c) in x.iter() {
        for mut t in rho(a, &Poly::single(m.clone(), Q::one()))? {
            t.coeff *= c;
            out.push(t);
        }
    }
    Ok(out)
}

/// Evaluation oracle settings: K points with coordinates in {1..box}.
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub points: usize,
    pub coord_bound: i64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { points: 5, coord_bound: 10_000, seed: 0x5eed }
    }
}

fn random_point(rng: &mut ChaCha8Rng, d: usize, bound: i64) -> QVector {
    (0..d).map(|_| qi(rng.gen_range(1..=bound))).collect()
}

/// Evaluates `eval` at K random points, resampling on pole hits. True iff
/// every value is zero.
fn oracle_loop(cfg: &OracleConfig, mut eval: impl FnMut(&mut ChaCha8Rng) -> Result<Q, ConeError>) -> Result<bool, ConeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut done = 0;
    let mut misses = 0;
    while done < cfg.points {
        match eval(&mut rng) {
            Ok(v) if !v.is_zero() => return Ok(false),
            Ok(_) => done += 1,
            Err(ConeError::Pole) => {
                misses += 1;
                if misses > 20 * cfg.points.max(1) {
                    return Err(ConeError::PersistentPoles);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Probabilistic zero test of x ∈ St ⊗ 𝕊 through ρ.
pub fn st_equality_oracle(x: &StSym, d: usize, cfg: &OracleConfig) -> Result<bool, ConeError> {
    let terms = rho_st_sym(x)?;
    oracle_loop(cfg, |rng| {
        let z = random_point(rng, d, cfg.coord_bound);
        eval_pfrac(&terms, &z)
    })
}

/// Zero test of a plain Steinberg element through ρ.
pub fn st_oracle_is_zero(x: &SteinbergElement, cfg: &OracleConfig) -> Result<bool, ConeError> {
    st_equality_oracle(&st_sym_of(x), x.ambient(), cfg)
}

/// Probabilistic zero test of x ∈ St ⊗ St ⊗ 𝕊 through ρ(A)(z)·ρ(B⊗f)(z′).
pub fn st2_equality_oracle(x: &St2Element, cfg: &OracleConfig) -> Result<bool, ConeError> {
    let d = x.ambient();
    let mut pieces = Vec::new();
    for ((a, b, m), c) in x.terms().iter() {
        if a.len() != d {
            return Err(ConeError::NotFullRank);
        }
        let left = rho(a, &poly::one(d))?;
        let right = rho(b, &Poly::single(m.clone(), Q::one()))?;
        pieces.push((c.clone(), left, right));
    }
    oracle_loop(cfg, |rng| {
        let z = random_point(rng, d, cfg.coord_bound);
        let w = random_point(rng, d, cfg.coord_bound);
        let mut total = Q::zero();
        for (c, l, r) in &pieces {
            total += c * eval_pfrac(l, &z)? * eval_pfrac(r, &w)?;
        }
        Ok(total)
    })
}

/// Distribution with Fourier coefficients ∏⟨u_j, ν⟩^{−n_j} on C ∩ ℤ^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierSpec {
    pub cone: Cone,
    pub u: Vec<QVector>,
    pub n: Vec<u32>,
}

impl FourierSpec {
    pub fn new(cone: Cone, u: Vec<QVector>, n: Vec<u32>) -> Result<FourierSpec, ConeError> {
        if u.len() != cone.ambient || n.len() != u.len() {
            return Err(ConeError::DimensionMismatch { expected: cone.ambient, found: u.len() });
        }
        if !is_independent(&u) {
            return Err(ConeError::NotSimplicial);
        }
        Ok(FourierSpec { cone, u, n })
    }

    /// Li_{n₁..n_d}(e^{2πix₁}, …): coefficients 1/∏m_i^{n_i} on 0 < m₁ < … < m_d.
    pub fn standard(n: &[u32]) -> FourierSpec {
        let d = n.len();
        let rays: Vec<QVector> = (0..d).map(|j| (0..d).map(|i| if i >= j { qi(1) } else { qi(0) }).collect()).collect();
        let u = (0..d).map(|j| crate::qlinalg::unit_vector(d, j)).collect();
        FourierSpec::new(Cone::new(d, &rays, true).expect("independent rays"), u, n.to_vec()).expect("basis")
    }

    pub fn weight(&self) -> u32 {
        self.n.iter().sum()
    }

    pub fn ambient(&self) -> usize {
        self.cone.ambient
    }
}

/// The two one-dimensional specs whose sum is Σ_{ν≠0} e^{2πiνx}/ν^n.
pub fn bernoulli_specs(n: u32) -> Vec<FourierSpec> {
    [1, -1]
        .iter()
        .map(|&s| FourierSpec::new(Cone::new(1, &[vec![qi(s)]], true).unwrap(), vec![vec![qi(1)]], vec![n]).unwrap())
        .collect()
}

/// F̂(ν), exact.
pub fn fourier_coefficient(spec: &FourierSpec, nu: &[i64]) -> Q {
    let nq: QVector = nu.iter().map(|&x| qi(x)).collect();
    if !spec.cone.contains(&nq) {
        return Q::zero();
    }
    let mut den = Q::one();
    for (u, &n) in spec.u.iter().zip(&spec.n) {
        let l = dot(u, &nq);
        if l.is_zero() {
            return Q::zero();
        }
        den *= num_traits::pow(l, n as usize);
    }
    den.recip()
}

/// Calls f on every lattice point of [−m, m]^d.
fn for_box(d: usize, m: i64, mut f: impl FnMut(&[i64]) -> bool) {
    let mut nu = vec![-m; d];
    if m < 0 {
        return;
    }
    loop {
        if !f(&nu) {
            return;
        }
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if nu[i] < m {
                nu[i] += 1;
                break;
            }
            nu[i] = -m;
            i += 1;
        }
    }
}

fn to_f64(q: &Q) -> f64 {
    q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap()
}

/// Σ_{|ν|_∞ ≤ M} F̂(ν) e^{2πi⟨ν,x⟩} over a sum of specs.
pub fn truncated_fourier_sum(specs: &[FourierSpec], x: &[f64], m: i64) -> Complex64 {
    let d = x.len();
    let mut total = Complex64::zero();
    for_box(d, m, |nu| {
        let c: Q = specs.iter().map(|s| fourier_coefficient(s, nu)).sum();
        if !c.is_zero() {
            let phase: f64 = nu.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
            total += Complex64::from_polar(to_f64(&c), 2.0 * std::f64::consts::PI * phase);
        }
        true
    });
    total
}

/// Bernoulli numbers B₀..B_n with B₁ = −1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    let mut b = vec![Q::one()];
    for m in 1..=n {
        let s: Q = (0..m).map(|k| Q::from_integer(poly::binomial(m as u32 + 1, k as u32)) * &b[k]).sum();
        b.push(-s / qi(m as i64 + 1));
    }
    b
}

/// B_n(t) = Σ_k binom(n,k) B_k t^{n−k}.
pub fn bernoulli_polynomial(n: u32, t: f64) -> f64 {
    let b = bernoulli_numbers(n as usize);
    (0..=n).map(|k| to_f64(&(Q::from_integer(poly::binomial(n, k)) * &b[k as usize])) * t.powi((n - k) as i32)).sum()
}

/// −(2πi)^n/n!·B_n({x}), the value of Σ_{ν≠0} e^{2πiνx}/ν^n.
pub fn bernoulli_reference(n: u32, x: f64) -> Result<Complex64, ConeError> {
    let frac = x - x.floor();
    if frac == 0.0 {
        return Err(ConeError::SingularSupport);
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let nf = factorial(n).to_f64().unwrap();
    Ok(-two_pi_i.powu(n) / nf * bernoulli_polynomial(n, frac))
}

/// Outcome of a coefficientwise identity check on a lattice box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxCheck {
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<Vec<i64>>,
}

/// F̂₁(ν₁)·F̂₂(ν₂) = Σ_σ F̂_σ(ν₁, ν₂) on [−M, M]^{d₁+d₂}, skipping points
/// on walls of the pieces (they carry lower-dimensional cones).
pub fn coefficient_shuffle_check(a: &FourierSpec, b: &FourierSpec, pieces: &[FourierSpec], m: i64) -> BoxCheck {
    let d1 = a.ambient();
    let d2 = b.ambient();
    let mut out = BoxCheck { passed: true, checked: 0, witness: None };
    for_box(d1 + d2, m, |nu| {
        let nq: QVector = nu.iter().map(|&x| qi(x)).collect();
        if pieces.iter().any(|p| p.cone.on_wall(&nq)) {
            return true;
        }
        let lhs = fourier_coefficient(a, &nu[..d1]) * fourier_coefficient(b, &nu[d1..]);
        let rhs: Q = pieces.iter().map(|p| fourier_coefficient(p, nu)).sum();
        out.checked += 1;
        if lhs != rhs {
            out.passed = false;
            out.witness = Some(nu.to_vec());
            return false;
        }
        true
    });
    out
}

/// The two orders of Li_{n₁,n₂} whose sum is Li_{n₁}·Li_{n₂} away from the diagonal.
pub fn shuffle_pieces(n1: u32, n2: u32) -> Vec<FourierSpec> {
    let e = |i| crate::qlinalg::unit_vector(2, i);
    let cone_a = Cone::new(2, &[vec![qi(1), qi(1)], e(1)], true).unwrap();
    let cone_b = Cone::new(2, &[vec![qi(1), qi(1)], e(0)], true).unwrap();
    vec![
        FourierSpec::new(cone_a, vec![e(0), e(1)], vec![n1, n2]).unwrap(),
        FourierSpec::new(cone_b, vec![e(0), e(1)], vec![n1, n2]).unwrap(),
    ]
}

/// F̂(Nν) = N^{−n} F̂(ν) on the box, for any coefficient function.
pub fn homogeneity_check_fn(d: usize, weight: u32, f: impl Fn(&[i64]) -> Q, n: i64, m: i64) -> BoxCheck {
    let mut out = BoxCheck { passed: true, checked: 0, witness: None };
    let scale = Q::from_integer(BigInt::from(n)).pow(-(weight as i32));
    for_box(d, m, |nu| {
        let scaled: Vec<i64> = nu.iter().map(|x| x * n).collect();
        out.checked += 1;
        if f(&scaled) != &scale * f(nu) {
            out.passed = false;
            out.witness = Some(nu.to_vec());
            return false;
        }
        true
    });
    out
}

pub fn homogeneity_check(spec: &FourierSpec, n: i64, m: i64) -> BoxCheck {
    homogeneity_check_fn(spec.ambient(), spec.weight(), |nu| fourier_coefficient(spec, nu), n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{qr, qvec, random_basis};
    use crate::steinberg::{flag_expand, make_apartment, normal_form};
    use crate::qlinalg::Flag;

    fn apt(v: &[&[i64]]) -> Apartment {
        Apartment::new(&v.iter().map(|x| qvec(x)).collect::<Vec<_>>()).unwrap().0
    }

    #[test]
    fn cone_examples() {
        let e = |i| crate::qlinalg::unit_vector(2, i);
        let c = Cone::new(2, &[e(0), e(1)], false).unwrap();
        assert_eq!(cone_to_steinberg(&c), make_apartment(&[e(0), e(1)]));
        assert!(cone_to_steinberg(&Cone::new(2, &[e(0)], false).unwrap()).is_empty());
        let swapped = Cone::new(2, &[e(1), e(0)], false).unwrap();
        assert_eq!(cone_to_steinberg(&swapped), make_apartment(&[e(0), e(1)]));
        assert!(c.contains(&qvec(&[0, 3])));
        assert!(!Cone::new(2, &[e(0), e(1)], true).unwrap().contains(&qvec(&[0, 3])));
    }

    #[test]
    fn rho_examples() {
        let z = qvec(&[2, 3]);
        let one = poly::one(2);
        let e12 = st_sym_of(&make_apartment(&[qvec(&[1, 0]), qvec(&[0, 1])]));
        assert_eq!(eval_pfrac(&rho_st_sym(&e12).unwrap(), &z).unwrap(), qr(1, 6));
        // keys are sorted: [e₂, e₁] carries the transposition sign
        let a = rho(&apt(&[&[1, 0], &[0, 1]]), &one).unwrap();
        assert_eq!(eval_pfrac(&a, &z).unwrap(), qr(-1, 6));
        // [e₁,e₂] − [e₁,e₁+e₂] − [e₁+e₂,e₂]
        let mut x = make_apartment(&[qvec(&[1, 0]), qvec(&[0, 1])]);
        x.add_apartment(&[qvec(&[1, 0]), qvec(&[1, 1])], qi(-1));
        x.add_apartment(&[qvec(&[1, 1]), qvec(&[0, 1])], qi(-1));
        let terms = rho_st_sym(&st_sym_of(&x)).unwrap();
        assert_eq!(eval_pfrac(&terms, &z).unwrap(), qi(0));
        let one_d = rho_weighted(&apt(&[&[5]]), &[3]).unwrap();
        assert_eq!(one_d[0].degree(), -3);
        assert_eq!(eval_pfrac(&one_d, &[qi(2)]).unwrap(), qr(1, 8));
    }

    #[test]
    fn rho_symmetric_part_matches_weighted_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let v = random_basis(&mut rng, 2, 4);
            let (a, s) = Apartment::new(&v).unwrap();
            let direct: Vec<PartialFractionTerm> = {
                let dual = dual_basis(&v).unwrap();
                vec![PartialFractionTerm { coeff: det_of_vectors(&dual), factors: vec![(dual[0].clone(), 3), (dual[1].clone(), 2)] }]
            };
            let f = poly::divided_power_product(&v, &[3, 2], 2);
            let via = rho(&a, &f).unwrap();
            let z = qvec(&[7, 11]);
            assert_eq!(eval_pfrac(&via, &z).unwrap() * qi(s as i64), eval_pfrac(&direct, &z).unwrap());
        }
    }

    #[test]
    fn oracle_agrees_with_normal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = OracleConfig::default();
        for t in 0..20 {
            let d = 2 + t % 3;
            let mut x = make_apartment(&random_basis(&mut rng, d, 3));
            x.add_assign(&make_apartment(&random_basis(&mut rng, d, 3)).scaled(&qi(-2)));
            let f = flag_expand(&x, &Flag::standard(d)).unwrap();
            assert!(st_oracle_is_zero(&x.sub(&f), &cfg).unwrap());
            assert_eq!(st_oracle_is_zero(&x, &cfg).unwrap(), normal_form(&x).is_empty());
        }
    }

    #[test]
    fn st2_oracle() {
        use crate::st2::{double_shuffle_defect, make_l, Family};
        let cfg = OracleConfig::default();
        let v = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        assert!(!st2_equality_oracle(&make_l(&v).unwrap(), &cfg).unwrap());
        let w = vec![qvec(&[2, 1]), qvec(&[-1, 3])];
        assert!(st2_equality_oracle(&double_shuffle_defect(Family::L, &w, 1).unwrap(), &cfg).unwrap());
    }

    #[test]
    fn fourier_coefficients() {
        let s = FourierSpec::standard(&[2, 1]);
        assert_eq!(fourier_coefficient(&s, &[2, 5]), qr(1, 20));
        assert_eq!(fourier_coefficient(&s, &[5, 2]), qi(0));
        assert_eq!(fourier_coefficient(&s, &[3, 3]), qi(0));
        assert_eq!(fourier_coefficient(&s, &[0, 3]), qi(0));
        let closed = FourierSpec::new(Cone::new(2, &[qvec(&[1, 1]), qvec(&[0, 1])], false).unwrap(), s.u.clone(), vec![2, 1]).unwrap();
        assert_eq!(fourier_coefficient(&closed, &[0, 3]), qi(0));
    }

    #[test]
    fn bernoulli() {
        let b = bernoulli_numbers(4);
        assert_eq!(b, vec![qi(1), qr(-1, 2), qr(1, 6), qi(0), qr(-1, 30)]);
        assert!((bernoulli_polynomial(2, 0.25) - (0.0625 - 0.25 + 1.0 / 6.0)).abs() < 1e-15);
        assert_eq!(bernoulli_reference(2, 0.0), Err(ConeError::SingularSupport));
        let specs = bernoulli_specs(2);
        let s = truncated_fourier_sum(&specs, &[1.0 / 3.0], 10_000);
        assert!((s - bernoulli_reference(2, 1.0 / 3.0).unwrap()).norm() < 1e-6);
        let s1 = truncated_fourier_sum(&bernoulli_specs(1), &[1.0 / 3.0], 10_000);
        let r1 = Complex64::new(0.0, -2.0 * std::f64::consts::PI * (1.0 / 3.0 - 0.5));
        assert!((s1 - r1).norm() < 1e-2);
    }

    #[test]
    fn shuffle_and_homogeneity() {
        let a = FourierSpec::standard(&[1]);
        let good = coefficient_shuffle_check(&a, &a, &shuffle_pieces(1, 1), 25);
        assert!(good.passed && good.checked > 0);
        let bad = coefficient_shuffle_check(&a, &a, &shuffle_pieces(2, 1), 25);
        assert!(!bad.passed && bad.witness.is_some());
        assert!(coefficient_shuffle_check(&a, &a, &shuffle_pieces(1, 1), 0).passed);
        let s = FourierSpec::standard(&[2, 1]);
        for n in 1..=3 {
            assert!(homogeneity_check(&s, n, 6).passed);
        }
        let broken = |nu: &[i64]| fourier_coefficient(&s, nu) + if nu.iter().any(|&x| x != 0) { qi(1) } else { qi(0) };
        assert!(!homogeneity_check_fn(2, 3, broken, 2, 3).passed);
    }
}
