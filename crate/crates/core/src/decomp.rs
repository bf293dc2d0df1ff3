//! Special decomposition f(X+Y) = s0(Y) (H(X,Y)^p - sum_{i>r} A_i(Y) X^i).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::numfield::{Field, FieldElement, Val};
use crate::polyalg::{Poly, RatFunc, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error("degree {n} is divisible by p = {p}")]
    DegreeDivisibleByP { n: usize, p: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("A_{0} * s0^{0} is not a polynomial")]
    NonPolynomialTail(usize),
}

/// -v_p of binom(1/p, t) is t + floor(t/p) + floor(t/p^2) + ...; this returns v_p itself.
pub fn binom_val(p: u64, t: u64) -> i64 {
    let mut acc = t as i64;
    let mut q = p;
    while q <= t {
        acc += (t / q) as i64;
        q = match q.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    -acc
}

/// Exact value of binom(1/p, t).
pub fn binom_frac(p: u64, t: u64) -> BigRational {
    let a = BigRational::new(BigInt::one(), BigInt::from(p));
    let mut acc = BigRational::one();
    for i in 0..t {
        acc = acc * (&a - BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

/// Representative data: r, M0 = {r+1..n} and the unique p-power p^alpha in M0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepData {
    pub n: usize,
    pub p: u64,
    pub r: usize,
    pub alpha: u32,
    pub p_alpha: usize,
}

impl RepData {
    pub fn m0(&self) -> std::ops::RangeInclusive<usize> {
        self.r + 1..=self.n
    }
}

/// Prime-to-p part of i.
pub fn prime_to_p(mut i: usize, p: u64) -> usize {
    let p = p as usize;
    while i > 0 && i % p == 0 {
        i /= p;
    }
    i
}

pub fn min_reps(n: usize, p: u64) -> Result<RepData, DecompError> {
    if n == 0 {
        return Err(DecompError::PreconditionViolation("degree must be positive".into()));
    }
    if n as u64 % p == 0 {
        return Err(DecompError::DegreeDivisibleByP { n, p });
    }
    let pu = p as usize;
    let r = (n - 1) / pu;
    let mut p_alpha = 1usize;
    let mut alpha = 0u32;
    while p_alpha * pu <= n {
        p_alpha *= pu;
        alpha += 1;
    }
    let rep = RepData { n, p, r, alpha, p_alpha };
    // each j in 1..=n is related to exactly one m in M0 by a power of p
    for j in 1..=n {
        let count = rep
            .m0()
            .filter(|&m| (m % j == 0 && is_p_power(m / j, p)) || (j % m == 0 && is_p_power(j / m, p)))
            .count();
        if count != 1 {
            return Err(DecompError::PreconditionViolation(format!("representative property fails at {j}")));
        }
    }
    Ok(rep)
}

fn is_p_power(mut x: usize, p: u64) -> bool {
    let p = p as usize;
    while x > 1 && x % p == 0 {
        x /= p;
    }
    x == 1
}

/// Tail term A_i = c_i N_i / s0^i with N_i monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailTerm {
    pub i: usize,
    pub a: RatFunc,
    pub c: FieldElement,
    pub n: Poly,
}

#[derive(Clone, Debug)]
pub struct SpecialDecomposition {
    pub rep: RepData,
    /// Taylor coefficients s_0..s_n of f(X+Y).
    pub s: Vec<Poly>,
    /// H = h_num / s0^r, with h_num[i] the X^i coefficient (a polynomial in Y).
    pub h_num: Vec<Poly>,
    /// a_i for i = 1..=r at index i - 1.
    pub head: Vec<RatFunc>,
    pub tail: Vec<TailTerm>,
}

impl SpecialDecomposition {
    pub fn s0(&self) -> &Poly {
        &self.s[0]
    }

    pub fn field(&self) -> &Field {
        self.s[0].field()
    }

    pub fn tail_term(&self, i: usize) -> Option<&TailTerm> {
        self.tail.iter().find(|t| t.i == i)
    }

    /// Checks f(X+Y) = s0 (H^p - sum A_i X^i) coefficientwise.
    pub fn check_identity(&self) -> bool {
        let p = self.rep.p as u32;
        let r = self.rep.r as u32;
        let s0 = self.s0();
        let hp = bipow(&self.h_num, p, None);
        let denom = s0.pow(r * p);
        let top = hp.len().max(self.s.len());
        for i in 0..top {
            // s0 * [X^i]H^p - s0 * A_i should equal s_i
            let hp_i = RatFunc::new(hp.get(i).cloned().unwrap_or_else(|| Poly::zero(self.field(), Var::Y)), denom.clone());
            let mut rhs = hp_i;
            if let Some(t) = self.tail_term(i) {
                rhs = rhs.sub(&t.a);
            }
            let lhs = rhs.mul_poly(s0);
            let si = self.s.get(i).cloned().unwrap_or_else(|| Poly::zero(self.field(), Var::Y));
            if lhs != RatFunc::from_poly(si) {
                return false;
            }
        }
        true
    }
}

/// Product of bivariate polys stored as X-coefficient vectors.
pub(crate) fn bimul(a: &[Poly], b: &[Poly], trunc: Option<usize>) -> Vec<Poly> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut len = a.len() + b.len() - 1;
    if let Some(t) = trunc {
        len = len.min(t);
    }
    let field = a[0].field().clone();
    let mut out = vec![Poly::zero(&field, Var::Y); len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j < len && !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

pub(crate) fn bipow(a: &[Poly], n: u32, trunc: Option<usize>) -> Vec<Poly> {
    let field = a[0].field().clone();
    let mut acc = vec![Poly::one(&field, Var::Y)];
    let mut base = a.to_vec();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = bimul(&acc, &base, trunc);
        }
        n >>= 1;
        if n > 0 {
            base = bimul(&base, &base, trunc);
        }
    }
    acc
}

/// Power-series route: H s0^r = sum_{t<=r} binom(1/p,t) G^t s0^(r-t) mod X^(r+1), G = sum_{i>=1} s_i X^i.
pub fn special_decomposition(f: &Poly, rep: &RepData) -> Result<SpecialDecomposition, DecompError> {
    let field = f.field().clone();
    let n = f.degree().ok_or_else(|| DecompError::PreconditionViolation("f is zero".into()))?;
    if n != rep.n {
        return Err(DecompError::PreconditionViolation(format!("deg f = {n} but RepData has n = {}", rep.n)));
    }
    if !f.is_monic() {
        return Err(DecompError::PreconditionViolation("f is not monic".into()));
    }
    if f.coeffs().iter().any(|c| c.valuation() < Val::zero()) {
        return Err(DecompError::PreconditionViolation("f has non-integral coefficients".into()));
    }
    let s = f.taylor_shift();
    let s0 = s[0].clone();
    let r = rep.r;
    let p = rep.p;

    let mut g = vec![Poly::zero(&field, Var::Y)];
    g.extend(s[1..].iter().take(r).cloned());
    let mut h_num = vec![Poly::zero(&field, Var::Y); r + 1];
    let mut gt = vec![Poly::one(&field, Var::Y)];
    for t in 0..=r {
        let coef = FieldElement::from_rational(&field, &binom_frac(p, t as u64));
        let w = s0.pow((r - t) as u32).scale(&coef);
        for (i, gi) in gt.iter().enumerate().take(r + 1) {
            h_num[i] = h_num[i].add(&gi.mul(&w));
        }
        gt = bimul(&gt, &g, Some(r + 1));
    }
    let s0r = s0.pow(r as u32);
    let head = (1..=r).map(|i| RatFunc::new(h_num[i].clone(), s0r.clone())).collect();

    let hp = bipow(&h_num, p as u32, None);
    let s0rp = s0.pow((r * p as usize) as u32);
    let mut tail = Vec::new();
    for i in rep.m0() {
        let hp_i = RatFunc::new(hp.get(i).cloned().unwrap_or_else(|| Poly::zero(&field, Var::Y)), s0rp.clone());
        let a = hp_i.sub(&RatFunc::new(s[i].clone(), s0.clone()));
        tail.push(normalize_term(i, a, &s0)?);
    }
    Ok(SpecialDecomposition { rep: rep.clone(), s, h_num, head, tail })
}

fn normalize_term(i: usize, a: RatFunc, s0: &Poly) -> Result<TailTerm, DecompError> {
    let scaled = a.mul_poly(&s0.pow(i as u32));
    if !scaled.is_poly() || scaled.num.is_zero() {
        return Err(DecompError::NonPolynomialTail(i));
    }
    let poly = scaled.num.scale(&scaled.den.lc().inv().unwrap());
    let c = poly.lc();
    let n = poly.monic();
    Ok(TailTerm { i, a, c, n })
}

/// Recomputes the normalized tail (c_i, N_i) from the stored A_i.
pub fn normalize_tail(dec: &SpecialDecomposition) -> Result<SpecialDecomposition, DecompError> {
    let mut out = dec.clone();
    for t in out.tail.iter_mut() {
        *t = normalize_term(t.i, t.a.clone(), dec.s0())?;
    }
    Ok(out)
}

/// Whether v(c_{p^alpha}) = p * binom_val(p, p^(alpha-1)); meaningful when p does not divide m.
pub fn c_p_alpha_valuation_ok(dec: &SpecialDecomposition) -> bool {
    let rep = &dec.rep;
    let expected = if rep.alpha == 0 { 0 } else { rep.p as i64 * binom_val(rep.p, (rep.p_alpha / rep.p as usize) as u64) };
    dec.tail_term(rep.p_alpha).map(|t| t.c.valuation()) == Some(Val::from_int(expected))
}

/// Second code path: a_k from the linear recursion on the X^k coefficient of H^p.
pub fn head_by_recursion(f: &Poly, rep: &RepData) -> Vec<RatFunc> {
    let field = f.field().clone();
    let s = f.taylor_shift();
    let s0 = s[0].clone();
    let p = rep.p as u32;
    let pinv = FieldElement::from_int(&field, p as i64).inv().unwrap();
    let mut head: Vec<RatFunc> = Vec::new();
    for k in 1..=rep.r {
        // [X^k] of (1 + sum_{i<k} a_i X^i)^p with a_k = 0
        let mut h = vec![RatFunc::from_poly(Poly::one(&field, Var::Y))];
        h.extend(head.iter().cloned());
        let mut acc = vec![RatFunc::from_poly(Poly::one(&field, Var::Y))];
        for _ in 0..p {
            let mut next = vec![RatFunc::zero(&field, Var::Y); (acc.len() + h.len() - 1).min(k + 1)];
            for (i, x) in acc.iter().enumerate() {
                for (j, y) in h.iter().enumerate() {
                    if i + j <= k && !x.is_zero() && !y.is_zero() {
                        next[i + j] = next[i + j].add(&x.mul(y));
                    }
                }
            }
            acc = next;
        }
        let known = acc.get(k).cloned().unwrap_or_else(|| RatFunc::zero(&field, Var::Y));
        let target = RatFunc::new(s[k].clone(), s0.clone());
        head.push(target.sub(&known).scale(&pinv));
    }
    head
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::ramified;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn binom_val_examples() {
        assert_eq!(binom_val(2, 1), -1);
        assert_eq!(binom_val(2, 2), -3);
        assert_eq!(binom_val(5, 0), 0);
        assert_eq!(binom_frac(2, 2), q(-1, 8));
        for p in [2u64, 3, 5] {
            for t in 0..=50 {
                let v = crate::numfield::vp_rat(&binom_frac(p, t), p);
                assert_eq!(v, Val::from_int(binom_val(p, t)), "p={p} t={t}");
            }
        }
    }

    #[test]
    fn min_reps_examples() {
        let r = min_reps(5, 2).unwrap();
        assert_eq!((r.r, r.p_alpha, r.alpha), (2, 4, 2));
        assert_eq!(r.m0().collect::<Vec<_>>(), vec![3, 4, 5]);
        let r = min_reps(4, 3).unwrap();
        assert_eq!((r.r, r.p_alpha), (1, 3));
        let r = min_reps(1, 2).unwrap();
        assert_eq!((r.r, r.p_alpha, r.alpha), (0, 1, 0));
        assert_eq!(min_reps(6, 3), Err(DecompError::DegreeDivisibleByP { n: 6, p: 3 }));
    }

    #[test]
    fn cubic_p2() {
        let f = ramified(2, 1).unwrap();
        let fx = Poly::from_ints(&f, Var::X0, &[1, 0, 0, 1]);
        let rep = min_reps(3, 2).unwrap();
        let dec = special_decomposition(&fx, &rep).unwrap();
        let s0 = Poly::from_ints(&f, Var::Y, &[1, 0, 0, 1]);
        let a1 = RatFunc::new(Poly::from_ints(&f, Var::Y, &[0, 0, 3]), s0.scale(&FieldElement::from_int(&f, 2)));
        assert_eq!(dec.head, vec![a1]);
        let a2 = RatFunc::new(Poly::from_ints(&f, Var::Y, &[0, -12, 0, 0, -3]), s0.pow(2).scale(&FieldElement::from_int(&f, 4)));
        assert_eq!(dec.tail_term(2).unwrap().a, a2);
        let a3 = RatFunc::new(Poly::from_ints(&f, Var::Y, &[-1]), s0.clone());
        assert_eq!(dec.tail_term(3).unwrap().a, a3);
        assert!(dec.check_identity());
        let t2 = dec.tail_term(2).unwrap();
        assert_eq!(t2.c, FieldElement::from_rational(&f, &q(-3, 4)));
        assert_eq!(t2.n, Poly::from_ints(&f, Var::Y, &[0, 4, 0, 0, 1]));
        let t3 = dec.tail_term(3).unwrap();
        assert_eq!(t3.c, FieldElement::from_int(&f, -1));
        assert_eq!(t3.n, s0.pow(2));
        assert!(c_p_alpha_valuation_ok(&dec));
        assert_eq!(head_by_recursion(&fx, &rep), dec.head);
    }

    #[test]
    fn cubic_p5_r0() {
        let f = ramified(5, 1).unwrap();
        let fx = Poly::from_ints(&f, Var::X0, &[1, 0, 0, 1]);
        let dec = special_decomposition(&fx, &min_reps(3, 5).unwrap()).unwrap();
        assert!(dec.head.is_empty());
        let s = fx.taylor_shift();
        for i in 1..=3 {
            assert_eq!(dec.tail_term(i).unwrap().a, RatFunc::new(s[i].neg(), s[0].clone()));
        }
        let t1 = dec.tail_term(1).unwrap();
        assert_eq!(t1.c, FieldElement::from_int(&f, -3));
        assert_eq!(t1.n, Poly::from_ints(&f, Var::Y, &[0, 0, 1]));
        assert!(dec.check_identity());
    }

    #[test]
    fn quintic_identity() {
        let f = ramified(2, 1).unwrap();
        let fx = Poly::from_ints(&f, Var::X0, &[1, 0, 0, 0, 1, 1]);
        let rep = min_reps(5, 2).unwrap();
        let dec = special_decomposition(&fx, &rep).unwrap();
        assert!(dec.check_identity());
        assert_eq!(head_by_recursion(&fx, &rep), dec.head);
        let t5 = dec.tail_term(5).unwrap();
        assert_eq!(t5.c, FieldElement::from_int(&f, -1));
        assert_eq!(t5.n, dec.s0().pow(4));
        assert_eq!(t5.a, RatFunc::new(Poly::from_ints(&f, Var::Y, &[-1]), dec.s0().clone()));
        let t3 = dec.tail_term(3).unwrap();
        assert_eq!(t3.c, FieldElement::from_rational(&f, &q(-5, 8)));
    }

    #[test]
    fn rejects_non_monic() {
        let f = ramified(2, 1).unwrap();
        let fx = Poly::from_ints(&f, Var::X0, &[1, 0, 0, 2]);
        assert!(matches!(special_decomposition(&fx, &min_reps(3, 2).unwrap()), Err(DecompError::PreconditionViolation(_))));
    }
}
