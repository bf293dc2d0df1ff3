//! S0, S1 and the monodromy polynomial L(Y).

use thiserror::Error;

use crate::decomp::{binom_frac, SpecialDecomposition};
use crate::numfield::{FieldElement, Val};
use crate::polyalg::{Poly, RatFunc, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoError {
    #[error("deg L = {got}, expected p^alpha (m - 1) = {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("monodromy polynomial has a coefficient of valuation {0}")]
    NonIntegralMonodromyPolynomial(Val),
    #[error("-A_(p^alpha) S0^(p^alpha) is not a polynomial")]
    NotAPolynomial,
}

#[derive(Clone, Debug)]
pub struct MonodromyData {
    pub s0: Poly,
    pub s1: Poly,
    pub m: usize,
    pub alpha: u32,
    pub p_alpha: usize,
    pub c_norm: FieldElement,
    pub l: Poly,
}

impl MonodromyData {
    pub fn expected_degree(&self) -> usize {
        self.p_alpha * (self.m - 1)
    }
}

/// (S0, S1, m) with S1/S0 = f'/f reduced and S0 monic.
pub fn logderiv_parts(f: &Poly) -> (Poly, Poly, usize) {
    let fy = f.with_var(Var::Y);
    let d = fy.derivative();
    let g = fy.gcd(&d);
    let s0 = fy.div_exact(&g).expect("gcd divides f").monic();
    let lc = fy.lc();
    // f = lc * g * S0 with S0, g monic, so S1 = f'/(lc g) keeps S1/S0 = f'/f
    let s1 = d.div_exact(&g).expect("gcd divides f'").scale(&lc.inv().unwrap());
    let m = s0.deg();
    (s0, s1, m)
}

/// L = -A_{p^alpha} S0^{p^alpha} / c_norm with c_norm = binom(1/p, p^(alpha-1))^p (1 when alpha = 0).
///
/// For odd p and alpha >= 1 the sign flips: expanding H^p shows the leading
/// part of A_{p^alpha} S0^{p^alpha} / c_norm is +S1^{p^alpha}, and only the
/// flipped sign keeps L = S1^{p^alpha} mod p. For p = 2 the two signs agree
/// mod p and the minus sign is kept.
pub fn monodromy_polynomial(dec: &SpecialDecomposition, f: &Poly) -> Result<MonodromyData, MonoError> {
    let field = dec.field().clone();
    let (s0, s1, m) = logderiv_parts(f);
    let rep = &dec.rep;
    let c_norm = if rep.alpha == 0 {
        FieldElement::one(&field)
    } else {
        FieldElement::from_rational(&field, &binom_frac(rep.p, (rep.p_alpha / rep.p as usize) as u64)).pow(rep.p as u32)
    };
    let a = &dec.tail_term(rep.p_alpha).expect("p^alpha lies in M0").a;
    let flip = rep.p != 2 && rep.alpha >= 1;
    let k = if flip { c_norm.inv().unwrap() } else { -c_norm.inv().unwrap() };
    let scaled: RatFunc = a.mul_poly(&s0.pow(rep.p_alpha as u32)).scale(&k);
    if !scaled.is_poly() {
        return Err(MonoError::NotAPolynomial);
    }
    let l = scaled.num.scale(&scaled.den.lc().inv().unwrap());
    let md = MonodromyData { s0, s1, m, alpha: rep.alpha, p_alpha: rep.p_alpha, c_norm, l };
    let got = md.l.degree().unwrap_or(0);
    if got != md.expected_degree() {
        return Err(MonoError::DegreeMismatch { expected: md.expected_degree(), got });
    }
    if let Some(v) = md.l.coeffs().iter().map(|c| c.valuation()).find(|v| *v < Val::zero()) {
        return Err(MonoError::NonIntegralMonodromyPolynomial(v));
    }
    Ok(md)
}

/// True iff every coefficient of L - S1^{p^alpha} has valuation >= 1.
pub fn check_congruence(md: &MonodromyData) -> bool {
    congruent_mod_p(&md.l, &md.s1.pow(md.p_alpha as u32))
}

pub fn congruent_mod_p(a: &Poly, b: &Poly) -> bool {
    a.sub(b).coeffs().iter().all(|c| c.valuation() >= Val::from_int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{min_reps, special_decomposition};
    use crate::numfield::ramified;

    fn run(p: u64, c: &[i64]) -> MonodromyData {
        let f = ramified(p, 1).unwrap();
        let fx = Poly::from_ints(&f, Var::X0, c);
        let dec = special_decomposition(&fx, &min_reps(fx.deg(), p).unwrap()).unwrap();
        monodromy_polynomial(&dec, &fx).unwrap()
    }

    #[test]
    fn logderiv_examples() {
        let f = ramified(2, 1).unwrap();
        let (s0, s1, m) = logderiv_parts(&Poly::from_ints(&f, Var::X0, &[1, 0, 0, 0, 1, 1]));
        assert_eq!(s1, Poly::from_ints(&f, Var::Y, &[0, 0, 0, 4, 5]));
        assert_eq!(s0, Poly::from_ints(&f, Var::Y, &[1, 0, 0, 0, 1, 1]));
        assert_eq!(m, 5);
        let g = ramified(3, 1).unwrap();
        let (s0, s1, m) = logderiv_parts(&Poly::from_ints(&g, Var::X0, &[1, 2, 1]));
        assert_eq!((s0, s1, m), (Poly::from_ints(&g, Var::Y, &[1, 1]), Poly::from_ints(&g, Var::Y, &[2]), 1));
        let (s0, s1, m) = logderiv_parts(&Poly::from_ints(&g, Var::X0, &[1, 1]));
        assert_eq!((s0, s1, m), (Poly::from_ints(&g, Var::Y, &[1, 1]), Poly::from_ints(&g, Var::Y, &[1]), 1));
    }

    #[test]
    fn cubic_p2() {
        let md = run(2, &[1, 0, 0, 1]);
        assert_eq!(md.l, Poly::from_ints(md.l.field(), Var::Y, &[0, 12, 0, 0, 3]));
        assert!(check_congruence(&md));
        let mut bad = md.clone();
        bad.l = bad.l.add(&Poly::one(md.l.field(), Var::Y));
        assert!(!check_congruence(&bad));
    }

    #[test]
    fn cubic_p5_alpha0() {
        let md = run(5, &[1, 0, 0, 1]);
        assert_eq!(md.l, Poly::from_ints(md.l.field(), Var::Y, &[0, 0, 3]));
        assert_eq!(md.l, md.s1);
        assert!(check_congruence(&md));
    }

    #[test]
    fn quintic_p2() {
        let md = run(2, &[1, 0, 0, 0, 1, 1]);
        assert_eq!(md.l.deg(), 16);
        let expect = [64, 320, 0, 0, -384, -768, -640, 0, -192, -448, -528, -240, 0, 128, 336, 304, 95];
        assert_eq!(md.l, Poly::from_ints(md.l.field(), Var::Y, &expect));
        assert!(check_congruence(&md));
    }

    /// p = 3, n = 4: L = s1^3 - 27 s3 s0^2 by expanding H^3 with H = 1 + s1/(3 s0) X.
    #[test]
    fn scaled_gud_sign() {
        let f = crate::numfield::ramified(3, 4).unwrap();
        let pi3 = FieldElement::pi_pow(&f, 3);
        let one = FieldElement::one(&f);
        let z = FieldElement::zero(&f);
        let fx = Poly::new(&f, Var::X0, vec![one.clone(), z.clone(), z.clone(), pi3, one]);
        let dec = special_decomposition(&fx, &min_reps(4, 3).unwrap()).unwrap();
        let md = monodromy_polynomial(&dec, &fx).unwrap();
        let s = fx.taylor_shift();
        let oracle = s[1].pow(3).sub(&s[3].mul(&s[0].pow(2)).scale(&FieldElement::from_int(&f, 27)));
        assert_eq!(md.l, oracle);
        assert_eq!(md.l.deg(), 9);
        assert!(check_congruence(&md));
    }

    #[test]
    fn congruence_odd_p_alpha1() {
        for (p, c) in [(3u64, vec![1i64, 1, 0, 0, 1]), (3, vec![2, 0, 1, 1, 1]), (5, vec![1, 1, 0, 0, 0, 0, 1])] {
            let md = run(p, &c);
            assert_eq!(md.l.deg(), md.expected_degree());
            assert!(check_congruence(&md), "p={p} f={c:?}");
        }
    }
}
