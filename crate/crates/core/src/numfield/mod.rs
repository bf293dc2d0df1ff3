//! Exact arithmetic in K = Q(u, pi) with pi^e = p and u a root of a monic
//! integer lift U of an irreducible polynomial over F_p.
//!
//! Elements are stored as an integer coefficient matrix over a single
//! positive denominator, indexed `i * e + j` for the monomial u^i pi^j.
//! Because U is monic with integer coefficients and pi^e = p, reduction never
//! leaves the integers, which keeps multiplication gcd-free until the final
//! normalization.

mod residue;
mod val;

pub use residue::{ResidueElement, ResiduePoly};
pub use val::Val;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Field = Arc<FieldDescriptor>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue modulus is not monic irreducible over F_p")]
    ReducibleModulus,
    #[error("ramification index must be positive")]
    BadRamification,
    #[error("element has negative valuation {0}")]
    NonIntegral(Val),
    #[error("cannot embed e={from_e},k={from_k} into e={to_e},k={to_k}")]
    IncompatibleExtension { from_e: u32, from_k: u32, to_e: u32, to_k: u32 },
}

/// Shape of the working field. Immutable once built; share it as [`Field`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    pub p: u64,
    pub e: u32,
    pub k: u32,
    /// Ascending coefficients in `0..p`, monic, length `k + 1`.
    pub residue_modulus: Vec<u64>,
    pub precision_cap: Option<Rational64>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds the descriptor after checking primality and irreducibility.
pub fn make_field(p: u64, e: u32, residue_modulus: &[u64]) -> Result<Field, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if e == 0 {
        return Err(FieldError::BadRamification);
    }
    let m: Vec<u64> = residue_modulus.iter().map(|c| c % p).collect();
    if m.len() < 2 || *m.last().unwrap() != 1 {
        return Err(FieldError::ReducibleModulus);
    }
    if !residue::fp_is_irreducible(&m, p) {
        return Err(FieldError::ReducibleModulus);
    }
    Ok(Arc::new(FieldDescriptor {
        p,
        e,
        k: (m.len() - 1) as u32,
        residue_modulus: m,
        precision_cap: None,
    }))
}

/// Shorthand for the totally ramified field with trivial residue extension.
pub fn ramified(p: u64, e: u32) -> Result<Field, FieldError> {
    make_field(p, e, &[0, 1])
}

impl FieldDescriptor {
    pub fn with_precision_cap(&self, cap: Option<Rational64>) -> Field {
        let mut d = self.clone();
        d.precision_cap = cap;
        Arc::new(d)
    }

    pub fn dim(&self) -> usize {
        (self.e * self.k) as usize
    }

    /// v(lambda^p) = p/(p-1) for lambda = zeta_p - 1.
    pub fn lambda_p_valuation(&self) -> Rational64 {
        Rational64::new(self.p as i64, self.p as i64 - 1)
    }

    pub fn lift_modulus(&self) -> Vec<BigInt> {
        self.residue_modulus.iter().map(|&c| BigInt::from(c)).collect()
    }

    pub fn uniformizer_valuation(&self) -> Rational64 {
        Rational64::new(1, self.e as i64)
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0) as i64;
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn vp_rat(x: &BigRational, p: u64) -> Val {
    if x.is_zero() {
        Val::Inf
    } else {
        Val::from_int(vp_int(x.numer(), p) - vp_int(x.denom(), p))
    }
}

#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    num: Vec<BigInt>,
    den: BigInt,
}

impl FieldElement {
    pub fn zero(field: &Field) -> Self {
        FieldElement { field: field.clone(), num: vec![BigInt::zero(); field.dim()], den: BigInt::one() }
    }

    pub fn one(field: &Field) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Field, n: i64) -> Self {
        Self::from_bigint(field, BigInt::from(n))
    }

    pub fn from_bigint(field: &Field, n: BigInt) -> Self {
        let mut x = Self::zero(field);
        x.num[0] = n;
        x
    }

    pub fn from_rational(field: &Field, q: &BigRational) -> Self {
        let mut x = Self::zero(field);
        x.num[0] = q.numer().clone();
        x.den = q.denom().clone();
        x.normalize();
        x
    }

    /// Builds sum c[i][j] u^i pi^j; out-of-range exponents are reduced.
    pub fn from_coeffs(field: &Field, coeffs: &[Vec<BigRational>]) -> Self {
        let mut acc = Self::zero(field);
        for (i, row) in coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = Self::from_rational(field, c) * Self::u_pow(field, i as u32) * Self::pi_pow(field, j as i64);
                acc = acc + term;
            }
        }
        acc
    }

    pub fn pi(field: &Field) -> Self {
        Self::pi_pow(field, 1)
    }

    /// pi^n for any integer n (negative powers use pi^-1 = pi^(e-1)/p).
    pub fn pi_pow(field: &Field, n: i64) -> Self {
        let e = field.e as i64;
        let q = n.div_euclid(e);
        let j = n.rem_euclid(e) as usize;
        let mut x = Self::zero(field);
        let pq = BigInt::from(field.p).pow(q.unsigned_abs() as u32);
        if q >= 0 {
            x.num[j] = pq;
        } else {
            x.num[j] = BigInt::one();
            x.den = pq;
        }
        x
    }

    pub fn u(field: &Field) -> Self {
        Self::u_pow(field, 1)
    }

    pub fn u_pow(field: &Field, n: u32) -> Self {
        let mut x = Self::one(field);
        if field.k == 1 {
            // U(u) = u + c, so u = -c.
            let c = -BigInt::from(field.residue_modulus[0]);
            return Self::from_bigint(field, c.pow(n));
        }
        let mut g = Self::zero(field);
        g.num[field.e as usize] = BigInt::one();
        for _ in 0..n {
            x = x * g.clone();
        }
        x
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// Rational coefficient of u^i pi^j in the canonical form.
    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.num[i * self.field.e as usize + j].clone(), self.den.clone())
    }

    pub fn coeff_matrix(&self) -> Vec<Vec<BigRational>> {
        let (k, e) = (self.field.k as usize, self.field.e as usize);
        (0..k).map(|i| (0..e).map(|j| self.coeff(i, j)).collect()).collect()
    }

    /// Some(q) when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    fn normalize(&mut self) {
        if self.is_zero() {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if self.den.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for c in self.num.iter_mut() {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    /// min over nonzero terms of v_p(c_ij) + j/e.
    pub fn valuation(&self) -> Val {
        if self.is_zero() {
            return Val::Inf;
        }
        let p = self.field.p;
        let e = self.field.e as i64;
        let vd = vp_int(&self.den, p);
        let mut best: Option<Rational64> = None;
        for (idx, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = (idx % e as usize) as i64;
            let v = Rational64::new((vp_int(c, p) - vd) * e + j, e);
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Val::Fin(best.unwrap())
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        let mut x = self.clone();
        for c in x.num.iter_mut() {
            *c = &*c * n;
        }
        x.normalize();
        x
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        let mut x = self.clone();
        for c in x.num.iter_mut() {
            *c = &*c * q.numer();
        }
        x.den = &x.den * q.denom();
        x.normalize();
        x
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer matrix of multiplication by the numerator vector, column b = num * basis_b.
    fn mult_matrix(&self) -> Vec<Vec<BigInt>> {
        let n = self.field.dim();
        let mut cols = Vec::with_capacity(n);
        for b in 0..n {
            let mut basis = Self::zero(&self.field);
            basis.num[b] = BigInt::one();
            let mut s = self.clone();
            s.den = BigInt::one();
            cols.push(mul_num(&self.field, &s.num, &basis.num));
        }
        (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.field.dim();
        if n == 1 {
            let q = BigRational::new(self.den.clone(), self.num[0].clone());
            return Some(Self::from_rational(&self.field, &q));
        }
        if self.field.k == 1 {
            return Some(self.inv_xgcd());
        }
        let m = self.mult_matrix();
        let mut rhs = vec![BigInt::zero(); n];
        rhs[0] = BigInt::one();
        let (sol, det) = bareiss_solve(m, rhs)?;
        let mut x = Self::zero(&self.field);
        x.num = sol.into_iter().map(|c| c * &self.den).collect();
        x.den = det;
        x.normalize();
        Some(x)
    }

    /// Inverse for k = 1 via the extended Euclidean algorithm against t^e - p.
    fn inv_xgcd(&self) -> Self {
        let e = self.field.e as usize;
        let to_rat = |v: &[BigInt]| -> Vec<BigRational> {
            v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
        };
        let mut modulus = vec![BigRational::zero(); e + 1];
        modulus[0] = -BigRational::from_integer(BigInt::from(self.field.p));
        modulus[e] = BigRational::one();
        let a = trim_rat(to_rat(&self.num));
        // invariant: r0 = s0 * a mod modulus
        let (mut r0, mut s0) = (a, vec![BigRational::one()]);
        let (mut r1, mut s1) = (modulus, Vec::new());
        while r0.len() > 1 {
            let (q, r) = rat_divrem(&r1, &r0);
            let s = rat_sub(&s1, &rat_mul(&q, &s0));
            r1 = std::mem::replace(&mut r0, r);
            s1 = std::mem::replace(&mut s0, s);
        }
        let c = r0[0].clone();
        let mut out = Self::zero(&self.field);
        let coeffs: Vec<BigRational> = s0.iter().map(|s| s / &c).collect();
        let mut den = BigInt::one();
        for q in &coeffs {
            den = den.lcm(q.denom());
        }
        for (j, q) in coeffs.iter().enumerate() {
            out.num[j] = q.numer() * (&den / q.denom());
        }
        out.den = den;
        out.scale_int(&self.den)
    }

    /// Reduction to the residue field; requires v(x) >= 0.
    pub fn residue(&self) -> Result<ResidueElement, FieldError> {
        let v = self.valuation();
        if v < Val::zero() {
            return Err(FieldError::NonIntegral(v));
        }
        let p = self.field.p;
        let e = self.field.e as usize;
        let pb = BigInt::from(p);
        let vd = vp_int(&self.den, p);
        let mut den_unit = self.den.clone();
        for _ in 0..vd {
            den_unit /= &pb;
        }
        let dinv = modinv(&den_unit.mod_floor(&pb), p);
        let mut c = vec![0u64; self.field.k as usize];
        for (i, ci) in c.iter_mut().enumerate() {
            let mut nm = self.num[i * e].clone();
            if nm.is_zero() {
                continue;
            }
            let vn = vp_int(&nm, p);
            if vn > vd {
                continue;
            }
            for _ in 0..vd {
                nm /= &pb;
            }
            let r = nm.mod_floor(&pb).to_u64().unwrap();
            *ci = r * dinv % p;
        }
        Ok(ResidueElement::new(&self.field, c))
    }

    /// Lift with coefficients in 0..p.
    pub fn lift_residue(field: &Field, r: &ResidueElement) -> Self {
        let mut x = Self::zero(field);
        for (i, c) in r.coeffs().iter().enumerate() {
            x.num[i * field.e as usize] = BigInt::from(*c);
        }
        x
    }

    /// Reinterprets this element in another descriptor with the same p, e, k.
    pub fn rehost(&self, field: &Field) -> Self {
        assert_eq!(field.dim(), self.field.dim());
        FieldElement { field: field.clone(), num: self.num.clone(), den: self.den.clone() }
    }
}

fn modinv(a: &BigInt, p: u64) -> u64 {
    let a = a.to_u64().unwrap() % p;
    residue::fp_inv(a, p)
}

fn trim_rat(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn rat_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_rat(out)
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim_rat((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn rat_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lc = b[db].clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lc;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        q[shift] = c;
        r.pop();
        r = trim_rat(r);
    }
    (trim_rat(q), r)
}

/// Multiplies two integer numerator vectors in Z[u, pi]/(U, pi^e - p).
fn mul_num(field: &FieldDescriptor, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let e = field.e as usize;
    let k = field.k as usize;
    let p = BigInt::from(field.p);
    if k == 1 {
        let mut prod = vec![BigInt::zero(); 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for t in (e..2 * e - 1).rev() {
            let c = std::mem::take(&mut prod[t]);
            if !c.is_zero() {
                prod[t - e] += c * &p;
            }
        }
        prod.truncate(e);
        return prod;
    }
    let w = 2 * e - 1;
    let mut prod = vec![BigInt::zero(); (2 * k - 1) * w];
    for (ia, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let (ua, pa) = (ia / e, ia % e);
        for (ib, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let (ub, pb) = (ib / e, ib % e);
            prod[(ua + ub) * w + pa + pb] += x * y;
        }
    }
    for row in 0..2 * k - 1 {
        for t in (e..w).rev() {
            let c = std::mem::take(&mut prod[row * w + t]);
            if !c.is_zero() {
                prod[row * w + t - e] += c * &p;
            }
        }
    }
    let modulus = field.lift_modulus();
    for row in (k..2 * k - 1).rev() {
        for j in 0..e {
            let c = std::mem::take(&mut prod[row * w + j]);
            if c.is_zero() {
                continue;
            }
            for (t, m) in modulus.iter().enumerate().take(k) {
                if !m.is_zero() {
                    prod[(row - k + t) * w + j] -= &c * m;
                }
            }
        }
    }
    let mut out = vec![BigInt::zero(); k * e];
    for i in 0..k {
        for j in 0..e {
            out[i * e + j] = std::mem::take(&mut prod[i * w + j]);
        }
    }
    out
}

/// Fraction-free solve of m x = rhs. Returns (adjugate-scaled solution, det).
fn bareiss_solve(mut m: Vec<Vec<BigInt>>, rhs: Vec<BigInt>) -> Option<(Vec<BigInt>, BigInt)> {
    let n = m.len();
    for (row, r) in m.iter_mut().zip(rhs) {
        row.push(r);
    }
    let mut prev = BigInt::one();
    for kcol in 0..n {
        let piv = (kcol..n).find(|&r| !m[r][kcol].is_zero())?;
        m.swap(kcol, piv);
        for i in kcol + 1..n {
            for j in kcol + 1..=n {
                let v = &m[i][j] * &m[kcol][kcol] - &m[i][kcol] * &m[kcol][j];
                m[i][j] = v / &prev;
            }
            m[i][kcol] = BigInt::zero();
        }
        prev = m[kcol][kcol].clone();
    }
    // back substitution over Q, returned on the common denominator det
    let det = prev;
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut s = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            s -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = s / BigRational::from_integer(m[i][i].clone());
    }
    let sol = x.iter().map(|q| (q * BigRational::from_integer(det.clone())).to_integer()).collect();
    Some((sol, det))
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}
impl Eq for FieldElement {}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        let mut out = FieldElement::zero(&self.field);
        if self.den == rhs.den {
            for (o, (a, b)) in out.num.iter_mut().zip(self.num.iter().zip(&rhs.num)) {
                *o = a + b;
            }
            out.den = self.den.clone();
        } else {
            for (o, (a, b)) in out.num.iter_mut().zip(self.num.iter().zip(&rhs.num)) {
                *o = a * &rhs.den + b * &self.den;
            }
            out.den = &self.den * &rhs.den;
        }
        out.normalize();
        out
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        let mut out = FieldElement {
            field: self.field.clone(),
            num: mul_num(&self.field, &self.num, &rhs.num),
            den: &self.den * &rhs.den,
        };
        out.normalize();
        out
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let e = self.field.e as usize;
        let mut first = true;
        for (idx, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c.clone(), self.den.clone());
            let (i, j) = (idx / e, idx % e);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", q)?;
            if j > 0 {
                write!(f, "*pi^{}", j)?;
            }
            if i > 0 {
                write!(f, "*u^{}", i)?;
            }
        }
        Ok(())
    }
}

/// Embedding of a field into an extension produced by [`extend_field`].
#[derive(Debug, Clone)]
pub struct Embedding {
    pub source: Field,
    pub target: Field,
    pub pi_image: FieldElement,
    pub u_image: FieldElement,
    /// false when the image of u is a Hensel approximation only.
    pub exact: bool,
}

impl Embedding {
    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        let (k, e) = (self.source.k as usize, self.source.e as usize);
        let mut acc = FieldElement::zero(&self.target);
        let mut upow = FieldElement::one(&self.target);
        for i in 0..k {
            let mut ppow = upow.clone();
            for j in 0..e {
                let c = x.coeff(i, j);
                if !c.is_zero() {
                    acc = acc + ppow.scale_rational(&c);
                }
                ppow = &ppow * &self.pi_image;
            }
            upow = &upow * &self.u_image;
        }
        acc
    }
}

/// Passes to a larger ramification index and/or residue degree.
///
/// pi maps to pi'^(new_e/e) exactly. When the residue modulus changes, u maps
/// to a Hensel lift of a root of U, accurate to `hensel_digits` p-adic digits.
pub fn extend_field(
    desc: &Field,
    new_e: u32,
    new_residue_modulus: &[u64],
    hensel_digits: u32,
) -> Result<(Field, Embedding), FieldError> {
    let new_k = (new_residue_modulus.len().max(1) - 1) as u32;
    let bad = FieldError::IncompatibleExtension { from_e: desc.e, from_k: desc.k, to_e: new_e, to_k: new_k };
    if new_e == 0 || new_e % desc.e != 0 || new_k == 0 || new_k % desc.k != 0 {
        return Err(bad);
    }
    let mut target = make_field(desc.p, new_e, new_residue_modulus)?;
    if desc.precision_cap.is_some() {
        target = target.with_precision_cap(desc.precision_cap);
    }
    let pi_image = FieldElement::pi_pow(&target, (new_e / desc.e) as i64);
    let (u_image, exact) = if desc.k == 1 {
        let c = -BigInt::from(desc.residue_modulus[0]);
        (FieldElement::from_bigint(&target, c), true)
    } else if desc.residue_modulus == target.residue_modulus {
        (FieldElement::u(&target), true)
    } else {
        let modulus: ResiduePoly = ResiduePoly::from_fp(&target, &desc.residue_modulus);
        let root = modulus.roots().into_iter().next().ok_or(bad)?;
        (hensel_lift_modulus_root(desc, &target, &root, hensel_digits), false)
    };
    let emb = Embedding { source: desc.clone(), target: target.clone(), pi_image, u_image, exact };
    Ok((target, emb))
}

/// Newton iteration for a root of the old modulus U in the unramified part of `target`.
fn hensel_lift_modulus_root(src: &Field, target: &Field, root: &ResidueElement, digits: u32) -> FieldElement {
    let modulus: Vec<FieldElement> =
        src.residue_modulus.iter().map(|&c| FieldElement::from_int(target, c as i64)).collect();
    let evalp = |x: &FieldElement, c: &[FieldElement]| {
        let mut acc = FieldElement::zero(target);
        for a in c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    };
    let deriv: Vec<FieldElement> = modulus
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale_int(&BigInt::from(i as i64)))
        .collect();
    let mut x = FieldElement::lift_residue(target, root);
    let mut prec = 1u32;
    let pmod = BigInt::from(src.p);
    while prec < digits {
        prec = (prec * 2).min(digits);
        let fx = evalp(&x, &modulus);
        let dx = evalp(&x, &deriv);
        x = &x - &(&fx * &dx.inv().expect("U separable mod p"));
        // keep coefficients bounded: reduce numerators modulo p^prec
        x = truncate_unramified(&x, &pmod.pow(prec));
    }
    x
}

fn truncate_unramified(x: &FieldElement, m: &BigInt) -> FieldElement {
    // Only integral unramified elements are passed here (e divides no pi terms).
    let mut out = x.clone();
    // den is a p-adic unit here
    let inv = mod_inverse_big(&x.den, m);
    for c in out.num.iter_mut() {
        *c = (&*c * &inv).mod_floor(m);
    }
    out.den = BigInt::one();
    out.normalize();
    out
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    g.x.mod_floor(m)
}

#[cfg(test)]
mod tests;
