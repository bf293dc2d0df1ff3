//! The residue field F_{p^k} and polynomials over it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Field;

pub(crate) fn fp_inv(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverting zero mod {p}");
    fp_pow(a % p, p - 2, p)
}

fn fp_pow(mut a: u64, mut n: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while n > 0 {
        if n & 1 == 1 {
            acc = (acc as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        n >>= 1;
    }
    acc
}

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(&mut out);
    out
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let linv = fp_inv(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r.last().unwrap() * linv % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = std::mem::replace(&mut b, r);
    }
    a
}

/// Rabin's test for a monic polynomial over F_p.
pub(crate) fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    let mut h = vec![0, 1];
    for _ in 0..n / 2 {
        // h <- h^p mod f
        let mut acc = vec![1u64];
        for _ in 0..p {
            acc = fp_rem(&fp_mul(&acc, &h, p), f, p);
        }
        h = acc;
        let mut d = h.clone();
        d.resize(d.len().max(2), 0);
        d[1] = (d[1] + p - 1) % p;
        fp_trim(&mut d);
        if fp_gcd(&d, f, p).len() != 1 {
            return false;
        }
    }
    true
}

/// Element of F_{p^k} = F_p[u]/(residue_modulus).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueElement {
    field: Field,
    c: Vec<u64>,
}

impl ResidueElement {
    pub fn new(field: &Field, mut c: Vec<u64>) -> Self {
        let p = field.p;
        for x in c.iter_mut() {
            *x %= p;
        }
        let k = field.k as usize;
        if c.len() > k {
            c = fp_rem(&c, &field.residue_modulus, p);
        }
        c.resize(k, 0);
        ResidueElement { field: field.clone(), c }
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, vec![0])
    }

    pub fn one(field: &Field) -> Self {
        Self::new(field, vec![1])
    }

    pub fn from_u64(field: &Field, n: u64) -> Self {
        Self::new(field, vec![n % field.p])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    pub fn order(&self) -> u64 {
        self.field.p.pow(self.field.k)
    }

    /// Position in the fixed enumeration used for deterministic ordering.
    pub fn index(&self) -> u64 {
        self.c.iter().rev().fold(0, |acc, &x| acc * self.field.p + x)
    }

    pub fn from_index(field: &Field, mut n: u64) -> Self {
        let mut c = Vec::with_capacity(field.k as usize);
        for _ in 0..field.k {
            c.push(n % field.p);
            n /= field.p;
        }
        Self::new(field, c)
    }

    /// All elements in enumeration order.
    pub fn all(field: &Field) -> impl Iterator<Item = ResidueElement> + '_ {
        let q = field.p.pow(field.k);
        (0..q).map(move |n| Self::from_index(field, n))
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(self.order() - 2))
        }
    }

    pub fn frobenius(&self) -> Self {
        self.pow(self.field.p)
    }

    /// The unique d with d^p = c, namely c^(p^(k-1)).
    pub fn frobenius_inverse(&self) -> Self {
        self.pow(self.field.p.pow(self.field.k - 1))
    }
}

impl<'a> Add<&'a ResidueElement> for &'a ResidueElement {
    type Output = ResidueElement;
    fn add(self, rhs: &ResidueElement) -> ResidueElement {
        let p = self.field.p;
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| (a + b) % p).collect();
        ResidueElement { field: self.field.clone(), c }
    }
}

impl<'a> Sub<&'a ResidueElement> for &'a ResidueElement {
    type Output = ResidueElement;
    fn sub(self, rhs: &ResidueElement) -> ResidueElement {
        let p = self.field.p;
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| (a + p - b) % p).collect();
        ResidueElement { field: self.field.clone(), c }
    }
}

impl<'a> Mul<&'a ResidueElement> for &'a ResidueElement {
    type Output = ResidueElement;
    fn mul(self, rhs: &ResidueElement) -> ResidueElement {
        let prod = fp_mul(&self.c, &rhs.c, self.field.p);
        ResidueElement::new(&self.field, prod)
    }
}

impl Neg for &ResidueElement {
    type Output = ResidueElement;
    fn neg(self) -> ResidueElement {
        let p = self.field.p;
        ResidueElement { field: self.field.clone(), c: self.c.iter().map(|a| (p - a) % p).collect() }
    }
}

impl fmt::Debug for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.k == 1 {
            return write!(f, "{}", self.c[0]);
        }
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| match i {
                0 => format!("{x}"),
                1 => format!("{x}*u"),
                _ => format!("{x}*u^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Dense polynomial over F_{p^k}, ascending, trimmed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResiduePoly {
    field: Field,
    c: Vec<ResidueElement>,
}

impl ResiduePoly {
    pub fn new(field: &Field, mut c: Vec<ResidueElement>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        ResiduePoly { field: field.clone(), c }
    }

    pub fn from_fp(field: &Field, c: &[u64]) -> Self {
        Self::new(field, c.iter().map(|&x| ResidueElement::from_u64(field, x)).collect())
    }

    pub fn x(field: &Field) -> Self {
        Self::new(field, vec![ResidueElement::zero(field), ResidueElement::one(field)])
    }

    pub fn coeffs(&self) -> &[ResidueElement] {
        &self.c
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn eval(&self, x: &ResidueElement) -> ResidueElement {
        let mut acc = ResidueElement::zero(&self.field);
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(&self.field, Vec::new());
        }
        let mut out = vec![ResidueElement::zero(&self.field); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in other.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(&self.field, out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        let z = ResidueElement::zero(&self.field);
        let c = (0..n).map(|i| self.c.get(i).unwrap_or(&z) - other.c.get(i).unwrap_or(&z)).collect();
        Self::new(&self.field, c)
    }

    pub fn divrem(&self, m: &Self) -> (Self, Self) {
        let dm = m.degree().expect("division by zero polynomial");
        let linv = m.c[dm].inv().unwrap();
        let mut r = self.c.clone();
        let mut q = vec![ResidueElement::zero(&self.field); self.c.len().saturating_sub(dm)];
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = r.last().unwrap() * &linv;
            for (i, mi) in m.c.iter().enumerate() {
                r[shift + i] = &r[shift + i] - &(&c * mi);
            }
            q[shift] = c;
            r.pop();
            while r.last().map_or(false, |x| x.is_zero()) {
                r.pop();
            }
        }
        (Self::new(&self.field, q), Self::new(&self.field, r))
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(l) => {
                let li = l.inv().unwrap();
                Self::new(&self.field, self.c.iter().map(|a| a * &li).collect())
            }
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = std::mem::replace(&mut b, r);
        }
        a.monic()
    }

    fn powmod(&self, mut n: u64, m: &Self) -> Self {
        let mut acc = Self::from_fp(&self.field, &[1]);
        let mut base = self.divrem(m).1;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).divrem(m).1;
            }
            base = base.mul(&base).divrem(m).1;
            n >>= 1;
        }
        acc
    }

    /// Rabin's test over F_q, q = p^k.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        let q = self.field.p.pow(self.field.k);
        let x = Self::x(&self.field);
        let mut h = x.clone();
        for _ in 0..n / 2 {
            h = h.powmod(q, self);
            if h.sub(&x).gcd(self).degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Distinct roots in F_{p^k}, by exhaustive search in enumeration order.
    pub fn roots(&self) -> Vec<ResidueElement> {
        ResidueElement::all(&self.field).filter(|x| self.eval(x).is_zero()).collect()
    }
}

impl fmt::Display for ResiduePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| {
                let coef = if a.is_one() && i > 0 { String::new() } else { format!("({a})") };
                match i {
                    0 => coef,
                    1 => format!("{coef}x"),
                    _ => format!("{coef}x^{i}"),
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}
