//! Dense univariate polynomials and rational functions over [`FieldElement`].

use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::numfield::{Field, FieldElement, Val};

/// Variable tag; metadata only, but binary operations insist on agreement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    X0,
    T,
    Z,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "X",
            Var::Y => "Y",
            Var::X0 => "X0",
            Var::T => "T",
            Var::Z => "Z",
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    var: Var,
    c: Vec<FieldElement>,
}

impl Poly {
    pub fn new(field: &Field, var: Var, mut c: Vec<FieldElement>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        Poly { field: field.clone(), var, c }
    }

    pub fn zero(field: &Field, var: Var) -> Self {
        Poly { field: field.clone(), var, c: Vec::new() }
    }

    pub fn constant(x: FieldElement, var: Var) -> Self {
        let field = x.field().clone();
        Self::new(&field, var, vec![x])
    }

    pub fn one(field: &Field, var: Var) -> Self {
        Self::constant(FieldElement::one(field), var)
    }

    /// The variable itself.
    pub fn x(field: &Field, var: Var) -> Self {
        Self::monomial(FieldElement::one(field), 1, var)
    }

    pub fn monomial(c: FieldElement, deg: usize, var: Var) -> Self {
        let field = c.field().clone();
        let mut v = vec![FieldElement::zero(&field); deg + 1];
        v[deg] = c;
        Self::new(&field, var, v)
    }

    pub fn from_ints(field: &Field, var: Var, c: &[i64]) -> Self {
        Self::new(field, var, c.iter().map(|&n| FieldElement::from_int(field, n)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(&self, var: Var) -> Self {
        Poly { field: self.field.clone(), var, c: self.c.clone() }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.c.get(i).cloned().unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; use only where zero is excluded.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lc(&self) -> FieldElement {
        self.c.last().cloned().unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().map_or(false, |x| x.is_one())
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.var, other.var, "mixing variables {:?} and {:?}", self.var, other.var);
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let (long, short) = if self.c.len() >= other.c.len() { (self, other) } else { (other, self) };
        let mut c = long.c.clone();
        for (a, b) in c.iter_mut().zip(&short.c) {
            *a = &*a + b;
        }
        Self::new(&self.field, self.var, c)
    }

    pub fn neg(&self) -> Self {
        Poly { field: self.field.clone(), var: self.var, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field, self.var);
        }
        let mut c = vec![FieldElement::zero(&self.field); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] = &c[i + j] + &(a * b);
                }
            }
        }
        Self::new(&self.field, self.var, c)
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        Self::new(&self.field, self.var, self.c.iter().map(|x| x * s).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.field, self.var);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplies by var^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![FieldElement::zero(&self.field); k];
        c.extend(self.c.iter().cloned());
        Self::new(&self.field, self.var, c)
    }

    /// Drops all terms of degree >= n.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(&self.field, self.var, self.c.iter().take(n).cloned().collect())
    }

    pub fn derivative(&self) -> Self {
        let c = self.c.iter().enumerate().skip(1).map(|(i, x)| x.scale_int(&BigInt::from(i))).collect();
        Self::new(&self.field, self.var, c)
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }

    /// Composition self(g).
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field, g.var);
        for a in self.c.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(a.clone(), g.var));
        }
        acc
    }

    /// self(var + a).
    pub fn shift_arg(&self, a: &FieldElement) -> Poly {
        let lin = Poly::new(&self.field, self.var, vec![a.clone(), FieldElement::one(&self.field)]);
        self.compose(&lin)
    }

    pub fn divrem(&self, m: &Poly) -> (Poly, Poly) {
        self.check(m);
        let dm = m.degree().expect("division by zero polynomial");
        let linv = m.lc().inv().unwrap();
        let mut r = self.c.clone();
        if r.len() <= dm {
            return (Poly::zero(&self.field, self.var), self.clone());
        }
        let mut q = vec![FieldElement::zero(&self.field); r.len() - dm];
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let top = r.pop().unwrap();
            if !top.is_zero() {
                let c = &top * &linv;
                for (i, mi) in m.c.iter().enumerate().take(dm) {
                    if !mi.is_zero() {
                        r[shift + i] = &r[shift + i] - &(&c * mi);
                    }
                }
                q[shift] = c;
            }
        }
        (Poly::new(&self.field, self.var, q), Poly::new(&self.field, self.var, r))
    }

    pub fn rem(&self, m: &Poly) -> Poly {
        self.divrem(m).1
    }

    /// Exact quotient; None if m does not divide self.
    pub fn div_exact(&self, m: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(m);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(&self.lc().inv().unwrap())
    }

    /// Monic gcd via a monic remainder sequence.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check(other);
        let (mut a, mut b) = (self.monic(), other.monic());
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = std::mem::replace(&mut b, r);
        }
        a
    }

    /// Subresultant-chain resultant, lc(a)^deg b * prod over roots of a of b.
    pub fn resultant(&self, other: &Poly) -> FieldElement {
        self.check(other);
        resultant(self, other)
    }

    /// Monic product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return Poly::one(&self.field, self.var);
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).expect("gcd divides").monic()
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        NewtonPolygon::of(self)
    }

    /// Minimum coefficient valuation (the Gauss valuation).
    pub fn gauss_valuation(&self) -> Val {
        self.c.iter().map(|x| x.valuation()).min().unwrap_or(Val::Inf)
    }

    /// Characteristic polynomial (in T) of multiplication by self in K[var]/(g).
    pub fn charpoly_mod(&self, g: &Poly) -> Poly {
        let m = mult_matrix(&self.rem(g), g);
        hessenberg_charpoly(m, &self.field)
    }

    /// Taylor coefficients: self(X + Y) = sum_i s_i(Y) X^i, returned as polys in Y.
    pub fn taylor_shift(&self) -> Vec<Poly> {
        let n = match self.degree() {
            None => return Vec::new(),
            Some(n) => n,
        };
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let c = (i..=n).map(|j| self.c[j].scale_int(&binom(j, i))).collect();
            out.push(Poly::new(&self.field, Var::Y, c));
        }
        out
    }
}

pub fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn resultant(a: &Poly, b: &Poly) -> FieldElement {
    let field = a.field.clone();
    if a.is_zero() || b.is_zero() {
        return FieldElement::zero(&field);
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut s = FieldElement::one(&field);
    if a.deg() < b.deg() {
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.deg() == 0 {
        return &s * &b.lc().pow(a.deg() as u32);
    }
    let mut g = FieldElement::one(&field);
    let mut h = FieldElement::one(&field);
    loop {
        let delta = a.deg() - b.deg();
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            s = -s;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        let denom = &g * &h.pow(delta as u32);
        b = r.scale(&denom.inv().unwrap());
        g = a.lc();
        // h <- g^delta / h^(delta - 1)
        if delta > 0 {
            h = &g.pow(delta as u32) * &h.pow(delta as u32 - 1).inv().unwrap();
        }
        if b.is_zero() {
            return FieldElement::zero(&field);
        }
        if b.deg() == 0 {
            break;
        }
    }
    let da = a.deg() as u32;
    let hh = &b.lc().pow(da) * &h.pow(da - 1).inv().unwrap();
    &s * &hh
}

fn pseudo_rem(a: &Poly, b: &Poly) -> Poly {
    let delta = a.deg() - b.deg();
    let scaled = a.scale(&b.lc().pow(delta as u32 + 1));
    scaled.rem(b)
}

/// Columns are self * var^j mod g for j < deg g.
fn mult_matrix(x: &Poly, g: &Poly) -> Vec<Vec<FieldElement>> {
    let d = g.deg();
    let mut cols: Vec<Vec<FieldElement>> = Vec::with_capacity(d);
    let mut cur = x.clone();
    let lc_inv = g.lc().inv().unwrap();
    for _ in 0..d {
        cols.push((0..d).map(|i| cur.coeff(i)).collect());
        // cur <- cur * var mod g
        let mut next = cur.shift(1);
        if next.c.len() > d {
            let top = &next.c[d] * &lc_inv;
            let sub = g.scale(&top);
            next = next.sub(&sub);
        }
        cur = next;
    }
    (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect()
}

/// Characteristic polynomial det(T - M) by reduction to Hessenberg form.
pub fn hessenberg_charpoly(mut h: Vec<Vec<FieldElement>>, field: &Field) -> Poly {
    let n = h.len();
    for m in 1..n.saturating_sub(1) {
        let piv = (m..n).find(|&i| !h[i][m - 1].is_zero());
        let Some(i0) = piv else { continue };
        if i0 != m {
            h.swap(i0, m);
            for row in h.iter_mut() {
                row.swap(i0, m);
            }
        }
        let tinv = h[m][m - 1].inv().unwrap();
        for i in m + 1..n {
            if h[i][m - 1].is_zero() {
                continue;
            }
            let u = &h[i][m - 1] * &tinv;
            for j in 0..n {
                if !h[m][j].is_zero() {
                    h[i][j] = &h[i][j] - &(&u * &h[m][j]);
                }
            }
            h[i][m - 1] = FieldElement::zero(field);
            for j in 0..n {
                if !h[j][i].is_zero() {
                    h[j][m] = &h[j][m] + &(&u * &h[j][i]);
                }
            }
        }
    }
    let t = Poly::x(field, Var::T);
    let mut ps: Vec<Poly> = vec![Poly::one(field, Var::T)];
    for m in 0..n {
        let lin = t.sub(&Poly::constant(h[m][m].clone(), Var::T));
        let mut pm = lin.mul(&ps[m]);
        let mut prod = FieldElement::one(field);
        for i in (0..m).rev() {
            prod = &prod * &h[i + 1][i];
            if prod.is_zero() {
                break;
            }
            let coef = &h[i][m] * &prod;
            if !coef.is_zero() {
                pm = pm.sub(&ps[i].scale(&coef));
            }
        }
        ps.push(pm);
    }
    ps.pop().unwrap()
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var.name();
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| match i {
                0 => format!("({a})"),
                1 => format!("({a})*{v}"),
                _ => format!("({a})*{v}^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// Slope of the hull edge; the roots on it have valuation -slope.
    pub slope: Rational64,
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end - self.start
    }

    pub fn root_valuation(&self) -> Rational64 {
        -self.slope
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Rational64)>,
    pub segments: Vec<Segment>,
    pub ord_zero: usize,
}

impl NewtonPolygon {
    pub fn of(a: &Poly) -> Self {
        let pts: Vec<(usize, Rational64)> =
            a.c.iter().enumerate().filter_map(|(i, x)| x.valuation().finite().map(|v| (i, v))).collect();
        Self::from_points(&pts)
    }

    /// Lower convex hull of (exponent, valuation) points, exponents increasing.
    pub fn from_points(pts: &[(usize, Rational64)]) -> Self {
        if pts.is_empty() {
            return NewtonPolygon { vertices: Vec::new(), segments: Vec::new(), ord_zero: 0 };
        }
        let mut hull: Vec<(usize, Rational64)> = Vec::new();
        for &pt in pts {
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // drop the middle point unless it lies strictly below the chord
                let lhs = (y2 - y1) * Rational64::from_integer((pt.0 - x1) as i64);
                let rhs = (pt.1 - y1) * Rational64::from_integer((x2 - x1) as i64);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let segments = hull
            .windows(2)
            .map(|w| Segment {
                start: w[0].0,
                end: w[1].0,
                slope: (w[1].1 - w[0].1) / Rational64::from_integer((w[1].0 - w[0].0) as i64),
            })
            .collect();
        NewtonPolygon { ord_zero: pts[0].0, vertices: hull, segments }
    }

    /// Valuations of the nonzero roots, with multiplicity, in increasing order.
    pub fn root_valuations(&self) -> Vec<Rational64> {
        let mut out = Vec::new();
        for s in self.segments.iter().rev() {
            for _ in 0..s.length() {
                out.push(s.root_valuation());
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }
}

/// Reduced quotient with monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        if n.is_zero() {
            d = Poly::one(&d.field, d.var);
        }
        let l = d.lc();
        if !l.is_one() {
            let li = l.inv().unwrap();
            n = n.scale(&li);
            d = d.scale(&li);
        }
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(p: Poly) -> Self {
        let one = Poly::one(&p.field, p.var);
        RatFunc { num: p, den: one }
    }

    pub fn zero(field: &Field, var: Var) -> Self {
        Self::from_poly(Poly::zero(field, var))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        RatFunc { num: self.num.scale(s), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self::new(self.num.mul(p), self.den.clone())
    }

    pub fn div_poly(&self, p: &Poly) -> Self {
        Self::new(self.num.clone(), self.den.mul(p))
    }

    pub fn eval(&self, x: &FieldElement) -> Option<FieldElement> {
        let d = self.den.eval(x);
        d.inv().map(|di| &self.num.eval(x) * &di)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
