//! Truncated arithmetic in the valuation ring O of the completion of K.
//!
//! An element of O / p^M is a coefficient vector on the integral basis
//! u^i pi^j (index `i * e + j`) with entries in 0..p^M. Absolute precision is
//! tracked by callers in pi-units; digits at or beyond it are garbage.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use crate::numfield::{vp_int, Field, FieldElement, ResidueElement};

pub(crate) type Loc = Vec<BigInt>;

#[derive(Clone, Debug)]
pub(crate) struct Ring {
    pub field: Field,
    pub p: u64,
    pub e: usize,
    pub k: usize,
    pub digits: u32,
    pb: BigInt,
    pm: BigInt,
    umod: Vec<BigInt>,
}

impl Ring {
    pub fn new(field: &Field, digits: u32) -> Self {
        let pb = BigInt::from(field.p);
        Ring {
            field: field.clone(),
            p: field.p,
            e: field.e as usize,
            k: field.k as usize,
            digits,
            pm: num_traits::pow(pb.clone(), digits as usize),
            pb,
            umod: field.lift_modulus(),
        }
    }

    /// Precision of freshly converted data, in pi-units.
    pub fn prec(&self) -> i64 {
        self.e as i64 * self.digits as i64
    }

    pub fn dim(&self) -> usize {
        self.e * self.k
    }

    pub fn zero(&self) -> Loc {
        vec![BigInt::zero(); self.dim()]
    }

    pub fn one(&self) -> Loc {
        let mut x = self.zero();
        x[0] = BigInt::one();
        x
    }

    fn reduce(&self, x: &mut Loc) {
        for c in x.iter_mut() {
            *c = c.mod_floor(&self.pm);
        }
    }

    pub fn add(&self, a: &Loc, b: &Loc) -> Loc {
        let mut x: Loc = a.iter().zip(b).map(|(s, t)| s + t).collect();
        self.reduce(&mut x);
        x
    }

    pub fn sub(&self, a: &Loc, b: &Loc) -> Loc {
        let mut x: Loc = a.iter().zip(b).map(|(s, t)| s - t).collect();
        self.reduce(&mut x);
        x
    }

    pub fn is_zero(&self, a: &Loc) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn mul(&self, a: &Loc, b: &Loc) -> Loc {
        let (e, k) = (self.e, self.k);
        if e == 1 && k == 1 {
            return vec![(&a[0] * &b[0]).mod_floor(&self.pm)];
        }
        let we = 2 * e - 1;
        let mut acc = vec![BigInt::zero(); (2 * k - 1) * we];
        for (ia, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let (ui, pj) = (ia / e, ia % e);
            for (ib, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                acc[(ui + ib / e) * we + pj + ib % e] += ca * cb;
            }
        }
        // pi^e = p
        let mut folded = vec![BigInt::zero(); (2 * k - 1) * e];
        for i in 0..2 * k - 1 {
            for j in 0..we {
                let c = std::mem::take(&mut acc[i * we + j]);
                if c.is_zero() {
                    continue;
                }
                if j < e {
                    folded[i * e + j] += c;
                } else {
                    folded[i * e + j - e] += c * &self.pb;
                }
            }
        }
        // u^k = -sum U_t u^t
        for i in (k..2 * k - 1).rev() {
            for j in 0..e {
                let c = std::mem::take(&mut folded[i * e + j]);
                if c.is_zero() {
                    continue;
                }
                for t in 0..k {
                    if !self.umod[t].is_zero() {
                        folded[(i - k + t) * e + j] -= &c * &self.umod[t];
                    }
                }
            }
        }
        folded.truncate(k * e);
        self.reduce(&mut folded);
        folded
    }

    /// Valuation in pi-units if it is below `prec`, else None.
    pub fn val_below(&self, a: &Loc, prec: i64) -> Option<i64> {
        let e = self.e as i64;
        let mut best: Option<i64> = None;
        for (idx, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = vp_int(c, self.p) * e + (idx % self.e) as i64;
            if best.map_or(true, |b| v < b) {
                best = Some(v);
            }
        }
        best.filter(|&v| v < prec)
    }

    /// Exact division by pi^v; the caller guarantees v(a) >= v.
    pub fn div_pi(&self, a: &Loc, v: i64) -> Loc {
        let e = self.e as i64;
        let (q, s) = (v.div_euclid(e), v.rem_euclid(e));
        let mut out = self.zero();
        for (idx, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (idx / self.e, (idx % self.e) as i64);
            let (nj, drop) = if j >= s { (j - s, q) } else { (j - s + e, q + 1) };
            if drop as u32 >= self.digits {
                continue;
            }
            let d = num_traits::pow(self.pb.clone(), drop as usize);
            out[i * self.e + nj as usize] = c.div_floor(&d);
        }
        out
    }

    pub fn residue(&self, a: &Loc) -> ResidueElement {
        let c = (0..self.k).map(|i| a[i * self.e].mod_floor(&self.pb).to_u64().unwrap()).collect();
        ResidueElement::new(&self.field, c)
    }

    pub fn lift(&self, r: &ResidueElement) -> Loc {
        let mut x = self.zero();
        for (i, c) in r.coeffs().iter().enumerate() {
            x[i * self.e] = BigInt::from(*c);
        }
        x
    }

    /// Inverse of a unit by Newton iteration from the residue inverse.
    pub fn unit_inv(&self, a: &Loc) -> Loc {
        let r = self.residue(a).inv().expect("unit_inv on a non-unit");
        let mut x = self.lift(&r);
        let two = {
            let mut t = self.zero();
            t[0] = BigInt::from(2);
            t
        };
        let mut good = 1i64;
        while good < self.prec() {
            x = self.mul(&x, &self.sub(&two, &self.mul(a, &x)));
            good *= 2;
        }
        x
    }

    /// pi^shift * x as a truncated integral element, or None if not integral.
    pub fn from_elem(&self, x: &FieldElement, shift: i64) -> Option<Loc> {
        let e = self.e as i64;
        let den = x.denominator();
        let a = vp_int(den, self.p);
        let mut dunit = den.clone();
        for _ in 0..a {
            dunit /= &self.pb;
        }
        let dinv = dunit.mod_floor(&self.pm).modinv(&self.pm).expect("denominator unit");
        let mut out = self.zero();
        for (idx, c) in x.numerators().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (idx / self.e, (idx % self.e) as i64);
            let ex = j + shift;
            let (q, s) = (ex.div_euclid(e), ex.rem_euclid(e));
            let ppow = q - a;
            let vc = vp_int(c, self.p);
            if vc + ppow < 0 {
                return None;
            }
            let mut t = c.clone();
            if ppow >= 0 {
                if ppow as u32 >= self.digits {
                    continue;
                }
                t *= num_traits::pow(self.pb.clone(), ppow as usize);
            } else {
                t /= num_traits::pow(self.pb.clone(), (-ppow) as usize);
            }
            out[i * self.e + s as usize] = (t * &dinv).mod_floor(&self.pm);
        }
        Some(out)
    }
}

/// Polynomial remainder modulo a monic polynomial; no precision is lost.
pub(crate) fn rem_monic(ring: &Ring, a: &[Loc], g: &[Loc]) -> Vec<Loc> {
    let n = g.len() - 1;
    let mut r: Vec<Loc> = a.to_vec();
    while r.len() > n {
        let top = r.pop().unwrap();
        if ring.is_zero(&top) {
            continue;
        }
        let off = r.len() - n;
        for j in 0..n {
            let t = ring.mul(&top, &g[j]);
            r[off + j] = ring.sub(&r[off + j], &t);
        }
    }
    r.resize(n, ring.zero());
    r
}

pub(crate) fn mul_mod(ring: &Ring, a: &[Loc], b: &[Loc], g: &[Loc]) -> Vec<Loc> {
    let mut prod = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !ring.is_zero(y) {
                let t = ring.mul(x, y);
                prod[i + j] = ring.add(&prod[i + j], &t);
            }
        }
    }
    rem_monic(ring, &prod, g)
}

pub(crate) fn pow_mod(ring: &Ring, a: &[Loc], mut n: u64, g: &[Loc]) -> Vec<Loc> {
    let mut acc = vec![ring.one()];
    let mut base = a.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            acc = mul_mod(ring, &acc, &base, g);
        }
        n >>= 1;
        if n > 0 {
            base = mul_mod(ring, &base, &base, g);
        }
    }
    rem_monic(ring, &acc, g)
}

/// Matrix of multiplication by `x` on the basis 1, Y, .., Y^(n-1) of O[Y]/g.
pub(crate) fn mult_matrix(ring: &Ring, x: &[Loc], g: &[Loc]) -> Vec<Vec<Loc>> {
    let n = g.len() - 1;
    let mut cols = Vec::with_capacity(n);
    let mut cur = rem_monic(ring, x, g);
    for _ in 0..n {
        cols.push(cur.clone());
        let mut shifted = vec![ring.zero()];
        shifted.extend(cur);
        cur = rem_monic(ring, &shifted, g);
    }
    (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect()
}

/// Characteristic polynomial det(T - h) of an integral matrix known to
/// absolute precision `prec`; returns ascending coefficients and the
/// precision that survives the Hessenberg reduction.
pub(crate) fn charpoly(ring: &Ring, mut h: Vec<Vec<Loc>>, prec: i64) -> (Vec<Loc>, i64) {
    let n = h.len();
    let mut prec = prec;
    for m in 1..n.saturating_sub(1) {
        // pivot of least valuation keeps every multiplier integral
        let mut best: Option<(usize, i64)> = None;
        for i in m..n {
            if let Some(v) = ring.val_below(&h[i][m - 1], prec) {
                if best.map_or(true, |(_, b)| v < b) {
                    best = Some((i, v));
                }
            }
        }
        let Some((i0, vp)) = best else {
            for i in m..n {
                h[i][m - 1] = ring.zero();
            }
            continue;
        };
        if i0 != m {
            h.swap(i0, m);
            for row in h.iter_mut() {
                row.swap(i0, m);
            }
        }
        let uinv = ring.unit_inv(&ring.div_pi(&h[m][m - 1], vp));
        prec -= vp;
        for i in m + 1..n {
            if ring.val_below(&h[i][m - 1], prec + vp).is_none() {
                h[i][m - 1] = ring.zero();
                continue;
            }
            let mu = ring.mul(&ring.div_pi(&h[i][m - 1], vp), &uinv);
            for j in 0..n {
                if !ring.is_zero(&h[m][j]) {
                    let t = ring.mul(&mu, &h[m][j]);
                    h[i][j] = ring.sub(&h[i][j], &t);
                }
            }
            h[i][m - 1] = ring.zero();
            for j in 0..n {
                if !ring.is_zero(&h[j][i]) {
                    let t = ring.mul(&mu, &h[j][i]);
                    h[j][m] = ring.add(&h[j][m], &t);
                }
            }
        }
    }
    // p_{m+1}(T) = (T - h_mm) p_m(T) - sum_i h_im (prod h_{j+1,j}) p_i(T)
    let mut ps: Vec<Vec<Loc>> = vec![vec![ring.one()]];
    for m in 0..n {
        let prev = &ps[m];
        let mut next = vec![ring.zero(); m + 2];
        for (d, c) in prev.iter().enumerate() {
            next[d + 1] = ring.add(&next[d + 1], c);
            let t = ring.mul(c, &h[m][m]);
            next[d] = ring.sub(&next[d], &t);
        }
        let mut prod = ring.one();
        for i in (0..m).rev() {
            prod = ring.mul(&prod, &h[i + 1][i]);
            if ring.is_zero(&prod) {
                break;
            }
            let coef = ring.mul(&h[i][m], &prod);
            if ring.is_zero(&coef) {
                continue;
            }
            for (d, c) in ps[i].iter().enumerate() {
                let t = ring.mul(c, &coef);
                next[d] = ring.sub(&next[d], &t);
            }
        }
        ps.push(next);
    }
    (ps.pop().unwrap(), prec)
}

/// Outcome of reading a Newton polygon off truncated coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Polygon {
    /// Root valuations (pi-units) with multiplicity, increasing.
    Certain(Vec<Rational64>),
    /// The constant term is zero to the working precision.
    ZeroSuspect,
    /// Some unknown coefficient could still bend the hull.
    Uncertain,
}

/// Hull of the known points, certified against unknown coefficients.
pub(crate) fn polygon(ring: &Ring, coeffs: &[Loc], prec: i64) -> Polygon {
    let pts: Vec<(usize, Option<i64>)> = coeffs.iter().enumerate().map(|(i, c)| (i, ring.val_below(c, prec))).collect();
    if pts[0].1.is_none() {
        return Polygon::ZeroSuspect;
    }
    let known: Vec<(usize, Rational64)> =
        pts.iter().filter_map(|&(i, v)| v.map(|v| (i, Rational64::from_integer(v)))).collect();
    let np = crate::polyalg::NewtonPolygon::from_points(&known);
    let pr = Rational64::from_integer(prec);
    for &(i, v) in &pts {
        if v.is_some() {
            continue;
        }
        let seg = np.segments.iter().find(|s| s.start <= i && i <= s.end).unwrap();
        let y0 = np.vertices.iter().find(|v| v.0 == seg.start).unwrap().1;
        let hull = y0 + seg.slope * Rational64::from_integer((i - seg.start) as i64);
        if pr < hull {
            return Polygon::Uncertain;
        }
    }
    Polygon::Certain(np.root_valuations())
}

/// Residual polynomial of the hull segment [start, end] with slope -h/d in
/// pi-units; coefficients on the segment line divided by the matching pi-power.
pub(crate) fn residual(
    ring: &Ring,
    coeffs: &[Loc],
    prec: i64,
    start: usize,
    end: usize,
    slope: Rational64,
) -> Option<Vec<ResidueElement>> {
    let d = *slope.denom() as usize;
    let h = -*slope.numer();
    let v0 = ring.val_below(&coeffs[start], prec)?;
    let mut out = Vec::new();
    let mut t = 0usize;
    while start + t * d <= end {
        let target = v0 - (t as i64) * h;
        let c = &coeffs[start + t * d];
        match ring.val_below(c, prec) {
            Some(v) if v == target => out.push(ring.residue(&ring.div_pi(c, target))),
            Some(v) if v > target => out.push(ResidueElement::zero(&ring.field)),
            None if target < prec => out.push(ResidueElement::zero(&ring.field)),
            _ => return None,
        }
        t += 1;
    }
    Some(out)
}
