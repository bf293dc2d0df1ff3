//! Valuations at the roots of a squarefree factor g, read off characteristic
//! polynomials in the algebra K[Y]/g.
//!
//! The roots are partitioned into groups on which every evaluated element has
//! a single valuation. Telling groups apart uses a separating element w whose
//! valuation ("tag") differs from group to group: the characteristic
//! polynomial of x * w^M shifts each group's values by M times its tag, and
//! for M large enough the shifted ranges no longer overlap.

use num_rational::Rational64;
use num_traits::Zero;

use super::local::{charpoly, mul_mod, mult_matrix, polygon, pow_mod, rem_monic, residual, Loc, Polygon, Ring};
use super::RootError;
use crate::numfield::{Field, FieldElement, ResiduePoly, Val};
use crate::polyalg::{NewtonPolygon, Poly};

#[derive(Clone, Debug)]
pub(crate) struct GroupState {
    pub size: usize,
    pub vals: Vec<Val>,
    tag: Rational64,
}

pub(crate) enum Outcome {
    Done,
    Split(Poly),
}

/// Values of one element before they are matched to groups.
pub(crate) enum Prepared {
    /// valuations of the integralized element in pi-units, and the shift used
    Vals(Vec<Rational64>, i64),
    Constant(Val),
    Split(Poly),
}

pub(crate) struct LocalBlock {
    pub g: Poly,
    field: Field,
    n: usize,
    sigma: i64,
    digits: u32,
    cap: u32,
    gmod: Vec<Loc>,
    ring: Ring,
    pub groups: Vec<GroupState>,
    recipe: Vec<(usize, u64)>,
    elems: Vec<Poly>,
}

fn ceil(r: Rational64) -> i64 {
    r.ceil().to_integer()
}

impl LocalBlock {
    pub fn new(g: &Poly, digits: u32, cap: u32) -> Self {
        let field = g.field().clone();
        let e = field.e as i64;
        let np = NewtonPolygon::of(g);
        let vmin = np.root_valuations().into_iter().min().unwrap_or_else(Rational64::zero);
        let sigma = ceil(-vmin * e);
        let ring = Ring::new(&field, digits);
        let mut b = LocalBlock {
            g: g.clone(),
            n: g.deg(),
            sigma,
            digits,
            cap,
            gmod: Vec::new(),
            ring,
            groups: vec![GroupState { size: g.deg(), vals: Vec::new(), tag: Rational64::zero() }],
            recipe: Vec::new(),
            elems: Vec::new(),
            field,
        };
        b.gmod = b.modulus(&b.ring);
        b
    }

    /// G(Y') = pi^(sigma n) g(Y'/pi^sigma) / lc, monic with integral coefficients.
    fn modulus(&self, ring: &Ring) -> Vec<Loc> {
        let lci = self.g.lc().inv().unwrap();
        (0..=self.n)
            .map(|j| {
                let c = &self.g.coeff(j) * &lci;
                ring.from_elem(&c, self.sigma * (self.n - j) as i64).expect("scaled modulus is integral")
            })
            .collect()
    }

    fn ring_at(&self, digits: u32) -> (Ring, Vec<Loc>) {
        if digits == self.digits {
            return (self.ring.clone(), self.gmod.clone());
        }
        let ring = Ring::new(&self.field, digits);
        let gm = self.modulus(&ring);
        (ring, gm)
    }

    fn bump(&self, digits: u32) -> Result<u32, RootError> {
        if digits >= self.cap {
            return Err(RootError::PrecisionCapExceeded(self.cap));
        }
        Ok((digits * 2).min(self.cap))
    }

    fn set_digits(&mut self, digits: u32) {
        if digits > self.digits {
            let (r, g) = self.ring_at(digits);
            self.ring = r;
            self.gmod = g;
            self.digits = digits;
        }
    }

    /// pi^s x(Y'/pi^sigma) reduced mod G, and s.
    fn integralize(&self, ring: &Ring, gm: &[Loc], x: &Poly) -> (Vec<Loc>, i64) {
        let e = self.field.e as i64;
        let mut s = i64::MIN;
        for (j, c) in x.coeffs().iter().enumerate() {
            if let Val::Fin(v) = c.valuation() {
                s = s.max(self.sigma * j as i64 - (v * e).to_integer());
            }
        }
        let loc: Vec<Loc> = x
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.is_zero() {
                    ring.zero()
                } else {
                    ring.from_elem(c, s - self.sigma * j as i64).unwrap()
                }
            })
            .collect();
        (rem_monic(ring, &loc, gm), s)
    }

    fn values_of(&self, ring: &Ring, gm: &[Loc], z: &[Loc]) -> Polygon {
        let (cp, prec) = charpoly(ring, mult_matrix(ring, z, gm), ring.prec());
        polygon(ring, &cp, prec)
    }

    /// Valuation multiset of x over all roots, without group matching.
    pub fn prepare(&self, x: &Poly) -> Result<Prepared, RootError> {
        if x.is_zero() {
            return Ok(Prepared::Constant(Val::Inf));
        }
        if x.is_constant() {
            return Ok(Prepared::Constant(x.coeff(0).valuation()));
        }
        let mut digits = self.digits;
        let mut zero_checked = false;
        loop {
            let (ring, gm) = self.ring_at(digits);
            let (xt, s) = self.integralize(&ring, &gm, x);
            match self.values_of(&ring, &gm, &xt) {
                Polygon::Certain(v) => return Ok(Prepared::Vals(v, s)),
                Polygon::ZeroSuspect if !zero_checked => {
                    let h = self.g.gcd(x);
                    if h.deg() == self.n {
                        return Ok(Prepared::Constant(Val::Inf));
                    }
                    if h.deg() > 0 {
                        return Ok(Prepared::Split(h));
                    }
                    zero_checked = true;
                }
                _ => {}
            }
            digits = self.bump(digits)?;
        }
    }

    fn separator(&self, ring: &Ring, gm: &[Loc]) -> Vec<Loc> {
        let mut w = vec![ring.one()];
        for &(id, m) in &self.recipe {
            let (xt, _) = self.integralize(ring, gm, &self.elems[id]);
            w = mul_mod(ring, &w, &pow_mod(ring, &xt, m, gm), gm);
        }
        w
    }

    fn tag_gap(&self) -> Option<Rational64> {
        let mut tags: Vec<Rational64> = self.groups.iter().map(|g| g.tag).collect();
        tags.sort();
        tags.dedup();
        tags.windows(2).map(|w| w[1] - w[0]).min()
    }

    /// Multiplier that keeps shifted value ranges of width `spread` apart.
    fn multiplier(&self, spread: Rational64) -> u64 {
        match self.tag_gap() {
            Some(gap) => (spread / gap).floor().to_integer() as u64 + 1,
            None => 0,
        }
    }

    /// Values of x * w^m on all roots, in pi-units of the integralized product.
    fn tagged_values(&mut self, x: &Poly, m: u64, hint: Rational64) -> Result<Vec<Rational64>, RootError> {
        let need = ((hint * self.n as i64) / self.field.e as i64).ceil().to_integer() as u32 * 2 + 8;
        let mut digits = self.digits.max(need.min(self.cap));
        loop {
            let (ring, gm) = self.ring_at(digits);
            let (xt, _) = self.integralize(&ring, &gm, x);
            let w = self.separator(&ring, &gm);
            let z = mul_mod(&ring, &xt, &pow_mod(&ring, &w, m, &gm), &gm);
            if let Polygon::Certain(v) = self.values_of(&ring, &gm, &z) {
                self.set_digits(digits);
                return Ok(v);
            }
            digits = self.bump(digits)?;
        }
    }

    /// Matches a prepared element to the groups, splitting groups as needed.
    pub fn absorb(&mut self, x: &Poly, prep: Prepared) -> Result<Outcome, RootError> {
        let e = self.field.e as i64;
        let (vals, s) = match prep {
            Prepared::Split(h) => return Ok(Outcome::Split(h)),
            Prepared::Constant(v) => {
                for g in self.groups.iter_mut() {
                    g.vals.push(v);
                }
                self.elems.push(x.clone());
                return Ok(Outcome::Done);
            }
            Prepared::Vals(v, s) => (v, s),
        };
        let id = self.elems.len();
        self.elems.push(x.clone());
        let to_val = |u: Rational64| Val::Fin((u - s) / e);
        let mut distinct = vals.clone();
        distinct.dedup();
        if distinct.len() == 1 {
            for g in self.groups.iter_mut() {
                g.vals.push(to_val(distinct[0]));
            }
            return Ok(Outcome::Done);
        }
        let (lo, hi) = (vals[0], *vals.last().unwrap());
        // per old group: list of (value in pi-units, count)
        let per_group: Vec<Vec<(Rational64, usize)>> = if self.groups.len() == 1 {
            vec![count(&vals)]
        } else {
            let m = self.multiplier(hi - lo);
            let tmax = self.groups.iter().map(|g| g.tag).max().unwrap();
            let us = self.tagged_values(x, m, hi + tmax * m as i64)?;
            let mut buckets: Vec<Vec<Rational64>> = vec![Vec::new(); self.groups.len()];
            for u in us {
                let hits: Vec<usize> = (0..self.groups.len())
                    .filter(|&i| {
                        let r = u - self.groups[i].tag * m as i64;
                        r >= lo && r <= hi
                    })
                    .collect();
                if hits.len() != 1 {
                    return Err(RootError::Inconsistent("ambiguous tag decoding".into()));
                }
                buckets[hits[0]].push(u - self.groups[hits[0]].tag * m as i64);
            }
            for (b, g) in buckets.iter_mut().zip(&self.groups) {
                if b.len() != g.size {
                    return Err(RootError::Inconsistent("group sizes disagree after tagging".into()));
                }
                b.sort();
            }
            buckets.iter().map(|b| count(b)).collect()
        };
        let splitting = per_group.iter().any(|c| c.len() > 1);
        let m2 = if splitting { self.multiplier(hi - lo).max(1) } else { 0 };
        let mut next = Vec::new();
        for (g, counts) in self.groups.iter().zip(&per_group) {
            for &(u, c) in counts {
                let mut ng = g.clone();
                ng.size = c;
                ng.vals.push(to_val(u));
                if splitting {
                    ng.tag = g.tag * m2 as i64 + u;
                }
                next.push(ng);
            }
        }
        if splitting {
            for r in self.recipe.iter_mut() {
                r.1 *= m2;
            }
            self.recipe.push((id, 1));
        }
        self.groups = next;
        Ok(Outcome::Done)
    }

    /// Certified degree of the Galois orbit making up a group: the group's
    /// slice of some characteristic polynomial has one slope and an
    /// irreducible residual polynomial.
    pub fn certify_degree(&mut self, gi: usize) -> Option<usize> {
        let size = self.groups[gi].size;
        if size == 1 {
            return Some(1);
        }
        let e = self.field.e as i64;
        let ids: Vec<usize> = (0..self.elems.len())
            .filter(|&i| !self.elems[i].is_constant() && self.groups.iter().all(|g| !g.vals[i].is_inf()))
            .take(8)
            .collect();
        for id in ids {
            let x = self.elems[id].clone();
            let vals: Vec<Rational64> = self.groups.iter().map(|g| g.vals[id].unwrap() * e).collect();
            let lo = *vals.iter().min().unwrap();
            let hi = *vals.iter().max().unwrap();
            let m = self.multiplier(hi - lo);
            let tmax = self.groups.iter().map(|g| g.tag).max().unwrap();
            let target_shifted = vals[gi] + self.groups[gi].tag * m as i64;
            let need = ((hi + tmax * m as i64) * self.n as i64 / e).ceil().to_integer() as u32 * 2 + 8;
            let mut digits = self.digits.max(need.min(self.cap));
            let found = loop {
                let (ring, gm) = self.ring_at(digits);
                let (xt, s) = self.integralize(&ring, &gm, &x);
                let w = self.separator(&ring, &gm);
                let z = mul_mod(&ring, &xt, &pow_mod(&ring, &w, m, &gm), &gm);
                let (cp, prec) = charpoly(&ring, mult_matrix(&ring, &z, &gm), ring.prec());
                if let Polygon::Certain(_) = polygon(&ring, &cp, prec) {
                    break Some((ring, cp, prec, s));
                }
                match self.bump(digits) {
                    Ok(d) => digits = d,
                    Err(_) => break None,
                }
            };
            let Some((ring, cp, prec, s)) = found else { continue };
            let want = target_shifted + Rational64::from_integer(s);
            let pts: Vec<(usize, Rational64)> = cp
                .iter()
                .enumerate()
                .filter_map(|(i, c)| ring.val_below(c, prec).map(|v| (i, Rational64::from_integer(v))))
                .collect();
            let np = NewtonPolygon::from_points(&pts);
            let Some(seg) = np.segments.iter().find(|sg| sg.root_valuation() == want) else { continue };
            if seg.length() != size {
                continue;
            }
            let Some(res) = residual(&ring, &cp, prec, seg.start, seg.end, seg.slope) else { continue };
            let rp = ResiduePoly::new(&self.field, res);
            let deg = rp.degree().unwrap_or(0);
            if deg * (*seg.slope.denom() as usize) == size && rp.is_irreducible() {
                return Some(size);
            }
        }
        None
    }
}

fn count(sorted: &[Rational64]) -> Vec<(Rational64, usize)> {
    let mut out: Vec<(Rational64, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((w, c)) if *w == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Valuation of x at an exact root.
pub(crate) fn exact_val(x: &Poly, y: &FieldElement) -> Val {
    x.eval(y).valuation()
}
