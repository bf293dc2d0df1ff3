//! Certified valuation data at the roots of a polynomial over K.
//!
//! Roots are never written down. A squarefree factor g of the target is
//! treated as the algebra K[Y]/g, and the valuation of an element x at the
//! roots is read off the Newton polygon of its characteristic polynomial,
//! computed in truncated p-adic arithmetic and certified against the
//! truncation. Exact zeros are caught by an exact gcd and split off.
//!
//! The result is a partition of the roots into groups: Galois-stable sets on
//! which every requested element has one valuation. Distances between roots
//! are handled the same way, through the Taylor coefficients of each factor.

mod algebra;
mod local;


use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numfield::{FieldElement, ResiduePoly, Val};
use crate::polyalg::{NewtonPolygon, Poly, Var};
use algebra::{exact_val, LocalBlock, Outcome, Prepared};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("precision cap of {0} p-adic digits exceeded")]
    PrecisionCapExceeded(u32),
    #[error("root field degree {needed} exceeds the extension limit {limit}")]
    EscalationLimit { needed: usize, limit: usize },
    #[error("inconsistent root data: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug)]
pub struct RootOptions {
    /// Hard cap on working precision, in p-adic digits.
    pub cap_digits: u32,
    pub start_digits: u32,
    /// Largest allowed e*k times the degree of a root block.
    pub max_extension: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { cap_digits: 512, start_digits: 24, max_extension: 1 << 16 }
    }
}

/// One segment of a Newton polygon with its residual polynomial.
#[derive(Clone, Debug)]
pub struct SlopeSegment {
    /// valuation of the roots on this segment
    pub slope: Rational64,
    pub length: usize,
    pub residual: ResiduePoly,
}

/// Segments of the polygon of F after removing the zero root, each with
/// the residual polynomial whose roots are the leading digits.
pub fn slope_split(f: &Poly) -> Vec<SlopeSegment> {
    let field = f.field().clone();
    let e = field.e as i64;
    let np = NewtonPolygon::of(f);
    let mut out = Vec::new();
    for seg in np.segments.iter().rev() {
        // slope in pi-units, lowest terms
        let sl = seg.slope * e;
        let d = *sl.denom() as usize;
        let h = -*sl.numer();
        let v0 = (np.vertices.iter().find(|v| v.0 == seg.start).unwrap().1 * e).to_integer();
        let mut coeffs = Vec::new();
        let mut t = 0;
        while seg.start + t * d <= seg.end {
            let c = f.coeff(seg.start + t * d);
            let target = v0 - t as i64 * h;
            let scaled = &c * &FieldElement::pi_pow(&field, -target);
            coeffs.push(if scaled.valuation() == Val::zero() {
                scaled.residue().unwrap()
            } else {
                crate::numfield::ResidueElement::zero(&field)
            });
            t += 1;
        }
        out.push(SlopeSegment {
            slope: seg.root_valuation(),
            length: seg.length(),
            residual: ResiduePoly::new(&field, coeffs),
        });
    }
    out
}

/// A Galois-stable set of roots on which all requested data is constant.
#[derive(Clone, Debug)]
pub struct RootGroup {
    pub size: usize,
    /// v(y)
    pub slope: Val,
    /// The root itself when it lies in K.
    pub exact: Option<FieldElement>,
    /// Valuations of the requested elements, in request order.
    pub vals: Vec<Val>,
    /// v(y - z) over all other roots z, as (value, count), increasing.
    pub distances: Vec<(Rational64, usize)>,
    /// Degree of K(y)/K when certified; then the group is a single orbit.
    pub degree: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RootBlock {
    /// Factor of the target over K, squarefree.
    pub poly: Poly,
    pub multiplicity: usize,
    pub groups: Vec<RootGroup>,
}

#[derive(Clone, Debug)]
pub struct RootData {
    pub blocks: Vec<RootBlock>,
}

impl RootData {
    pub fn groups(&self) -> impl Iterator<Item = (usize, &RootGroup)> {
        self.blocks.iter().enumerate().flat_map(|(b, blk)| blk.groups.iter().map(move |g| (b, g)))
    }

    pub fn root_count(&self) -> usize {
        self.blocks.iter().map(|b| b.poly.deg()).sum()
    }

    /// Root valuations with multiplicity, as the polygon of the target sees them.
    pub fn valuation_multiset(&self) -> Vec<Val> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for g in &b.groups {
                for _ in 0..g.size * b.multiplicity {
                    out.push(g.slope);
                }
            }
        }
        out.sort();
        out
    }
}

/// Squarefree decomposition: pairs (P_i, i) with target = lc * prod P_i^i.
pub fn yun(a: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let d = a.derivative();
    let mut c = a.gcd(&d);
    let mut w = a.div_exact(&c).unwrap().monic();
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).unwrap();
        if z.deg() > 0 {
            out.push((z.monic(), i));
        }
        c = c.div_exact(&y).unwrap();
        w = y;
        i += 1;
    }
    out
}

enum Block {
    Exact(FieldElement),
    Local(Box<LocalBlock>),
}

struct Work {
    poly: Poly,
    mult: usize,
}

fn split_zero_root(parts: Vec<(Poly, usize)>) -> Vec<Work> {
    let mut out = Vec::new();
    for (g, m) in parts {
        if g.coeff(0).is_zero() && g.deg() > 1 {
            let y = Poly::x(g.field(), g.var());
            out.push(Work { poly: y.clone(), mult: m });
            out.push(Work { poly: g.div_exact(&y).unwrap(), mult: m });
        } else {
            out.push(Work { poly: g, mult: m });
        }
    }
    out
}

fn make_block(w: &Work, opts: &RootOptions) -> Block {
    if w.poly.deg() == 1 {
        let y = -(&w.poly.coeff(0) * &w.poly.lc().inv().unwrap());
        Block::Exact(y)
    } else {
        Block::Local(Box::new(LocalBlock::new(&w.poly, opts.start_digits, opts.cap_digits)))
    }
}

/// Taylor coefficients of g(Y + Z) in Z; for the block itself the zeroth one
/// is dropped, so the Z-polygon gives distances to the other roots.
fn distance_coefficients(other: &Poly, same: bool) -> Vec<Poly> {
    let mut t = other.taylor_shift();
    if same {
        t.remove(0);
    }
    t
}

/// Runs one element through a block; Some(h) asks for an exact split.
fn feed(block: &mut Block, x: &Poly, prep: Option<Prepared>, out: &mut Vec<Val>) -> Result<Option<Poly>, RootError> {
    match block {
        Block::Exact(y) => {
            out.push(exact_val(x, y));
            Ok(None)
        }
        Block::Local(lb) => {
            let prep = match prep {
                Some(p) => p,
                None => lb.prepare(x)?,
            };
            match lb.absorb(x, prep)? {
                Outcome::Done => Ok(None),
                Outcome::Split(h) => Ok(Some(h)),
            }
        }
    }
}

fn feed_all(block: &mut Block, xs: &[Poly]) -> Result<Option<Poly>, RootError> {
    let preps: Vec<Option<Prepared>> = match block {
        Block::Exact(_) => xs.iter().map(|_| None).collect(),
        Block::Local(lb) => {
            let lb: &LocalBlock = lb;
            let r: Result<Vec<Prepared>, RootError> = xs.par_iter().map(|x| lb.prepare(x)).collect();
            r?.into_iter().map(Some).collect()
        }
    };
    let mut scratch = Vec::new();
    for (x, p) in xs.iter().zip(preps) {
        if let Some(h) = feed(block, x, p, &mut scratch)? {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// Groups the roots of `target` by the valuations of `elements` and by their
/// distances to each other.
pub fn analyze_roots(target: &Poly, elements: &[Poly], opts: &RootOptions) -> Result<RootData, RootError> {
    let field = target.field().clone();
    let ek = (field.e * field.k) as usize;
    let mut work = split_zero_root(yun(target));
    for w in &work {
        if w.poly.deg() * ek > opts.max_extension {
            return Err(RootError::EscalationLimit { needed: w.poly.deg() * ek, limit: opts.max_extension });
        }
    }
    'restart: loop {
        let mut blocks: Vec<Block> = work.iter().map(|w| make_block(w, opts)).collect();
        let mut exact_vals: Vec<Vec<Val>> = vec![Vec::new(); blocks.len()];
        // Y first, then the caller's elements, then distance coefficients
        let mut requests: Vec<Poly> = vec![Poly::x(&field, Var::Y)];
        requests.extend(elements.iter().map(|x| x.with_var(Var::Y)));
        let n_req = requests.len();
        for (bi, b) in blocks.iter_mut().enumerate() {
            let mut xs = requests.clone();
            for (bj, w) in work.iter().enumerate() {
                xs.extend(distance_coefficients(&w.poly.with_var(Var::Y), bi == bj));
            }
            if let Block::Exact(y) = b {
                exact_vals[bi] = xs.iter().map(|x| exact_val(x, y)).collect();
                continue;
            }
            if let Some(h) = feed_all(b, &xs)? {
                let old = work.remove(bi);
                let rest = old.poly.div_exact(&h).unwrap();
                work.push(Work { poly: h.monic(), mult: old.mult });
                work.push(Work { poly: rest.monic(), mult: old.mult });
                continue 'restart;
            }
        }
        let mut out = Vec::new();
        for (bi, b) in blocks.iter_mut().enumerate() {
            let w = &work[bi];
            let raw: Vec<(usize, Vec<Val>, Option<FieldElement>, Option<usize>)> = match b {
                Block::Exact(y) => vec![(1, exact_vals[bi].clone(), Some(y.clone()), Some(1))],
                Block::Local(lb) => {
                    let n = lb.groups.len();
                    (0..n)
                        .map(|gi| {
                            let deg = lb.certify_degree(gi);
                            (lb.groups[gi].size, lb.groups[gi].vals.clone(), None, deg)
                        })
                        .collect()
                }
            };
            let mut groups = Vec::new();
            for (size, vals, exact, degree) in raw {
                let mut distances = Vec::new();
                let mut off = n_req;
                for (bj, wj) in work.iter().enumerate() {
                    let len = wj.poly.deg() + if bi == bj { 0 } else { 1 };
                    let pts: Vec<(usize, Rational64)> =
                        (0..len).filter_map(|k| vals[off + k].finite().map(|v| (k, v))).collect();
                    off += len;
                    let np = NewtonPolygon::from_points(&pts);
                    if np.ord_zero > 0 {
                        return Err(RootError::Inconsistent("coincident roots in distinct blocks".into()));
                    }
                    distances.extend(np.root_valuations());
                }
                distances.sort();
                let mut dcount: Vec<(Rational64, usize)> = Vec::new();
                for d in distances {
                    match dcount.last_mut() {
                        Some((v, c)) if *v == d => *c += 1,
                        _ => dcount.push((d, 1)),
                    }
                }
                groups.push(RootGroup {
                    size,
                    slope: vals[0],
                    exact,
                    vals: vals[1..n_req].to_vec(),
                    distances: dcount,
                    degree,
                });
            }
            out.push(RootBlock { poly: w.poly.clone(), multiplicity: w.mult, groups });
        }
        return Ok(RootData { blocks: out });
    }
}
