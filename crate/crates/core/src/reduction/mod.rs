//! Radii, Artin-Schreier reductions, genera and the reduction tree.
//!
//! Per center the data comes from [`CenterValues`]: valuations of the tail
//! terms A_i, of the head of H and of the coefficients of f(X+y)/s0(y) - H^p,
//! all read off the root groups of the monodromy polynomial.

mod tree;

#[cfg(test)]
mod tests;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::decomp::{bipow, prime_to_p, SpecialDecomposition};
use crate::numfield::{extend_field, Field, FieldElement, ResidueElement, ResiduePoly, Val};
use crate::padicroots::{yun, RootGroup};
use crate::polyalg::{Poly, RatFunc, Var};

pub use tree::{build_tree, classify_genus2, dedupe_centers, genus_sum_check, CenterClass, ClusterInput, ReductionTree, TreeNode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("f is not monic")]
    NotMonic,
    #[error("f has a coefficient of negative valuation")]
    NonIntegral,
    #[error("degree {n} is divisible by p = {p}")]
    DegreeDivisibleByP { n: usize, p: u64 },
    #[error("a zero of f has multiplicity {mult}, divisible by p = {p}")]
    MultiplicityDivisibleByP { mult: usize, p: u64 },
    #[error("branch locus is not equidistant: {m} distinct zeros but the reduction has repeated zeros")]
    NotEquidistant { m: usize },
    #[error("no finite tail valuation at the center")]
    EmptyTail,
    #[error("s0 has valuation {0} at a center, expected 0")]
    NonUnitS0AtCenter(Val),
    #[error("invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("roots in one closeness class disagree: {0}")]
    InconsistentRadiiInClass(String),
    #[error("unrecognized tree shape: {0}")]
    UnrecognizedShape(String),
    #[error("genus-2 classification needs p = 2 and m = 5, got p = {p}, m = {m}")]
    NotGenus2Case { p: u64, m: usize },
}

impl ReductionError {
    /// Errors caused by the input rather than by the computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            ReductionError::NotMonic
                | ReductionError::NonIntegral
                | ReductionError::DegreeDivisibleByP { .. }
                | ReductionError::MultiplicityDivisibleByP { .. }
                | ReductionError::NotEquidistant { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub n: usize,
    pub m: usize,
    pub genus: usize,
    /// Multiplicities of the distinct zeros of f, with repetition.
    pub multiplicities: Vec<usize>,
    pub warnings: Vec<String>,
}

fn residue_poly(f: &Poly) -> ResiduePoly {
    let field = f.field().clone();
    ResiduePoly::new(&field, f.coeffs().iter().map(|c| c.residue().expect("integral")).collect())
}

fn residue_derivative(g: &ResiduePoly) -> ResiduePoly {
    let field = g.coeffs().first().map(|c| c.field().clone());
    match field {
        None => g.clone(),
        Some(field) => {
            let c = g.coeffs().iter().enumerate().skip(1).map(|(i, a)| a * &ResidueElement::from_u64(&field, i as u64)).collect();
            ResiduePoly::new(&field, c)
        }
    }
}

pub fn validate_input(f: &Poly, p: u64) -> Result<Diagnostics, ReductionError> {
    let n = f.degree().ok_or(ReductionError::NotMonic)?;
    if !f.is_monic() {
        return Err(ReductionError::NotMonic);
    }
    if f.coeffs().iter().any(|c| c.valuation() < Val::zero()) {
        return Err(ReductionError::NonIntegral);
    }
    let parts = yun(f);
    let mut multiplicities = Vec::new();
    for (g, mult) in &parts {
        if *mult as u64 % p == 0 {
            return Err(ReductionError::MultiplicityDivisibleByP { mult: *mult, p });
        }
        multiplicities.extend(std::iter::repeat(*mult).take(g.deg()));
    }
    let s0 = parts.iter().fold(Poly::one(f.field(), f.var()), |acc, (g, _)| acc.mul(g));
    let m = s0.deg();
    // s0 is monic with integral roots, so its reduction has degree m
    let bar = residue_poly(&s0);
    if bar.gcd(&residue_derivative(&bar)).degree() != Some(0) {
        return Err(ReductionError::NotEquidistant { m });
    }
    if n as u64 % p == 0 {
        return Err(ReductionError::DegreeDivisibleByP { n, p });
    }
    let mut warnings = Vec::new();
    if m * (p as usize - 1) < n {
        warnings.push(format!("m(p-1) = {} < n = {n}", m * (p as usize - 1)));
    }
    Ok(Diagnostics { n, m, genus: (p as usize - 1) * (m - 1) / 2, multiplicities, warnings })
}

/// The polynomials whose values at the roots of L are needed, in a fixed order.
#[derive(Clone, Debug)]
pub struct ElementPlan {
    pub elements: Vec<Poly>,
    /// (i, index of N_i); None marks i = p^alpha
    tail: Vec<(usize, Option<usize>)>,
    /// (i, numerator index, denominator index) for [X^i](f(X+Y)/s0 - H^p)
    diff: Vec<(usize, usize, usize)>,
    /// (j, index of h_num_j)
    head: Vec<(usize, usize)>,
}

/// Valuations at one center y.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterValues {
    pub s0: Val,
    /// v(A_i(y)) for i in M0
    pub tail: Vec<(usize, Val)>,
    /// v of the X^i coefficient of f(X+y)/s0(y) - H(X,y)^p, i in M0
    pub diff: Vec<(usize, Val)>,
    /// v of the X^j coefficient of H(X,y), j = 1..=r
    pub head: Vec<(usize, Val)>,
}

impl ElementPlan {
    pub fn new(dec: &SpecialDecomposition) -> Result<Self, ReductionError> {
        let rep = &dec.rep;
        let s0 = dec.s0();
        let mut elements = vec![s0.clone()];
        let mut tail = Vec::new();
        for t in &dec.tail {
            if t.i == rep.p_alpha {
                tail.push((t.i, None));
            } else {
                tail.push((t.i, Some(elements.len())));
                elements.push(t.n.clone());
            }
        }
        // the verification side is rebuilt from s_i and H directly
        let hp = bipow(&dec.h_num, rep.p as u32, None);
        let den = s0.pow((rep.r * rep.p as usize) as u32);
        let mut diff = Vec::new();
        for i in 1..=rep.n {
            let hp_i = hp.get(i).cloned().unwrap_or_else(|| Poly::zero(dec.field(), Var::Y));
            let c = RatFunc::new(dec.s[i].clone(), s0.clone()).sub(&RatFunc::new(hp_i, den.clone()));
            if i <= rep.r {
                if !c.is_zero() {
                    return Err(ReductionError::InternalInvariantViolation(format!("X^{i} coefficient of the difference is nonzero")));
                }
                continue;
            }
            diff.push((i, elements.len(), elements.len() + 1));
            elements.push(c.num.clone());
            elements.push(c.den.clone());
        }
        let mut head = Vec::new();
        for j in 1..=rep.r {
            head.push((j, elements.len()));
            elements.push(dec.h_num[j].clone());
        }
        Ok(ElementPlan { elements, tail, diff, head })
    }

    pub fn values(&self, dec: &SpecialDecomposition, vals: &[Val]) -> CenterValues {
        let r = dec.rep.r as i64;
        let s0 = vals[0];
        let tail = self
            .tail
            .iter()
            .map(|&(i, idx)| {
                let v = match idx {
                    None => Val::Inf,
                    Some(k) => dec.tail_term(i).unwrap().c.valuation() + vals[k] + (s0 * -(i as i64)),
                };
                (i, v)
            })
            .collect();
        let diff = self
            .diff
            .iter()
            .map(|&(i, a, b)| {
                let v = match (vals[a], vals[b]) {
                    (Val::Inf, _) => Val::Inf,
                    (x, Val::Fin(d)) => x - d,
                    (_, Val::Inf) => Val::Inf,
                };
                (i, v)
            })
            .collect();
        let head = self.head.iter().map(|&(j, k)| (j, vals[k] + s0 * -r)).collect();
        CenterValues { s0, tail, diff, head }
    }

    /// Values at a center known exactly.
    pub fn values_at(&self, dec: &SpecialDecomposition, y: &FieldElement) -> CenterValues {
        let vals: Vec<Val> = self.elements.iter().map(|x| x.eval(y).valuation()).collect();
        let mut out = self.values(dec, &vals);
        // y need not be a zero of L here, so A_{p^alpha} is evaluated too
        let pa = dec.rep.p_alpha;
        if let (Some(t), Some(slot)) = (dec.tail_term(pa), out.tail.iter_mut().find(|x| x.0 == pa)) {
            slot.1 = t.a.eval(y).map_or(Val::Inf, |v| v.valuation());
        }
        out
    }
}

/// max over finite tail valuations of (v(lambda^p) - v(A_i)) / i.
pub fn radius_valuation(tail_vals: &[(usize, Val)], lambda_p_val: Rational64) -> Result<Rational64, ReductionError> {
    tail_vals
        .iter()
        .filter_map(|&(i, v)| v.finite().map(|v| (lambda_p_val - v) / Rational64::from_integer(i as i64)))
        .max()
        .ok_or(ReductionError::EmptyTail)
}

/// Indices where v(A_i) + i v(rho) = v(lambda^p).
pub fn surviving_indices(tail_vals: &[(usize, Val)], radius: Rational64, lambda_p_val: Rational64) -> Vec<usize> {
    tail_vals
        .iter()
        .filter(|&&(i, v)| v.finite().map_or(false, |v| v + radius * i as i64 == lambda_p_val))
        .map(|&(i, _)| i)
        .collect()
}

/// Removes exponents divisible by p with x^i -> c^(1/p) x^(i/p), merging terms.
pub fn as_normalize(g: &ResiduePoly) -> ResiduePoly {
    let mut c: Vec<ResidueElement> = g.coeffs().to_vec();
    let Some(first) = c.first().cloned() else { return g.clone() };
    let field = first.field().clone();
    let p = field.p as usize;
    loop {
        let hit = (1..c.len()).rev().find(|&i| i % p == 0 && !c[i].is_zero());
        let Some(i) = hit else { break };
        let moved = c[i].frobenius_inverse();
        c[i] = ResidueElement::zero(&field);
        c[i / p] = &c[i / p] + &moved;
    }
    ResiduePoly::new(&field, c)
}

/// Where a center sits among the root groups of L.
#[derive(Clone, Debug)]
pub struct CenterRef {
    pub block: usize,
    pub group: usize,
    pub size: usize,
    pub slope: Val,
    pub exact: Option<FieldElement>,
    pub degree: Option<usize>,
    pub multiplicity: usize,
}

impl CenterRef {
    pub fn new(block: usize, group: usize, multiplicity: usize, g: &RootGroup) -> Self {
        CenterRef {
            block,
            group,
            size: g.size,
            slope: g.slope,
            exact: g.exact.clone(),
            degree: g.degree,
            multiplicity,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurvivingTerm {
    pub i: usize,
    /// Residue of A_i(y) rho^i / lambda^p; exact for p = 2, up to one common unit otherwise.
    pub residue: Option<ResidueElement>,
}

#[derive(Clone, Debug)]
pub struct ComponentData {
    pub center: CenterRef,
    pub radius_valuation: Rational64,
    pub surviving: Vec<SurvivingTerm>,
    /// Normalized right-hand side g(x) of Z^p - Z = g(x), when the center is exact.
    pub as_rhs: Option<ResiduePoly>,
    pub conductor_d: usize,
    pub genus: usize,
    pub s0_at_center_valuation: Val,
    /// Both degeneration conditions at rho, checked on the valuations.
    pub verified: bool,
}

/// Residues of A_i(y) rho^i / lambda^p at an exact center, computed in the
/// ramified extension where rho = pi^k exists; lambda^p is replaced by a
/// power of pi, which is exact for p = 2 since lambda^2 = 4.
fn exact_residues(dec: &SpecialDecomposition, y: &FieldElement, radius: Rational64, idx: &[usize]) -> Option<Vec<ResidueElement>> {
    let field = dec.field();
    let lam = field.lambda_p_valuation();
    let den = (radius * field.e as i64).denom().lcm((lam * field.e as i64).denom());
    let (big, emb) = extend_field(field, field.e * den as u32, &field.residue_modulus, 8).ok()?;
    let ye = emb.apply(y);
    let k = (radius * big.e as i64).to_integer();
    let l = (lam * big.e as i64).to_integer();
    let mut out = Vec::new();
    for &i in idx {
        let t = dec.tail_term(i)?;
        let a = RatFunc::new(t.a.num.with_var(Var::Y), t.a.den.clone());
        let num = map_poly(&a.num, &emb.target, |c| emb.apply(c)).eval(&ye);
        let d = map_poly(&a.den, &emb.target, |c| emb.apply(c)).eval(&ye);
        let val = &(&num * &d.inv()?) * &FieldElement::pi_pow(&big, k * i as i64 - l);
        let r = val.residue().ok()?;
        out.push(ResidueElement::new(field, r.coeffs().to_vec()));
    }
    Some(out)
}

fn map_poly(a: &Poly, field: &Field, f: impl Fn(&FieldElement) -> FieldElement) -> Poly {
    Poly::new(field, a.var(), a.coeffs().iter().map(f).collect())
}

/// Condition i (H(rho X, y) integral) and condition ii (minimum valuation of
/// the difference equals v(lambda^p)) at v(rho) = t.
pub fn conditions_hold(values: &CenterValues, t: Rational64, lambda_p_val: Rational64) -> bool {
    let cond_i = values.head.iter().all(|&(j, v)| v.finite().map_or(true, |v| v + t * j as i64 >= Rational64::zero()));
    let min = values.diff.iter().filter_map(|&(i, v)| v.finite().map(|v| v + t * i as i64)).min();
    cond_i && min == Some(lambda_p_val)
}

/// Independent radius search: every t = a/b with b <= max_den in (0, bound]
/// at which both conditions hold.
pub fn grid_radius(values: &CenterValues, lambda_p_val: Rational64, max_den: i64) -> Vec<Rational64> {
    let lo = values.diff.iter().filter_map(|&(_, v)| v.finite()).min().unwrap_or_else(Rational64::zero);
    let bound = (lambda_p_val - lo).max(Rational64::zero()) + Rational64::one();
    let mut out = Vec::new();
    for b in 1..=max_den {
        let top = (bound * b).ceil().to_integer();
        for a in 1..=top {
            if a.gcd(&b) != 1 {
                continue;
            }
            let t = Rational64::new(a, b);
            if conditions_hold(values, t, lambda_p_val) {
                out.push(t);
            }
        }
    }
    out.sort();
    out
}

pub fn reduced_equation(dec: &SpecialDecomposition, center: CenterRef, values: &CenterValues) -> Result<ComponentData, ReductionError> {
    let field = dec.field().clone();
    let p = field.p;
    let lam = field.lambda_p_valuation();
    if values.s0 != Val::zero() {
        return Err(ReductionError::NonUnitS0AtCenter(values.s0));
    }
    let radius = radius_valuation(&values.tail, lam)?;
    if radius <= Rational64::zero() {
        return Err(ReductionError::InternalInvariantViolation(format!("radius {radius} is not positive")));
    }
    let idx = surviving_indices(&values.tail, radius, lam);
    if idx.contains(&dec.rep.p_alpha) {
        return Err(ReductionError::InternalInvariantViolation("p^alpha survives".into()));
    }
    let mut parts: Vec<usize> = idx.iter().map(|&i| prime_to_p(i, p)).collect();
    parts.sort();
    if parts.windows(2).any(|w| w[0] == w[1]) {
        return Err(ReductionError::InternalInvariantViolation("surviving indices share a prime-to-p part".into()));
    }
    let mut conductor_d = parts.last().copied().unwrap_or(0);
    let residues = center.exact.as_ref().and_then(|y| exact_residues(dec, y, radius, &idx));
    let mut as_rhs = None;
    if let Some(res) = &residues {
        let top = idx.iter().max().copied().unwrap_or(0);
        let mut c = vec![ResidueElement::zero(&field); top + 1];
        for (&i, r) in idx.iter().zip(res) {
            c[i] = r.clone();
        }
        let g = as_normalize(&ResiduePoly::new(&field, c));
        let d = g.degree().unwrap_or(0);
        if d != conductor_d {
            return Err(ReductionError::InternalInvariantViolation(format!("normalized degree {d} differs from conductor {conductor_d}")));
        }
        conductor_d = d;
        as_rhs = Some(g);
    }
    if conductor_d < 2 || conductor_d as u64 % p == 0 {
        return Err(ReductionError::InternalInvariantViolation(format!("conductor {conductor_d}")));
    }
    let surviving = idx
        .iter()
        .enumerate()
        .map(|(k, &i)| SurvivingTerm { i, residue: residues.as_ref().map(|r| r[k].clone()) })
        .collect();
    Ok(ComponentData {
        center,
        radius_valuation: radius,
        surviving,
        as_rhs,
        genus: (p as usize - 1) * (conductor_d - 1) / 2,
        conductor_d,
        s0_at_center_valuation: values.s0,
        verified: conditions_hold(values, radius, lam),
    })
}

/// Exact check of both conditions at a center y in K and a concrete rho in K.
pub fn verify_reduction(dec: &SpecialDecomposition, y: &FieldElement, rho: &FieldElement) -> bool {
    let field = dec.field().clone();
    let rep = &dec.rep;
    let s0 = dec.s0().eval(y);
    let Some(s0inv) = s0.inv() else { return false };
    let s0r = s0inv.pow(rep.r as u32);
    let mut h = Vec::new();
    let mut rp = FieldElement::one(&field);
    for hj in &dec.h_num {
        h.push(&(&hj.eval(y) * &s0r) * &rp);
        rp = &rp * rho;
    }
    if h.iter().any(|c| c.valuation() < Val::zero()) {
        return false;
    }
    let hp = Poly::new(&field, Var::X, h).pow(rep.p as u32);
    let mut lhs = Vec::new();
    let mut rp = FieldElement::one(&field);
    for si in &dec.s {
        lhs.push(&(&si.eval(y) * &s0inv) * &rp);
        rp = &rp * rho;
    }
    let diff = Poly::new(&field, Var::X, lhs).sub(&hp);
    let min = diff.coeffs().iter().map(|c| c.valuation()).min().unwrap_or(Val::Inf);
    min == Val::Fin(field.lambda_p_valuation())
}
