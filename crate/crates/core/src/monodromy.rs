//! Coarse bound for the field over which the stable model exists.
//!
//! E is obtained by adjoining the centers, the radii rho and the p-th roots of
//! s0 at the centers. The bound is
//! lcm(radius and slope denominators) * prod(branch degrees) * p^(#classes),
//! an upper bound for [E:K] and nothing sharper.

use num_integer::Integer;
use num_rational::Rational64;

use crate::monopoly::MonodromyData;
use crate::numfield::Val;
use crate::padicroots::RootData;
use crate::polyalg::NewtonPolygon;
use crate::reduction::ReductionTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchDegree {
    pub block: usize,
    pub group: usize,
    pub degree: usize,
    /// false when the group size stands in for an uncertified degree
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicandData {
    pub class: usize,
    pub s0_valuation: Val,
    /// Always true: finite residue fields are perfect.
    pub residue_is_pth_power: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemarkCase {
    pub l: usize,
    pub s: u32,
    pub d: usize,
    pub case: u8,
    pub exponent: u32,
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyBoundReport {
    /// Denominators of the root valuations of L, in units of v(pi).
    pub slope_denominators: Vec<i64>,
    pub branch_degrees: Vec<BranchDegree>,
    /// Denominators of the radii, in units of v(pi).
    pub radius_denominators: Vec<i64>,
    pub radicand_data: Vec<RadicandData>,
    pub classes: usize,
    pub degree_bound: u128,
    pub annotations: RemarkCase,
}

fn pi_denominator(v: Rational64, e: u32) -> i64 {
    *(v * e as i64).denom()
}

pub fn bound_report(md: &MonodromyData, roots: &RootData, tree: &ReductionTree, p: u64, e: u32) -> MonodromyBoundReport {
    let mut slope_denominators: Vec<i64> =
        NewtonPolygon::of(&md.l).root_valuations().into_iter().map(|v| pi_denominator(v, e)).collect();
    slope_denominators.sort();
    slope_denominators.dedup();
    let mut branch_degrees = Vec::new();
    for (b, blk) in roots.blocks.iter().enumerate() {
        for (g, grp) in blk.groups.iter().enumerate() {
            branch_degrees.push(BranchDegree { block: b, group: g, degree: grp.degree.unwrap_or(grp.size), certified: grp.degree.is_some() });
        }
    }
    let mut radius_denominators: Vec<i64> = tree.components.iter().map(|c| pi_denominator(c.radius_valuation, e)).collect();
    radius_denominators.sort();
    radius_denominators.dedup();
    let radicand_data = tree
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| RadicandData { class: k, s0_valuation: c.s0_at_center_valuation, residue_is_pth_power: true })
        .collect();
    let classes = tree.classes.len();
    let lcm = slope_denominators.iter().chain(&radius_denominators).fold(1i64, |a, b| a.lcm(b)) as u128;
    let prod: u128 = branch_degrees.iter().map(|b| b.degree as u128).product();
    let degree_bound = lcm * prod * (p as u128).pow(classes as u32);
    MonodromyBoundReport {
        slope_denominators,
        branch_degrees,
        radius_denominators,
        radicand_data,
        classes,
        degree_bound,
        annotations: remark_gg_case(md.m, p),
    }
}

/// m = l p^s + d with (l, p) = 1 and 1 <= d <= p - 1.
///
/// d is m mod p when that is nonzero and leaves l >= 1; otherwise the
/// largest d that leaves m - d >= 1. Whenever the first choice is not
/// available the result is flagged ambiguous.
pub fn remark_gg_case(m: usize, p: u64) -> RemarkCase {
    let pu = p as usize;
    let natural = m % pu;
    let (d, ambiguous) = if natural != 0 && m > natural {
        (natural, false)
    } else {
        match (1..pu).rev().find(|&d| m > d) {
            Some(d) => (d, true),
            None => (m.max(1), true),
        }
    };
    let mut rest = m.saturating_sub(d);
    let mut s = 0;
    while rest > 0 && rest % pu == 0 {
        rest /= pu;
        s += 1;
    }
    let l = rest;
    let (case, exponent) = if d != 1 {
        (1, 1)
    } else if l > 1 {
        (2, if p == 2 { s } else { s + 1 })
    } else {
        (3, 2 * s + 1)
    };
    RemarkCase { l, s, d, case, exponent, ambiguous }
}
