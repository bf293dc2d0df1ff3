//! validate -> decompose -> L -> roots -> reduction -> tree -> bound.

use std::time::Instant;

use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

use stablered::decomp::{c_p_alpha_valuation_ok, head_by_recursion, min_reps, special_decomposition, SpecialDecomposition};
use stablered::monodromy::{bound_report, MonodromyBoundReport};
use stablered::monopoly::{check_congruence, monodromy_polynomial, MonodromyData};
use stablered::numfield::{Field, Val};
use stablered::padicroots::{analyze_roots, RootData, RootError, RootOptions};
use stablered::polyalg::{NewtonPolygon, Poly};
use stablered::reduction::{
    build_tree, classify_genus2, genus_sum_check, grid_radius, reduced_equation, validate_input, CenterRef, CenterValues, ClusterInput,
    ComponentData, Diagnostics, ElementPlan, ReductionError, ReductionTree,
};

/// Largest denominator tried by the grid search.
pub const GRID_DENOMINATOR: i64 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("[{stage}] input rejected: {msg}")]
    Input { stage: &'static str, msg: String },
    #[error("[{stage}] {msg}")]
    Internal { stage: &'static str, msg: String },
}

impl RunError {
    pub fn input(stage: &'static str, msg: impl Into<String>) -> Self {
        RunError::Input { stage, msg: msg.into() }
    }

    pub fn internal(stage: &'static str, msg: impl Into<String>) -> Self {
        RunError::Internal { stage, msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input { .. } => 1,
            RunError::Internal { .. } => 2,
        }
    }
}

fn reduction_err(stage: &'static str, e: ReductionError) -> RunError {
    if e.is_input_error() {
        RunError::input(stage, e.to_string())
    } else {
        RunError::internal(stage, e.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub roots: RootOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { roots: RootOptions::default() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Checks {
    /// f(X+Y) = s0 (H^p - sum A_i X^i)
    pub identity: bool,
    /// head of H by power series and by recursion agree
    pub two_paths: bool,
    /// L = S1^(p^alpha) mod p
    pub congruence: bool,
    pub degree: bool,
    /// A_{p^alpha} vanishes at every zero of L
    pub exact_zero: bool,
    /// root valuations from the polygon of L equal those of the isolated roots
    pub newton_matches_roots: bool,
    /// every root sees all other roots in its distance profile
    pub distance_profiles: bool,
    /// only meaningful when p does not divide m
    pub c_p_alpha_valuation: Option<bool>,
    pub genus_sum: bool,
    /// both degeneration conditions at every center
    pub verified: bool,
    /// grid search finds exactly the closed-form radius where the grid can see it
    pub grid_agrees: bool,
}

impl Checks {
    pub fn all_pass(&self) -> bool {
        self.identity
            && self.two_paths
            && self.congruence
            && self.degree
            && self.exact_zero
            && self.newton_matches_roots
            && self.distance_profiles
            && self.c_p_alpha_valuation != Some(false)
            && self.genus_sum
            && self.verified
            && self.grid_agrees
    }
}

pub struct Analysis {
    pub field: Field,
    pub f: Poly,
    pub diag: Diagnostics,
    pub dec: SpecialDecomposition,
    pub md: MonodromyData,
    pub roots: RootData,
    /// (block, group, values) in root order
    pub values: Vec<(usize, usize, CenterValues)>,
    pub components: Vec<ComponentData>,
    pub grid: Vec<Vec<Rational64>>,
    pub tree: ReductionTree,
    pub reduction_type: Option<u8>,
    pub bound: MonodromyBoundReport,
    pub checks: Checks,
    pub timing_ms: Vec<(&'static str, u128)>,
}

/// Runs everything after parsing.
pub fn analyze(f: &Poly, opts: &RunOptions) -> Result<Analysis, RunError> {
    let field = f.field().clone();
    let p = field.p;
    let mut timing = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timing: &mut Vec<(&'static str, u128)>| {
        timing.push((name, clock.elapsed().as_millis()));
        clock = Instant::now();
    };

    let diag = validate_input(f, p).map_err(|e| reduction_err("validate", e))?;
    lap("validate", &mut timing);

    let rep = min_reps(diag.n, p).map_err(|e| RunError::input("decompose", e.to_string()))?;
    let dec = special_decomposition(f, &rep).map_err(|e| RunError::internal("decompose", e.to_string()))?;
    let identity = dec.check_identity();
    let two_paths = head_by_recursion(f, &rep) == dec.head;
    lap("decompose", &mut timing);

    let md = monodromy_polynomial(&dec, f).map_err(|e| RunError::internal("monodromy polynomial", e.to_string()))?;
    let congruence = check_congruence(&md);
    let pa = dec.tail_term(rep.p_alpha).expect("p^alpha in M0");
    let exact_zero = pa.n.rem(&md.l.squarefree_part()).is_zero();
    lap("monodromy polynomial", &mut timing);

    let plan = ElementPlan::new(&dec).map_err(|e| reduction_err("roots", e))?;
    let roots = analyze_roots(&md.l, &plan.elements, &opts.roots).map_err(|e| root_err(e))?;
    let total = roots.root_count();
    let np = NewtonPolygon::of(&md.l);
    let mut from_np: Vec<Val> = np.root_valuations().into_iter().map(Val::Fin).collect();
    from_np.extend(std::iter::repeat(Val::Inf).take(np.ord_zero));
    from_np.sort();
    let newton_matches_roots = from_np == roots.valuation_multiset();
    lap("roots", &mut timing);

    let mut refs = Vec::new();
    for (b, blk) in roots.blocks.iter().enumerate() {
        for (g, grp) in blk.groups.iter().enumerate() {
            refs.push((b, g, CenterRef::new(b, g, blk.multiplicity, grp), plan.values(&dec, &grp.vals)));
        }
    }
    let lam = field.lambda_p_valuation();
    let comps: Result<Vec<(ComponentData, Vec<Rational64>)>, ReductionError> = refs
        .par_iter()
        .map(|(_, _, c, v)| {
            let comp = reduced_equation(&dec, c.clone(), v)?;
            Ok((comp, grid_radius(v, lam, GRID_DENOMINATOR)))
        })
        .collect();
    let (components, grid): (Vec<ComponentData>, Vec<Vec<Rational64>>) = comps.map_err(|e| reduction_err("reduction", e))?.into_iter().unzip();
    let values: Vec<(usize, usize, CenterValues)> = refs.into_iter().map(|(b, g, _, v)| (b, g, v)).collect();
    lap("reduction", &mut timing);

    let inputs: Vec<ClusterInput> = roots
        .groups()
        .zip(&components)
        .map(|((_, g), c)| ClusterInput { size: g.size, radius: c.radius_valuation, distances: g.distances.clone(), genus: c.genus })
        .collect();
    let distance_profiles = roots.groups().all(|(_, g)| g.distances.iter().map(|d| d.1).sum::<usize>() + 1 == total);
    let tree = build_tree(&inputs, &components).map_err(|e| reduction_err("tree", e))?;
    let reduction_type = if p == 2 && diag.m == 5 { Some(classify_genus2(&tree, p, diag.m).map_err(|e| reduction_err("tree", e))?) } else { None };
    lap("tree", &mut timing);

    let bound = bound_report(&md, &roots, &tree, p, field.e);
    lap("bound", &mut timing);

    let grid_agrees = components.iter().zip(&grid).all(|(c, g)| {
        let r = c.radius_valuation;
        if *r.denom() <= GRID_DENOMINATOR {
            g == &vec![r]
        } else {
            g.is_empty()
        }
    });
    let checks = Checks {
        identity,
        two_paths,
        congruence,
        degree: md.l.deg() == md.expected_degree(),
        exact_zero,
        newton_matches_roots,
        distance_profiles,
        c_p_alpha_valuation: if diag.m as u64 % p != 0 { Some(c_p_alpha_valuation_ok(&dec)) } else { None },
        genus_sum: genus_sum_check(&tree, diag.m, p),
        verified: components.iter().all(|c| c.verified),
        grid_agrees,
    };
    Ok(Analysis {
        field,
        f: f.clone(),
        diag,
        dec,
        md,
        roots,
        values,
        components,
        grid,
        tree,
        reduction_type,
        bound,
        checks,
        timing_ms: timing,
    })
}

fn root_err(e: RootError) -> RunError {
    RunError::internal("roots", e.to_string())
}
