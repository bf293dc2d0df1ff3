//! JSON report. Rationals and field elements are strings; see
//! docs/report.schema.json at the repository root.

use serde::{Deserialize, Serialize};
use stablered::numfield::Val;
use stablered::polyalg::NewtonPolygon;

use crate::job::JobSpec;
use crate::pipeline::{Analysis, Checks};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub input: JobSpec,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub alpha: u32,
    pub p_alpha: usize,
    pub genus_c: usize,
    pub warnings: Vec<String>,
    pub monodromy_polynomial: PolyReport,
    pub root_classes: Vec<GroupReport>,
    pub components: Vec<ComponentReport>,
    pub tree: Vec<NodeReport>,
    pub reduction_type: Option<u8>,
    pub monodromy_bound: BoundReport,
    pub checks: Checks,
    pub timing_ms: Vec<(String, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyReport {
    pub degree: usize,
    /// ascending
    pub coefficients: Vec<String>,
    /// (index, valuation)
    pub newton_polygon: Vec<(usize, String)>,
    /// (root valuation, count), zero roots as "inf"
    pub root_valuations: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub block: usize,
    pub group: usize,
    pub block_degree: usize,
    pub multiplicity: usize,
    pub size: usize,
    /// v(y)
    pub slope: String,
    pub exact: Option<String>,
    /// degree of K(y)/K when certified
    pub degree: Option<usize>,
    pub distances: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivingReport {
    pub i: usize,
    pub residue: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub class: usize,
    pub copies: usize,
    pub roots_per_copy: usize,
    pub block: usize,
    pub group: usize,
    pub radius_valuation: String,
    pub surviving: Vec<SurvivingReport>,
    pub as_rhs: Option<String>,
    pub conductor: usize,
    pub genus: usize,
    pub s0_at_center_valuation: String,
    pub verified: bool,
    pub grid_radius: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub id: usize,
    pub depth: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub genus: usize,
    pub roots: usize,
    pub class: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub block: usize,
    pub group: usize,
    pub degree: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemarkReport {
    pub l: usize,
    pub s: u32,
    pub d: usize,
    pub case: u8,
    pub wild_exponent: u32,
    pub ambiguous: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub slope_denominators: Vec<i64>,
    pub branch_degrees: Vec<BranchReport>,
    pub radius_denominators: Vec<i64>,
    /// (class, v(s0(y)), residue is a p-th power)
    pub radicand_data: Vec<(usize, String, bool)>,
    pub classes: usize,
    pub degree_bound: String,
    pub degree_bound_kind: String,
    pub annotations: RemarkReport,
}

fn val(v: Val) -> String {
    match v {
        Val::Fin(r) => r.to_string(),
        Val::Inf => "inf".into(),
    }
}

fn counted(mut v: Vec<Val>) -> Vec<(String, usize)> {
    v.sort();
    let mut out: Vec<(String, usize)> = Vec::new();
    for x in v {
        let s = val(x);
        match out.last_mut() {
            Some((y, c)) if *y == s => *c += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

impl Report {
    pub fn build(job: &JobSpec, a: &Analysis) -> Report {
        let rep = &a.dec.rep;
        let np = NewtonPolygon::of(&a.md.l);
        let mut rv: Vec<Val> = np.root_valuations().into_iter().map(Val::Fin).collect();
        rv.extend(std::iter::repeat(Val::Inf).take(np.ord_zero));
        let l = PolyReport {
            degree: a.md.l.deg(),
            coefficients: a.md.l.coeffs().iter().map(|c| c.to_string()).collect(),
            newton_polygon: np.vertices.iter().map(|(i, v)| (*i, v.to_string())).collect(),
            root_valuations: counted(rv),
        };
        let root_classes = a
            .roots
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, blk)| {
                blk.groups.iter().enumerate().map(move |(g, grp)| GroupReport {
                    block: b,
                    group: g,
                    block_degree: blk.poly.deg(),
                    multiplicity: blk.multiplicity,
                    size: grp.size,
                    slope: val(grp.slope),
                    exact: grp.exact.as_ref().map(|y| y.to_string()),
                    degree: grp.degree,
                    distances: grp.distances.iter().map(|(d, c)| (d.to_string(), *c)).collect(),
                })
            })
            .collect();
        let tree = &a.tree;
        let components = tree
            .classes
            .iter()
            .enumerate()
            .map(|(k, cls)| {
                let c = &tree.components[k];
                ComponentReport {
                    class: k,
                    copies: cls.copies,
                    roots_per_copy: cls.roots,
                    block: c.center.block,
                    group: c.center.group,
                    radius_valuation: c.radius_valuation.to_string(),
                    surviving: c.surviving.iter().map(|s| SurvivingReport { i: s.i, residue: s.residue.as_ref().map(|r| r.to_string()) }).collect(),
                    as_rhs: c.as_rhs.as_ref().map(|g| g.to_string()),
                    conductor: c.conductor_d,
                    genus: c.genus,
                    s0_at_center_valuation: val(c.s0_at_center_valuation),
                    verified: c.verified,
                    grid_radius: a.grid[cls.members[0]].iter().map(|t| t.to_string()).collect(),
                }
            })
            .collect();
        let nodes = tree
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| NodeReport {
                id: i,
                depth: n.depth.to_string(),
                parent: n.parent,
                children: n.children.clone(),
                genus: n.genus,
                roots: n.roots,
                class: n.class,
            })
            .collect();
        let b = &a.bound;
        let ann = &b.annotations;
        let note = format!(
            "m = {}*{}^{} + {}; the wild part of the monodromy has order dividing {}^{}{}",
            ann.l,
            a.field.p,
            ann.s,
            ann.d,
            a.field.p,
            ann.exponent,
            if ann.ambiguous { " (AMBIGUOUS decomposition)" } else { "" }
        );
        let monodromy_bound = BoundReport {
            slope_denominators: b.slope_denominators.clone(),
            branch_degrees: b
                .branch_degrees
                .iter()
                .map(|x| BranchReport { block: x.block, group: x.group, degree: x.degree, certified: x.certified })
                .collect(),
            radius_denominators: b.radius_denominators.clone(),
            radicand_data: b.radicand_data.iter().map(|r| (r.class, val(r.s0_valuation), r.residue_is_pth_power)).collect(),
            classes: b.classes,
            degree_bound: b.degree_bound.to_string(),
            degree_bound_kind: "heuristic-coarse upper bound".into(),
            annotations: RemarkReport { l: ann.l, s: ann.s, d: ann.d, case: ann.case, wild_exponent: ann.exponent, ambiguous: ann.ambiguous, note },
        };
        Report {
            input: job.clone(),
            n: rep.n,
            m: a.diag.m,
            r: rep.r,
            alpha: rep.alpha,
            p_alpha: rep.p_alpha,
            genus_c: a.diag.genus,
            warnings: a.diag.warnings.clone(),
            monodromy_polynomial: l,
            root_classes,
            components,
            tree: nodes,
            reduction_type: a.reduction_type,
            monodromy_bound,
            checks: a.checks.clone(),
            timing_ms: a.timing_ms.iter().map(|(k, v)| (k.to_string(), *v as u64)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
