//! Cluster tree of the centers.
//!
//! Roots are unlabeled: each group only knows its own size, radius and the
//! multiset of distances to the other roots. For a level t the disc count
//! S(t) = #{z : v(y - z) >= t} is Galois-invariant, so the chain of S values
//! over the distinct levels, together with whether the disc is a leaf,
//! identifies the discs containing y up to conjugacy. Discs with the same
//! key are counted, not told apart; when the counts do not fit together
//! the shape is reported as unrecognized instead of guessed.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_rational::Rational64;
use num_traits::Zero;

use super::{ComponentData, ReductionError};

#[derive(Clone, Debug)]
pub struct ClusterInput {
    pub size: usize,
    pub radius: Rational64,
    /// v(y - z) over all other roots z, as (value, count)
    pub distances: Vec<(Rational64, usize)>,
    pub genus: usize,
}

/// A closeness class: roots whose leaf discs have the same chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterClass {
    pub chain: Vec<usize>,
    pub radius: Rational64,
    /// indices into the inputs
    pub members: Vec<usize>,
    /// number of distinct discs with this chain
    pub copies: usize,
    /// roots in each disc
    pub roots: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub depth: Rational64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub roots: usize,
    /// index into `ReductionTree::classes` for leaves
    pub class: Option<usize>,
    pub genus: usize,
}

#[derive(Clone, Debug)]
pub struct ReductionTree {
    /// node 0 is the original component
    pub nodes: Vec<TreeNode>,
    pub classes: Vec<CenterClass>,
    /// one per class, same order
    pub components: Vec<ComponentData>,
}

#[derive(Default)]
struct Key {
    roots: usize,
    members: Vec<usize>,
}

struct Layout {
    levels: Vec<Rational64>,
    /// (chain, is leaf)
    keys: BTreeMap<(Vec<usize>, bool), Key>,
    total: usize,
}

fn layout(inputs: &[ClusterInput]) -> Result<Layout, ReductionError> {
    let mut levels: Vec<Rational64> = Vec::new();
    for g in inputs {
        if g.radius <= Rational64::zero() {
            return Err(ReductionError::InternalInvariantViolation(format!("radius {} is not positive", g.radius)));
        }
        levels.push(g.radius);
        levels.extend(g.distances.iter().map(|d| d.0).filter(|&d| d > Rational64::zero() && d < g.radius));
    }
    levels.sort();
    levels.dedup();
    let mut keys: BTreeMap<(Vec<usize>, bool), Key> = BTreeMap::new();
    for (gi, g) in inputs.iter().enumerate() {
        let chain: Vec<usize> = levels
            .iter()
            .take_while(|&&t| t <= g.radius)
            .map(|&t| 1 + g.distances.iter().filter(|d| d.0 >= t).map(|d| d.1).sum::<usize>())
            .collect();
        for k in 0..chain.len() {
            let e = keys.entry((chain[..=k].to_vec(), k + 1 == chain.len())).or_default();
            e.roots += g.size;
            e.members.push(gi);
        }
    }
    let total = inputs.iter().map(|g| g.size).sum();
    Ok(Layout { levels, keys, total })
}

fn copies(chain: &[usize], key: &Key) -> Result<usize, ReductionError> {
    let size = *chain.last().unwrap();
    if key.roots % size != 0 {
        return Err(ReductionError::UnrecognizedShape(format!("{} roots do not fill discs of size {size}", key.roots)));
    }
    Ok(key.roots / size)
}

/// Closeness classes: (y, rho) ~ (z, sigma) iff the radii agree and v(y - z) >= radius.
pub fn dedupe_centers(inputs: &[ClusterInput]) -> Result<Vec<CenterClass>, ReductionError> {
    let lay = layout(inputs)?;
    let mut out = Vec::new();
    for ((chain, leaf), key) in &lay.keys {
        if !leaf {
            continue;
        }
        let size = *chain.last().unwrap();
        if let Some(inner) = lay.keys.get(&(chain.clone(), false)) {
            if key.roots % size != 0 || inner.roots % size != 0 {
                return Err(ReductionError::InconsistentRadiiInClass(format!(
                    "a disc of radius {} contains centers of larger radius",
                    lay.levels[chain.len() - 1]
                )));
            }
        }
        let genus = inputs[key.members[0]].genus;
        if key.members.iter().any(|&g| inputs[g].genus != genus) {
            return Err(ReductionError::InconsistentRadiiInClass("centers of one disc give different genera".into()));
        }
        out.push(CenterClass {
            chain: chain.clone(),
            radius: lay.levels[chain.len() - 1],
            members: key.members.clone(),
            copies: copies(chain, key)?,
            roots: *chain.last().unwrap(),
        });
    }
    Ok(out)
}

/// `components[i]` belongs to `inputs[i]`.
pub fn build_tree(inputs: &[ClusterInput], components: &[ComponentData]) -> Result<ReductionTree, ReductionError> {
    let classes = dedupe_centers(inputs)?;
    let lay = layout(inputs)?;
    let mut nodes = vec![TreeNode { depth: Rational64::zero(), parent: None, children: Vec::new(), roots: lay.total, class: None, genus: 0 }];
    expand(&lay, &classes, inputs, &[], 1, 0, &mut nodes)?;
    let nodes = compress(nodes);
    let comps = classes.iter().map(|c| components[c.members[0]].clone()).collect();
    Ok(ReductionTree { nodes, classes, components: comps })
}

fn expand(
    lay: &Layout,
    classes: &[CenterClass],
    inputs: &[ClusterInput],
    prefix: &[usize],
    parent_copies: usize,
    parent: usize,
    nodes: &mut Vec<TreeNode>,
) -> Result<(), ReductionError> {
    let mut filled = 0;
    let children: Vec<(&(Vec<usize>, bool), &Key)> =
        lay.keys.iter().filter(|((c, _), _)| c.len() == prefix.len() + 1 && c.starts_with(prefix)).collect();
    for ((chain, leaf), key) in children {
        let n = copies(chain, key)?;
        if n % parent_copies != 0 {
            return Err(ReductionError::UnrecognizedShape("discs are not spread evenly over their parents".into()));
        }
        let size = *chain.last().unwrap();
        for _ in 0..n / parent_copies {
            filled += size;
            let id = nodes.len();
            let class = if *leaf { classes.iter().position(|c| &c.chain == chain) } else { None };
            let genus = class.map_or(0, |c| inputs[classes[c].members[0]].genus);
            nodes.push(TreeNode { depth: lay.levels[chain.len() - 1], parent: Some(parent), children: Vec::new(), roots: size, class, genus });
            nodes[parent].children.push(id);
            if !leaf {
                expand(lay, classes, inputs, chain, n, id, nodes)?;
            }
        }
    }
    if filled != nodes[parent].roots {
        return Err(ReductionError::UnrecognizedShape(format!("disc with {} roots has children holding {filled}", nodes[parent].roots)));
    }
    Ok(())
}

/// Drops internal non-root nodes with a single child and renumbers breadth first.
fn compress(mut nodes: Vec<TreeNode>) -> Vec<TreeNode> {
    for id in 1..nodes.len() {
        if nodes[id].class.is_none() && nodes[id].children.len() == 1 {
            let child = nodes[id].children[0];
            let parent = nodes[id].parent.unwrap();
            for c in nodes[parent].children.iter_mut() {
                if *c == id {
                    *c = child;
                }
            }
            nodes[child].parent = Some(parent);
            nodes[id].children.clear();
            nodes[id].parent = None;
        }
    }
    let mut order = vec![0];
    let mut i = 0;
    while i < order.len() {
        order.extend(nodes[order[i]].children.iter().copied());
        i += 1;
    }
    let mut new_id = vec![usize::MAX; nodes.len()];
    for (k, &old) in order.iter().enumerate() {
        new_id[old] = k;
    }
    order
        .iter()
        .map(|&old| {
            let mut n = nodes[old].clone();
            n.parent = n.parent.map(|p| new_id[p]);
            n.children = n.children.iter().map(|c| new_id[*c]).collect();
            n
        })
        .collect()
}

impl ReductionTree {
    pub fn leaves(&self) -> impl Iterator<Item = (usize, &TreeNode)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.class.is_some())
    }

    fn ancestors(&self, mut id: usize) -> Vec<usize> {
        let mut out = vec![id];
        while let Some(p) = self.nodes[id].parent {
            out.push(p);
            id = p;
        }
        out
    }

    pub fn lowest_common_ancestor(&self, a: usize, b: usize) -> usize {
        let up = self.ancestors(a);
        self.ancestors(b).into_iter().find(|x| up.contains(x)).unwrap_or(0)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph reduction {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let mut extra = String::new();
            if let Some(c) = n.class {
                let comp = &self.components[c];
                let _ = write!(extra, ", tooltip=\"center v(y)={} size={} v(rho)={}\"", comp.center.slope, comp.center.size, comp.radius_valuation);
            }
            let _ = writeln!(s, "  n{i} [label=\"g={} d={}\"{extra}];", n.genus, n.depth);
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for c in &n.children {
                let _ = writeln!(s, "  n{i} -> n{c} [label=\"{}\"];", self.nodes[*c].depth);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// 3: one genus-2 end; 1: two genus-1 ends meeting at the original
/// component; 2: two genus-1 ends meeting at an intermediate component.
pub fn classify_genus2(tree: &ReductionTree, p: u64, m: usize) -> Result<u8, ReductionError> {
    if p != 2 || m != 5 {
        return Err(ReductionError::NotGenus2Case { p, m });
    }
    let leaves: Vec<(usize, usize)> = tree.leaves().map(|(i, n)| (i, n.genus)).collect();
    match leaves.as_slice() {
        [(_, 2)] => Ok(3),
        [(a, 1), (b, 1)] => Ok(if tree.lowest_common_ancestor(*a, *b) == 0 { 1 } else { 2 }),
        _ => Err(ReductionError::UnrecognizedShape(format!("ends of genera {:?}", leaves.iter().map(|l| l.1).collect::<Vec<_>>()))),
    }
}

/// Sum of the genera of the ends equals (p-1)(m-1)/2.
pub fn genus_sum_check(tree: &ReductionTree, m: usize, p: u64) -> bool {
    let total: usize = tree.leaves().map(|(_, n)| n.genus).sum();
    total == (p as usize - 1) * (m.max(1) - 1) / 2
}
