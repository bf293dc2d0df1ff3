//! Z^2 = 1 + X^3 over Q_2, worked by hand.
//!
//! f(X+Y) = (1 + Y^3) + 3Y^2 X + 3Y X^2 + X^3, so n = 3, r = 1 and the tail is
//! {2, 3} with p^alpha = 2. L = 3Y^4 + 12Y = 3Y(Y^3 + 4): one root at 0 and
//! three conjugate roots of valuation 2/3, pairwise at distance 2/3 since
//! 1 - zeta_3 is a 2-adic unit. At y = 0 the tail is A_2 = 0, A_3 = -1, so
//! v(rho) = (2 - 0)/3 = 2/3 and X^3 is the only surviving term: an elliptic
//! curve with conductor 3.

use num_rational::Rational64;
use stablered::decomp::{min_reps, special_decomposition};
use stablered::monodromy::bound_report;
use stablered::monopoly::monodromy_polynomial;
use stablered::numfield::{ramified, FieldElement, Val};
use stablered::padicroots::{analyze_roots, RootOptions};
use stablered::polyalg::{Poly, Var};
use stablered::reduction::{build_tree, reduced_equation, verify_reduction, CenterRef, ClusterInput, ElementPlan};

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn cubic_by_hand() {
    let k = ramified(2, 1).unwrap();
    let f = Poly::from_ints(&k, Var::X0, &[1, 0, 0, 1]);
    let rep = min_reps(3, 2).unwrap();
    assert_eq!((rep.r, rep.p_alpha), (1, 2));
    let dec = special_decomposition(&f, &rep).unwrap();
    let md = monodromy_polynomial(&dec, &f).unwrap();
    let want = Poly::from_ints(&k, md.l.var(), &[0, 12, 0, 0, 3]);
    assert_eq!(md.l, want);

    let plan = ElementPlan::new(&dec).unwrap();
    let roots = analyze_roots(&md.l, &plan.elements, &RootOptions::default()).unwrap();
    let mut slopes: Vec<(Val, usize)> = roots.groups().map(|(_, g)| (g.slope, g.size)).collect();
    slopes.sort();
    assert_eq!(slopes, vec![(Val::new(2, 3), 3), (Val::Inf, 1)]);
    for (_, g) in roots.groups() {
        assert_eq!(g.distances, vec![(q(2, 3), 3)]);
    }

    let mut inputs = Vec::new();
    let mut comps = Vec::new();
    for (b, blk) in roots.blocks.iter().enumerate() {
        for (gi, g) in blk.groups.iter().enumerate() {
            let c = reduced_equation(&dec, CenterRef::new(b, gi, blk.multiplicity, g), &plan.values(&dec, &g.vals)).unwrap();
            assert_eq!((c.radius_valuation, c.conductor_d, c.genus), (q(2, 3), 3, 1));
            inputs.push(ClusterInput { size: g.size, radius: c.radius_valuation, distances: g.distances.clone(), genus: c.genus });
            comps.push(c);
        }
    }
    let tree = build_tree(&inputs, &comps).unwrap();
    assert_eq!(tree.classes.len(), 1);
    assert_eq!(tree.classes[0].copies, 1);
    assert_eq!(bound_report(&md, &roots, &tree, 2, 1).degree_bound, 18);

    // rho = pi^2 needs pi^3 = 2
    let k3 = ramified(2, 3).unwrap();
    let f3 = Poly::from_ints(&k3, Var::X0, &[1, 0, 0, 1]);
    let dec3 = special_decomposition(&f3, &rep).unwrap();
    let zero = FieldElement::zero(&k3);
    assert!(verify_reduction(&dec3, &zero, &FieldElement::pi_pow(&k3, 2)));
    assert!(!verify_reduction(&dec3, &zero, &FieldElement::pi(&k3)));
}
