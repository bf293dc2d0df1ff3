use num_rational::Rational64;

use super::*;
use crate::decomp::{min_reps, special_decomposition};
use crate::numfield::ramified;

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn cubic(e: u32) -> (Field, Poly, SpecialDecomposition) {
    let f = ramified(2, e).unwrap();
    let fx = Poly::from_ints(&f, Var::X0, &[1, 0, 0, 1]);
    let dec = special_decomposition(&fx, &min_reps(3, 2).unwrap()).unwrap();
    (f, fx, dec)
}

#[test]
fn validate_examples() {
    let f = ramified(2, 1).unwrap();
    let d = validate_input(&Poly::from_ints(&f, Var::X0, &[1, 0, 0, 0, 1, 1]), 2).unwrap();
    assert_eq!((d.n, d.m, d.genus), (5, 5, 2));
    assert!(d.warnings.is_empty());
    let bad = Poly::from_ints(&f, Var::X0, &[3, -4, 1]);
    assert_eq!(validate_input(&bad, 2), Err(ReductionError::NotEquidistant { m: 2 }));
    let sq = Poly::from_ints(&f, Var::X0, &[0, 0, 1]);
    assert_eq!(validate_input(&sq, 2), Err(ReductionError::MultiplicityDivisibleByP { mult: 2, p: 2 }));
    assert_eq!(validate_input(&Poly::from_ints(&f, Var::X0, &[0, 1, 1]), 2), Err(ReductionError::DegreeDivisibleByP { n: 2, p: 2 }));
    // (1+X)^2 over Q_3: one zero of multiplicity 2, m(p-1) = 2 = n
    let g = ramified(3, 1).unwrap();
    let d = validate_input(&Poly::from_ints(&g, Var::X0, &[1, 2, 1]), 3).unwrap();
    assert_eq!((d.m, d.genus, d.multiplicities.clone()), (1, 0, vec![2]));
    let d = validate_input(&Poly::from_ints(&g, Var::X0, &[1, 3, 3, 1]), 3);
    assert_eq!(d, Err(ReductionError::MultiplicityDivisibleByP { mult: 3, p: 3 }));
    // X (X+1)^4 over Q_3: m(p-1) = 4 < 5 only warns
    let d = validate_input(&Poly::from_ints(&g, Var::X0, &[0, 1, 4, 6, 4, 1]), 3).unwrap();
    assert_eq!((d.m, d.warnings.len()), (2, 1));
}

#[test]
fn radius_examples() {
    assert_eq!(radius_valuation(&[(2, Val::Inf), (3, Val::zero())], q(2, 1)), Ok(q(2, 3)));
    let all = [(3, Val::zero()), (4, Val::zero()), (5, Val::zero())];
    assert_eq!(radius_valuation(&all, q(2, 1)), Ok(q(2, 3)));
    assert_eq!(radius_valuation(&[(5, Val::zero())], q(3, 2)), Ok(q(3, 10)));
    assert_eq!(radius_valuation(&[(2, Val::Inf)], q(2, 1)), Err(ReductionError::EmptyTail));
    assert_eq!(surviving_indices(&all, q(2, 3), q(2, 1)), vec![3]);
}

#[test]
fn as_normalization() {
    let f = ramified(2, 1).unwrap();
    let g = as_normalize(&ResiduePoly::from_fp(&f, &[0, 0, 0, 1, 1]));
    assert_eq!(g, ResiduePoly::from_fp(&f, &[0, 1, 0, 1]));
    let f4 = crate::numfield::make_field(2, 1, &[1, 1, 1]).unwrap();
    let u = ResidueElement::new(&f4, vec![0, 1]);
    let g = ResiduePoly::new(&f4, vec![ResidueElement::zero(&f4), ResidueElement::zero(&f4), u.clone()]);
    let n = as_normalize(&g);
    assert_eq!(n.degree(), Some(1));
    assert_eq!(n.coeffs()[1].frobenius(), u);
}

#[test]
fn verify_cubic() {
    let (f, _, dec) = cubic(3);
    let zero = FieldElement::zero(&f);
    assert!(verify_reduction(&dec, &zero, &FieldElement::pi_pow(&f, 2)));
    assert!(!verify_reduction(&dec, &zero, &FieldElement::one(&f)));
    assert!(!verify_reduction(&dec, &zero, &FieldElement::pi_pow(&f, 3)));
}

#[test]
fn component_cubic() {
    for e in [1, 3] {
        let (f, _, dec) = cubic(e);
        let plan = ElementPlan::new(&dec).unwrap();
        let zero = FieldElement::zero(&f);
        let vals = plan.values_at(&dec, &zero);
        assert_eq!(vals.tail, vec![(2, Val::Inf), (3, Val::zero())]);
        let center = CenterRef { block: 0, group: 0, size: 1, slope: Val::Inf, exact: Some(zero.clone()), degree: Some(1), multiplicity: 1 };
        let c = reduced_equation(&dec, center, &vals).unwrap();
        assert_eq!(c.radius_valuation, q(2, 3));
        assert_eq!(c.surviving.iter().map(|s| s.i).collect::<Vec<_>>(), vec![3]);
        assert_eq!((c.conductor_d, c.genus), (3, 1));
        assert_eq!(c.as_rhs, Some(ResiduePoly::from_fp(&f, &[0, 0, 0, 1])));
        assert!(c.verified);
        assert_eq!(grid_radius(&vals, q(2, 1), 12), vec![q(2, 3)]);
    }
}

#[test]
fn perturbed_center_loses_genus() {
    // y = 0 is a zero of L; near it, at y~ = pi, L(y~) != 0 and the p^alpha
    // term survives, so the reduction there is rational
    let (f, _, dec) = cubic(3);
    let md = crate::monopoly::monodromy_polynomial(&dec, &Poly::from_ints(&f, Var::X0, &[1, 0, 0, 1])).unwrap();
    let plan = ElementPlan::new(&dec).unwrap();
    let yt = FieldElement::pi(&f);
    assert!(md.l.eval(&yt).valuation() < md.l.eval(&FieldElement::zero(&f)).valuation());
    let at = plan.values_at(&dec, &yt);
    let r = radius_valuation(&at.tail, q(2, 1)).unwrap();
    assert_eq!(r, q(4, 3), "{:?}", at.tail);
    assert_eq!(surviving_indices(&at.tail, r, q(2, 1)), vec![2]);
}

fn input(size: usize, radius: Rational64, distances: &[(Rational64, usize)], genus: usize) -> ClusterInput {
    ClusterInput { size, radius, distances: distances.to_vec(), genus }
}

fn dummy(genus: usize) -> ComponentData {
    ComponentData {
        center: CenterRef { block: 0, group: 0, size: 1, slope: Val::zero(), exact: None, degree: None, multiplicity: 1 },
        radius_valuation: q(1, 1),
        surviving: Vec::new(),
        as_rhs: None,
        conductor_d: 2 * genus + 1,
        genus,
        s0_at_center_valuation: Val::zero(),
        verified: true,
    }
}

#[test]
fn tree_shapes() {
    // one class: all four roots within 2/3 of each other
    let one = [input(1, q(2, 3), &[(q(2, 3), 3)], 1), input(3, q(2, 3), &[(q(2, 3), 3)], 1)];
    let t = build_tree(&one, &[dummy(1), dummy(1)]).unwrap();
    assert_eq!(t.nodes.len(), 2);
    assert_eq!(t.classes.len(), 1);
    assert_eq!(t.classes[0].copies, 1);
    assert!(genus_sum_check(&t, 3, 2));
    assert!(!genus_sum_check(&t, 5, 2));

    // two groups at distance 0
    let apart = [input(8, q(1, 2), &[(q(0, 1), 8), (q(1, 1), 7)], 1), input(8, q(1, 3), &[(q(0, 1), 8), (q(1, 1), 7)], 1)];
    let t = build_tree(&apart, &[dummy(1), dummy(1)]).unwrap();
    assert_eq!(classify_genus2(&t, 2, 5), Ok(1));
    assert!(t.leaves().all(|(_, n)| n.parent == Some(0)));

    // one group of 16, two discs of 8 meeting at 1/3
    let split = [input(16, q(4, 9), &[(q(1, 3), 8), (q(4, 9), 6), (q(2, 3), 1)], 1)];
    let t = build_tree(&split, &[dummy(1)]).unwrap();
    assert_eq!(t.classes[0].copies, 2);
    assert_eq!(classify_genus2(&t, 2, 5), Ok(2));
    assert_eq!(t.nodes[1].depth, q(1, 3));
    assert!(t.to_dot().contains("g=1 d=4/9"));

    let good = [input(16, q(2, 5), &[(q(1, 2), 15)], 2)];
    let t = build_tree(&good, &[dummy(2)]).unwrap();
    assert_eq!(classify_genus2(&t, 2, 5), Ok(3));
    assert_eq!(classify_genus2(&t, 3, 4), Err(ReductionError::NotGenus2Case { p: 3, m: 4 }));

    assert!(dedupe_centers(&[]).unwrap().is_empty());
    let t = build_tree(&[], &[]).unwrap();
    assert_eq!(t.nodes.len(), 1);
}

#[test]
fn nested_radii_rejected() {
    // y is within 1/2 of z, but z's disc of radius 1/3 would swallow y with a larger radius
    let bad = [input(1, q(1, 2), &[(q(1, 2), 1)], 1), input(1, q(1, 3), &[(q(1, 2), 1)], 1)];
    assert!(matches!(dedupe_centers(&bad), Err(ReductionError::InconsistentRadiiInClass(_))));
}
