use super::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn make_field_examples() {
    let f = ramified(2, 15).unwrap();
    assert_eq!((f.p, f.e, f.k), (2, 15, 1));
    assert_eq!(f.lambda_p_valuation(), Rational64::from_integer(2));
    let g = ramified(3, 4).unwrap();
    assert_eq!(g.lambda_p_valuation(), Rational64::new(3, 2));
    assert_eq!(make_field(4, 1, &[0, 1]), Err(FieldError::NotPrime(4)));
    // u^2 + 1 = (u + 1)^2 over F_2
    assert_eq!(make_field(2, 1, &[1, 0, 1]), Err(FieldError::ReducibleModulus));
    assert!(make_field(2, 1, &[1, 1, 1]).is_ok());
}

#[test]
fn valuation_examples() {
    let f = ramified(2, 3).unwrap();
    assert_eq!(FieldElement::from_int(&f, 2).valuation(), Val::from_int(1));
    let x = FieldElement::pi_pow(&f, 2).scale_rational(&q(3, 2));
    assert_eq!(x.valuation(), Val::new(-1, 3));
    let y = &FieldElement::one(&f) + &FieldElement::pi(&f);
    assert_eq!(y.valuation(), Val::zero());
    assert_eq!(FieldElement::zero(&f).valuation(), Val::Inf);
    // pi^3 = 2
    assert_eq!(FieldElement::pi_pow(&f, 3), FieldElement::from_int(&f, 2));
    assert_eq!(FieldElement::pi_pow(&f, -1).valuation(), Val::new(-1, 3));
}

#[test]
fn residue_examples() {
    let f = ramified(2, 1).unwrap();
    assert!(FieldElement::from_int(&f, 3).residue().unwrap().is_one());
    let g = ramified(2, 3).unwrap();
    assert!(FieldElement::pi(&g).residue().unwrap().is_zero());
    let half = FieldElement::from_rational(&f, &q(1, 2));
    assert!(matches!(half.residue(), Err(FieldError::NonIntegral(_))));
    // 4/3 * (1/2) ... 2/3 has residue 0, 5/3 residue 1
    assert!(FieldElement::from_rational(&f, &q(5, 3)).residue().unwrap().is_one());
}

#[test]
fn frobenius_inverse_f4() {
    let f = make_field(2, 1, &[1, 1, 1]).unwrap();
    let ubar = ResidueElement::new(&f, vec![0, 1]);
    let inv = ubar.frobenius_inverse();
    assert_eq!(inv, &ubar * &ubar);
    // exhaustive
    for c in ResidueElement::all(&f) {
        assert_eq!(c.frobenius_inverse().pow(2), c);
    }
    assert!(ResidueElement::one(&f).frobenius_inverse().is_one());
    assert!(ResidueElement::zero(&f).frobenius_inverse().is_zero());
}

#[test]
fn frobenius_exhaustive_small_fields() {
    for (p, m) in [(2u64, vec![1u64, 1, 0, 1]), (3, vec![2, 1, 1]), (5, vec![2, 0, 1]), (7, vec![3, 1])] {
        let f = make_field(p, 1, &m).unwrap();
        for c in ResidueElement::all(&f) {
            assert_eq!(c.frobenius_inverse().pow(p), c);
            if let Some(ci) = c.inv() {
                assert!((&ci * &c).is_one());
            }
        }
    }
}

#[test]
fn inverse_unramified_quadratic() {
    let f = make_field(3, 2, &[1, 0, 1]).unwrap();
    let u = FieldElement::u(&f);
    let x = &(&u + &FieldElement::pi(&f)) + &FieldElement::from_rational(&f, &q(2, 5));
    let xi = x.inv().unwrap();
    assert!((&x * &xi).is_one());
    assert_eq!(&u * &u, FieldElement::from_int(&f, -1));
}

#[test]
fn inverse_ramified() {
    let f = ramified(2, 15).unwrap();
    let x = &(&FieldElement::pi_pow(&f, 9) + &FieldElement::one(&f)) + &FieldElement::pi_pow(&f, 4).scale_rational(&q(7, 3));
    assert!((&x * &x.inv().unwrap()).is_one());
    assert_eq!(FieldElement::zero(&f).inv(), None);
}

#[test]
fn extend_field_examples() {
    let base = ramified(2, 1).unwrap();
    let (big, emb) = extend_field(&base, 3, &[0, 1], 20).unwrap();
    assert_eq!(big.e, 3);
    assert!(emb.exact);
    let x = FieldElement::from_rational(&base, &q(5, 12));
    assert_eq!(emb.apply(&x), FieldElement::from_rational(&big, &q(5, 12)));

    let e3 = ramified(2, 3).unwrap();
    let (e3k2, emb2) = extend_field(&e3, 3, &[1, 1, 1], 20).unwrap();
    assert_eq!(e3k2.k, 2);
    let pi = FieldElement::pi(&e3);
    assert_eq!(emb2.apply(&pi), FieldElement::pi(&e3k2));

    let e2 = ramified(2, 2).unwrap();
    assert!(matches!(extend_field(&e2, 3, &[0, 1], 20), Err(FieldError::IncompatibleExtension { .. })));
}

#[test]
fn extend_residue_degree_hensel() {
    // F_4 inside F_16: the old modulus u^2+u+1 gets a Hensel-lifted root.
    let f4 = make_field(2, 1, &[1, 1, 1]).unwrap();
    let (f16, emb) = extend_field(&f4, 1, &[1, 1, 0, 0, 1], 30).unwrap();
    assert!(!emb.exact);
    let u = FieldElement::u(&f4);
    let img = emb.apply(&u);
    let val = (&(&(&img * &img) + &img) + &FieldElement::one(&f16)).valuation();
    assert!(val >= Val::from_int(30));
    // residue compatibility: image reduces to a root of the old modulus
    let r = img.residue().unwrap();
    assert!((&(&(&r * &r) + &r) + &ResidueElement::one(&f16)).is_zero());
}

#[test]
fn residue_poly_irreducibility() {
    let f = ramified(3, 1).unwrap();
    assert!(ResiduePoly::from_fp(&f, &[1, 0, 1]).is_irreducible());
    assert!(!ResiduePoly::from_fp(&f, &[2, 0, 1]).is_irreducible());
    let f4 = make_field(2, 1, &[1, 1, 1]).unwrap();
    // x^2+x+1 splits over F_4
    assert!(!ResiduePoly::from_fp(&f4, &[1, 1, 1]).is_irreducible());
    assert_eq!(ResiduePoly::from_fp(&f4, &[1, 1, 1]).roots().len(), 2);
}
