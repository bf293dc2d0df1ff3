mod common;

#[test]
fn random_instances() {
    let (t, res) = common::run_suite(240);
    eprintln!("{t:?}");
    res.unwrap();
    assert!(t.cases >= 200);
    // most valid instances must go all the way through
    assert!(t.reduced * 10 >= (t.cases - t.rejected) * 9, "{t:?}");
}
