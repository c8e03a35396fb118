use eigenpoly::catalog::{run_catalog, ScaleClass, Tolerances};

#[test]
fn fast_catalog_matches_expectations() {
    let s = run_catalog(&[ScaleClass::Fast], &Tolerances::default()).unwrap();
    println!("{}", s.to_table());
    assert!(s.all_passed(), "{}", s.to_table());
}

#[test]
fn full_catalog_matches_expectations() {
    let s = run_catalog(&ScaleClass::Stretch.up_to(), &Tolerances::default()).unwrap();
    println!("{}", s.to_table());
    assert!(s.all_passed(), "{}", s.to_table());
}
