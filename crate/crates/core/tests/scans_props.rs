use yamabe_core::exactnum::{monomial_compare, PiMonomial};
use yamabe_core::scans::{compare_series, ratio_monomial, scan_min_location, Relation};

#[test]
fn series_comparison_matches_ratio_sign() {
    let series = compare_series(11, 400).unwrap();
    let minima = scan_min_location(11, 400).unwrap();
    for (s, m) in series.per_n.iter().zip(&minima.per_n) {
        assert_eq!(s.n, m.n);
        if !m.argmin.contains(&2) {
            continue;
        }
        let ord = monomial_compare(&ratio_monomial(s.n).unwrap(), &PiMonomial::one());
        assert_eq!(s.relation, Relation::from(ord), "n = {}", s.n);
    }
}

#[test]
fn scans_are_deterministic() {
    let a = compare_series(11, 300).unwrap();
    let b = compare_series(11, 300).unwrap();
    assert!(a.same_outcome(&b));
    let a = scan_min_location(7, 300).unwrap();
    let b = scan_min_location(7, 300).unwrap();
    assert!(a.same_outcome(&b));
}
