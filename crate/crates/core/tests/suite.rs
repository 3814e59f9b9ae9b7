use qkdv::reconstruction::{build_ansatz, cross_check, reconstruct_auto};
use qkdv::verify::{self, Level};
use qkdv::HamiltonianCache;

#[test]
fn reconstructed_hamiltonians_commute_with_the_hierarchy() {
    let cache = HamiltonianCache::in_memory();
    let others: Vec<i64> = (-1..=3).collect();
    for (d, g) in [(1, 2), (2, 1), (3, 1), (3, 2), (4, 1)] {
        let rec = reconstruct_auto(&cache, d, g).unwrap();
        assert_eq!(
            cross_check(&cache, &rec, &others, 5).unwrap(),
            None,
            "({d},{g})"
        );
    }
}

#[test]
fn truncation_cutoff() {
    assert_eq!(build_ansatz(4, 1).unwrap().cutoff(), Some(2));
    assert_eq!(build_ansatz(4, 2).unwrap().cutoff(), None);
    // the genus-2 block for d = 3 is spanned by a total derivative
    assert_eq!(build_ansatz(3, 1).unwrap().cutoff(), None);
}

#[test]
fn full_suite_passes() {
    let summary = verify::run(Level::Full, &HamiltonianCache::in_memory());
    assert!(summary.passed, "{}", summary.to_text());
    assert_eq!(summary.criteria.len(), 8);
}
