use spinphase::papertables::{compare, register_all, GridSpec, DOCUMENTED_MISMATCHES};
use spinphase::PhaseConvention;

fn sorted_mismatches(grid: &GridSpec) -> Vec<String> {
    let report = compare(grid, None).unwrap();
    assert!(report.pass, "{grid}: {:?}", report.unexpected_mismatches);
    let mut ids: Vec<String> = report.mismatch_ids().into_iter().map(String::from).collect();
    ids.sort();
    ids
}

#[test]
fn verdicts_do_not_depend_on_the_grid() {
    let want: Vec<String> = DOCUMENTED_MISMATCHES.iter().map(|s| s.to_string()).collect();
    for grid in [GridSpec::Default, GridSpec::Uniform { n_theta: 7, n_phi: 5 }, GridSpec::Random { n: 300, seed: 17 }] {
        assert_eq!(sorted_mismatches(&grid), want, "{grid}");
    }
}

#[test]
fn registry_is_large_and_unique() {
    let all = register_all();
    assert!(all.len() >= 40);
    let mut ids: Vec<&str> = all.iter().map(|f| f.id.as_str()).collect();
    ids.dedup();
    assert_eq!(ids.len(), all.len());
    for id in DOCUMENTED_MISMATCHES {
        let f = all.iter().find(|f| f.id == id).unwrap_or_else(|| panic!("{id} registered"));
        assert!(f.corrected.is_some(), "{id} carries a corrected form");
    }
}

#[test]
fn single_convention_runs_pass() {
    for conv in [PhaseConvention::Old, PhaseConvention::New, PhaseConvention::custom(0.4, -1.3).unwrap()] {
        let report = compare(&GridSpec::Default, Some(conv)).unwrap();
        assert!(report.pass, "{conv}");
        assert!(!report.entries.is_empty());
    }
}
