use std::collections::BTreeSet;

use ftalloc_core::halfspace::{
    enumerate_by_functions, enumerate_by_weight_grid, enumerate_halfspace_sets, monotone_halfspace_sets,
};

#[test]
fn function_and_grid_paths_agree() {
    for (k, expected) in [(1, 4), (2, 14), (3, 104), (4, 1882)] {
        let by_lp: BTreeSet<u64> = enumerate_by_functions(k).unwrap().iter().map(|s| s.mask).collect();
        let by_grid: BTreeSet<u64> = enumerate_by_weight_grid(k, 3).unwrap().iter().map(|s| s.mask).collect();
        assert_eq!(by_lp.len(), expected, "k = {k}");
        assert_eq!(by_lp, by_grid, "k = {k}");
    }
}

#[test]
fn five_variables_by_grid() {
    let sets = enumerate_halfspace_sets(5).unwrap();
    assert_eq!(sets.len(), 94_572);
    assert!(sets.iter().all(|s| s.realized_mask() == s.mask));
    assert_eq!(monotone_halfspace_sets(5).unwrap().len(), 3_287);
}

#[test]
fn four_variable_witnesses_and_monotone_count() {
    let sets = enumerate_halfspace_sets(4).unwrap();
    assert!(sets.iter().all(|s| s.realized_mask() == s.mask));
    assert_eq!(monotone_halfspace_sets(4).unwrap().len(), 150);
}
