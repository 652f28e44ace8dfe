//! The acceptance suite, one test per selftest check. Each check carries its
//! own tolerances (exact equality everywhere) and runtime budget; a failure
//! message here is the check's own diagnostic.

use forest_trees::selftest::run_check;

fn assert_check(name: &str) {
    let outcome = run_check(name).unwrap();
    println!("{name}: {} ({} ms)", outcome.details, outcome.millis);
    assert!(outcome.passed, "{name}: {}", outcome.details);
}

#[test]
fn closed_form_matches_enumeration_on_all_small_hosts() {
    assert_check("closed-form-vs-enumeration");
}

#[test]
fn closed_form_matches_matrix_tree_on_seeded_forests() {
    assert_check("closed-form-vs-matrix-tree");
}

#[test]
fn matching_and_tree_specializations_match_the_closed_form() {
    assert_check("specializations");
}

#[test]
fn moon_formula_matches_enumeration_on_complete_graphs() {
    assert_check("moon-complete-graph");
}

#[test]
fn factored_weights_match_matrix_tree() {
    assert_check("factored-weights");
}

#[test]
fn both_recursions_match_matrix_tree() {
    assert_check("recursions");
}

#[test]
fn identity_suites_pass_with_degenerate_cases() {
    assert_check("identity-suites");
}

#[test]
fn numerator_is_always_divisible() {
    assert_check("divisibility");
}

#[test]
fn conjecture_harness_confirms_equality_and_completes() {
    assert_check("conjecture-harness");
}

#[test]
fn seeded_outputs_are_byte_identical() {
    assert_check("determinism");
}
