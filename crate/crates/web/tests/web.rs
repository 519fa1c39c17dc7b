use hodge_web::{classify_text, hodge_matrix_text, report_text};

const MINUS_F3: &str = r#"
[field]
kind = "finite"
order = 3

[form]
gram = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
degree = 2
"#;

const HERMITIAN_F4: &str = r#"
[field]
kind = "finite"
order = 4
involution = "galois"

[form]
diagonal = [1, 1, 1, 1]
degree = 2
"#;

#[test]
fn hodge_matrix_lists_six_basis_vectors() {
    let s = hodge_matrix_text(MINUS_F3).unwrap();
    assert!(s.starts_with("delta = 2\n"), "{s}");
    for label in ["e12", "e13", "e14", "e23", "e24", "e34"] {
        assert!(s.contains(label), "{label} missing in {s}");
    }
    let rows = s.lines().filter(|l| l.trim_start().starts_with('e')).count();
    assert_eq!(rows, 7);
}

#[test]
fn minus_type_algebra_is_a_field() {
    let s = classify_text(MINUS_F3).unwrap();
    assert!(s.contains("split = no"), "{s}");
    assert!(!s.contains("idempotents"));
}

#[test]
fn hermitian_f4_algebra_splits() {
    let s = classify_text(HERMITIAN_F4).unwrap();
    assert!(s.contains("split = yes"), "{s}");
}

#[test]
fn report_matches_the_command_line_suite() {
    let s = report_text(MINUS_F3, "hodge-identities").unwrap();
    assert!(s.contains("j-squared"));
    assert!(!s.contains(" fail"), "{s}");
}

#[test]
fn errors_name_the_key() {
    let bad = MINUS_F3.replace("order = 3", "order = 6");
    let e = classify_text(&bad).unwrap_err();
    assert!(e.to_string().starts_with("field"), "{e}");
    let e = report_text(MINUS_F3, "nonsense").unwrap_err();
    assert!(e.to_string().starts_with("suite"), "{e}");
}
