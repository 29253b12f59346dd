use schur_web::{minpoly_text, normalize_text, table_json};

#[test]
fn normalize_in_each_basis() {
    assert_eq!(normalize_text("e*f", 2, "fhe", "kostant").unwrap(), "F(1)*E(1) + 2 - 2*binom(H2,1)");
    assert_eq!(normalize_text("h", 2, "fhe", "hbasis").unwrap(), "h");
    assert_eq!(normalize_text("E(2)", 1, "fhe", "kostant").unwrap(), "0");
    assert!(normalize_text("e +", 2, "fhe", "kostant").unwrap_err().contains("byte 3"));
    assert!(normalize_text("e", 2, "xyz", "kostant").is_err());
    assert!(normalize_text("e", 2, "fhe", "other").is_err());
}

#[test]
fn minpoly_matches_cli_examples() {
    assert_eq!(minpoly_text("h", 2, "fhe").unwrap(), "T^3 - 4*T");
    assert_eq!(minpoly_text("H1", 3, "ehf").unwrap(), "T^4 - 6*T^3 + 11*T^2 - 6*T");
}

#[test]
fn table_has_labels() {
    let v: serde_json::Value = serde_json::from_str(&table_json(1, "fhe").unwrap()).unwrap();
    let labels: Vec<&str> = v["labels"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    assert_eq!(labels, ["1", "E(1)", "binom(H2,1)", "F(1)"]);
    assert_eq!(v["products"].as_array().unwrap().len(), 16);
    assert!(table_json(7, "fhe").is_err());
}
