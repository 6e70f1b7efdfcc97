use serde_json::Value;
use ucycle_web::{homology_json, sigma_json, verify_json};

#[test]
fn circle_homology() {
    let out: Value =
        serde_json::from_str(&homology_json(r#"{"b1": 1, "xi": [2], "ring": "Z"}"#, "even").unwrap()).unwrap();
    assert_eq!(out["N"], 2);
    assert_eq!(out["group"], "Z^2");
    assert_eq!(out["t_nilpotency"], 1);
    assert!(homology_json(r#"{"b1": 1, "xi": [0], "ring": "Z"}"#, "even").is_err());
    assert!(homology_json(r#"{"b1": 1, "xi": [1], "ring": "Z"}"#, "both").is_err());
}

#[test]
fn sigma_is_not_cyclic() {
    let out: Value = serde_json::from_str(&sigma_json(1, 1, 2).unwrap()).unwrap();
    assert_eq!(out["report"]["verdict"]["kind"], "non_cyclic");
}

#[test]
fn named_checks() {
    let out: Value = serde_json::from_str(&verify_json("theorem2", r#"{"N": 2, "m": 1}"#).unwrap()).unwrap();
    assert_eq!(out["verdict"], "pass");
    let out: Value =
        serde_json::from_str(&verify_json("pfh-translate", r#"{"d": 4, "g": 1, "b1": 2, "N": 2}"#).unwrap()).unwrap();
    assert_eq!(out["verdict"], "pass");
    assert!(verify_json("theorem2", r#"{"N": 1, "m": 0}"#).is_err());
    assert!(verify_json("nope", "{}").is_err());
}
