use std::path::{Path, PathBuf};

use dstit_core::deontic::{expected_utility, Action};
use dstit_core::rational::{format_rational, ratio};
use dstit_core::{load_document, load_model, parse, save_model, Evaluator, Model, ModelDocument, Rational};
use num_traits::Zero;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn model(rel: &str) -> Model {
    load_model(fixture(rel)).unwrap()
}

fn all_fixture_files() -> Vec<PathBuf> {
    let mut out = vec![
        fixture("verdict.model"),
        fixture("verdict-variation.model"),
        fixture("minimal.model"),
    ];
    for entry in std::fs::read_dir(fixture("countermodels")).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "model") {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn holds(m: &Model, text: &str, index: &str) -> bool {
    let i = m.frame().parse_index(index).unwrap();
    Evaluator::new(m).eval(i, &parse(text).unwrap()).unwrap()
}

#[test]
fn verdict_shape() {
    let m = model("verdict.model");
    let f = m.frame();
    assert_eq!(f.index_count(), 8);
    assert_eq!(f.moment_count(), 3);
    assert_eq!(f.history_count(), 4);
    let doctor = m.measure(f.agent_id("doctor").unwrap());
    let layer = &doctor.layers()[0];
    assert_eq!(layer.mass_of(f.parse_index("m1/h1").unwrap()), &ratio(9, 40));
    assert_eq!(layer.mass_of(f.parse_index("m3/h4").unwrap()), &ratio(1, 40));
}

#[test]
fn variation_values() {
    let m = model("verdict-variation.model");
    let values: Vec<String> = m.frame().values().iter().map(format_rational).collect();
    assert_eq!(values, ["2", "1", "0", "0"]);
}

#[test]
fn minimal_loads() {
    let m = model("minimal.model");
    assert_eq!(m.frame().index_count(), 1);
    assert!(holds(&m, "p & [] p & K:solo p & B:solo p & Ob:solo p", "m/h"));
}

#[test]
fn remaining_verdict_facts() {
    let m = model("verdict.model");
    // the figure's reading: at m2 it is settled that the patient has not eaten
    assert!(holds(&m, "[] !e", "m2/h1"));
    assert!(holds(&m, "!e & a & r", "m2/h1"));
    assert!(holds(&m, "[doctor] d", "m3/h3"));
    assert!(holds(&m, "e", "m3/h3"));
}

/// EU with the membership predicates spelled out over every index.
fn brute_force_eu(m: &Model, l: Action) -> Rational {
    use dstit_core::ConditionalProbability;
    let f = m.frame();
    let cell = l.histories(f);
    let mut total = Rational::zero();
    for j in f.index_ids() {
        let at = f.index(j);
        let in_cluster = cell.iter().any(|h| {
            f.index_id(l.moment, h)
                .is_some_and(|i| f.indistinguishable(l.agent, i, j))
        });
        if !in_cluster {
            continue;
        }
        let single = dstit_core::IndexSet::from_ids(f.index_count(), [j]);
        let w = m.measure(l.agent).mu(&single, f.information_set(l.agent, j));
        total += w * f.value(at.history);
    }
    total
}

#[test]
fn expected_utility_matches_brute_force_on_fixtures() {
    for path in all_fixture_files() {
        let m = load_model(&path).unwrap();
        let f = m.frame();
        for agent in f.agent_ids() {
            for moment in f.moment_ids() {
                for cell in 0..f.choice_cells(agent, moment).len() {
                    let l = Action { agent, moment, cell };
                    let eu = expected_utility(f, m.measure(agent), l).unwrap();
                    assert_eq!(eu, brute_force_eu(&m, l), "{}", path.display());
                }
            }
        }
    }
}

#[test]
fn expected_utility_matches_oracle_files() {
    for (model_file, oracle) in [
        ("verdict.model", "oracle/verdict.eu.json"),
        ("verdict-variation.model", "oracle/verdict-variation.eu.json"),
    ] {
        let m = model(model_file);
        let f = m.frame();
        let text = std::fs::read_to_string(fixture(oracle)).unwrap();
        let table: serde_json::Value = serde_json::from_str(&text).unwrap();
        for (agent, by_moment) in table.as_object().unwrap() {
            for (moment, cells) in by_moment.as_object().unwrap() {
                let r = m.deontic_report(f.agent_id(agent).unwrap(), f.moment_id(moment).unwrap());
                for (k, cell) in r.cells.iter().enumerate() {
                    let key = format!("{{{}}}", f.history_labels(cell).join(","));
                    assert_eq!(format_rational(&r.eu[k]), cells[&key].as_str().unwrap(), "{model_file} {key}");
                }
            }
        }
    }
}

#[test]
fn load_save_load_is_identity_on_normalized_documents() {
    let dir = tempfile::tempdir().unwrap();
    for path in all_fixture_files() {
        let doc = load_document(&path).unwrap();
        let m = doc.build().unwrap();
        let out = dir.path().join("copy.model");
        save_model(&m, doc.notes.clone(), &out).unwrap();
        let again = load_document(&out).unwrap();
        assert_eq!(doc.normalized().unwrap(), again.normalized().unwrap(), "{}", path.display());
        assert_eq!(again.normalized().unwrap(), again, "saved documents are already normal");
        let rebuilt = again.build().unwrap();
        assert_eq!(
            ModelDocument::from_model(&rebuilt, vec![]).to_json(),
            ModelDocument::from_model(&m, vec![]).to_json()
        );
    }
}

fn mutated(edit: impl FnOnce(&mut serde_json::Value)) -> String {
    let text = std::fs::read_to_string(fixture("verdict.model")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    edit(&mut v);
    let doc = ModelDocument::from_json(&v.to_string()).unwrap();
    doc.build().unwrap_err().to_string()
}

#[test]
fn errors_name_section_and_entry() {
    let e = mutated(|v| v["valuation"]["a"] = serde_json::json!(["m9/h1"]));
    assert!(e.contains("valuation") && e.contains("m9/h1"), "{e}");

    let e = mutated(|v| v["choices"]["m2/nobody"] = serde_json::json!([["h1"], ["h2"]]));
    assert!(e.contains("choices") && e.contains("m2/nobody"), "{e}");

    let e = mutated(|v| v["values"]["h1"] = serde_json::json!("0.5"));
    assert!(e.contains("values") && e.contains("h1"), "{e}");

    let e = mutated(|v| v["measures"]["doctor"][0]["m1/h1"] = serde_json::json!("1/2"));
    assert!(e.contains("doctor"), "{e}");

    let e = mutated(|v| v["epistemic"]["doctor"][0] = serde_json::json!(["m1/h1", "m2/h3"]));
    assert!(e.contains("epistemic") && e.contains("m2/h3"), "{e}");
}

#[test]
fn unknown_fields_are_rejected() {
    let err = ModelDocument::from_json(r#"{"agents":[],"moments":[],"measures":{},"extra":1}"#).unwrap_err();
    assert!(err.to_string().contains("extra"), "{err}");
}

#[test]
fn weak_dominance_is_not_reflexive_on_mixed_states() {
    use dstit_core::deontic::obj_dominates;
    let m = model("dominance-irreflexive.model");
    let f = m.frame();
    let bob = f.agent_id("bob").unwrap();
    let m0 = f.moment_id("m0").unwrap();
    let only = Action { agent: bob, moment: m0, cell: 0 };
    assert_eq!(f.choice_cells(bob, m0).len(), 1);
    assert!(!obj_dominates(f, only, only).unwrap());
    // still optimal: nothing strictly dominates it
    assert_eq!(m.deontic_report(bob, m0).optimal, vec![0]);
}
