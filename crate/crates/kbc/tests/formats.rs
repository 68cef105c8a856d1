use std::collections::BTreeSet;
use std::path::Path;

use kbc::checkpoint;
use kbc::constraints::{format_entity_types, format_relation_constraints, load_type_constraints};
use kbc::report::{fixed4, to_tsv, MetricsReport};
use kbc::rules_file::{format_rules, parse_rules};
use kbc::tsv::{load_dataset, parse_triples, write_triples};
use kbc_core::eval::{apply_type_filter, pr_evaluate, EvalTargets, TableScorer};
use kbc_core::kb::VocabMode;
use kbc_core::rules::{mine_rules, MiningConfig};
use kbc_core::synthetic::{inverse_symmetric_kb, SyntheticConfig};
use kbc_core::topk::ScanConfig;
use kbc_core::{BlockLayout, ModelKind, ModelOptions, ModelParams, ModelSpec, Split, Vocab};
use proptest::prelude::*;

fn name_triples() -> impl Strategy<Value = Vec<(u8, u8, u8)>> {
    prop::collection::vec((0u8..12, 0u8..3, 0u8..12), 0..40)
}

proptest! {
    #[test]
    fn triples_round_trip(raw in name_triples()) {
        let text: String = raw.iter().map(|(s, r, o)| format!("e{s}\tr{r}\te{o}\n")).collect();
        let mut vocab = Vocab::new();
        let file = parse_triples(&text, Path::new("t"), &mut vocab, VocabMode::Build).unwrap();
        let mut out = Vec::new();
        write_triples(&mut out, &file.triples, &vocab).unwrap();
        let back: BTreeSet<&str> = std::str::from_utf8(&out).unwrap().lines().collect();
        let orig: BTreeSet<&str> = text.lines().collect();
        prop_assert_eq!(back, orig);
        prop_assert_eq!(file.triples.len() + file.duplicates, raw.len());
    }
}

#[test]
fn checkpoint_bytes_are_stable() {
    let mut specs: Vec<ModelSpec> = ModelKind::ALL.iter().map(|&k| ModelSpec::new(k, 5)).collect();
    specs.push(ModelSpec::new(ModelKind::Analogy, 5).with_options(ModelOptions {
        layout: Some(BlockLayout { scalars: 3, pairs: 1 }),
        literal_complex: false,
    }));
    specs.push(ModelSpec::new(ModelKind::ComplEx, 4).with_options(ModelOptions { layout: None, literal_complex: true }));
    let dir = tempfile::tempdir().unwrap();
    for (n, spec) in specs.into_iter().enumerate() {
        let params = ModelParams::init(spec, 7, 3, n as u64, 1.0).unwrap();
        let (a, b) = (dir.path().join("a.ckpt"), dir.path().join("b.ckpt"));
        checkpoint::save(&a, &params).unwrap();
        let loaded = checkpoint::load(&a).unwrap();
        assert_eq!(loaded, params);
        checkpoint::save(&b, &loaded).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{:?}", spec);
    }
}

#[test]
fn augmented_constraints_admit_every_split_triple() {
    let syn = inverse_symmetric_kb(&SyntheticConfig { group_size: 20, base_pairs: 60, sym_pairs: 30, ..Default::default() })
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (e, r) = (dir.path().join("types.tsv"), dir.path().join("rels.tsv"));
    // Write only the relation constraints and an empty type file: every
    // type then comes from augmentation.
    std::fs::write(&e, "").unwrap();
    std::fs::write(&r, format_relation_constraints(&syn.kb, &syn.types)).unwrap();
    let types = load_type_constraints(&e, &r, &syn.kb, true).unwrap();
    assert!(!types.constrained_relations().is_empty());
    for split in Split::ALL {
        for t in syn.kb.split(split) {
            assert!(apply_type_filter(&types, t.relation.index(), t.subject.index(), t.object.index()), "{t}");
        }
    }
    // The full files reproduce the generator's constraints.
    std::fs::write(&e, format_entity_types(&syn.kb, &syn.types)).unwrap();
    let again = load_type_constraints(&e, &r, &syn.kb, false).unwrap();
    for k in 0..syn.kb.num_relations() {
        for i in 0..syn.kb.num_entities() {
            for j in 0..syn.kb.num_entities() {
                assert_eq!(apply_type_filter(&again, k, i, j), apply_type_filter(&syn.types, k, i, j));
            }
        }
    }
}

#[test]
fn dataset_loads_in_first_appearance_order() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("train.txt"), "a\tk\tb\n").unwrap();
    std::fs::write(dir.path().join("valid.txt"), "").unwrap();
    std::fs::write(dir.path().join("test.txt"), "a\tk\tc\na\tk\tb\n").unwrap();
    let kb = load_dataset(dir.path()).unwrap();
    assert_eq!(kb.vocab().entity_names(), ["a", "b", "c"]);
    let s = kb.stats();
    assert_eq!((s.entities, s.relations, s.train, s.valid, s.test), (3, 1, 1, 0, 1));
}

fn pr_report(seed: u64) -> MetricsReport {
    let syn = inverse_symmetric_kb(&SyntheticConfig { group_size: 10, base_pairs: 30, sym_pairs: 10, seed, ..Default::default() })
        .unwrap();
    let mut table = TableScorer::new(syn.kb.num_entities(), 0.0);
    for (n, t) in syn.kb.test().iter().enumerate() {
        table.set(t.subject.index(), t.relation.index(), t.object.index(), 1.0 / (n + 2) as f64);
    }
    let r = pr_evaluate(&table, &EvalTargets::test(&syn.kb), 7, None, &ScanConfig::default());
    MetricsReport::from_pr(&r, syn.kb.vocab(), "table", "synthetic", serde_json::json!({"seed": seed}))
}

#[test]
fn reports_are_byte_identical() {
    assert_eq!(pr_report(3).to_json(), pr_report(3).to_json());
    assert_eq!(to_tsv(&[pr_report(3)]), to_tsv(&[pr_report(3)]));
}

#[test]
fn json_and_tsv_agree_on_global_metrics() {
    let reports = [pr_report(1), pr_report(2)];
    let tsv = to_tsv(&reports);
    let mut lines = tsv.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    for (report, line) in reports.iter().zip(lines) {
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let cells: Vec<&str> = line.split('\t').collect();
        let metrics = json["metrics"].as_object().unwrap();
        assert!(!metrics.is_empty());
        for (name, value) in metrics {
            let col = header.iter().position(|h| h == name).unwrap();
            let from_tsv: f64 = cells[col].parse().unwrap();
            assert_eq!(from_tsv, value.as_f64().unwrap(), "{name}");
            assert_eq!(cells[col], fixed4(value.as_f64().unwrap()));
        }
    }
}

#[test]
fn mined_rules_survive_the_text_format() {
    let syn = inverse_symmetric_kb(&SyntheticConfig { group_size: 15, base_pairs: 40, sym_pairs: 20, ..Default::default() })
        .unwrap();
    let model = mine_rules(&syn.kb, &MiningConfig::default()).unwrap();
    assert!(!model.is_empty());
    let text = format_rules(syn.kb.vocab(), model.rules());
    let parsed = parse_rules(&text, Path::new("rules.txt"), syn.kb.vocab()).unwrap();
    let original: Vec<_> = model.rules().cloned().collect();
    assert_eq!(parsed, original);
}
