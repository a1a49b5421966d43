mod common;

use std::path::Path;

use common::{cli, cli_ok, synthetic_corpus, write_corpus};
use recipe_iot::formats::conll::parse_conll;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn train_tag_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("corpus.conll");
    write_corpus(&corpus, &synthetic_corpus(20, 10));
    let parts = d.join("parts");
    cli_ok(&["split", "--in", s(&corpus), "--out-dir", s(&parts)]);
    let model = d.join("model.crf");
    cli_ok(&["train", "--train", s(&parts.join("train.conll")), "--out", s(&model), "--max-iterations", "80"]);

    let pred = d.join("pred.conll");
    let test = parts.join("test.conll");
    cli_ok(&["tag", "--model", s(&model), "--in", s(&test), "--out", s(&pred)]);
    let gold_data = parse_conll(&std::fs::read_to_string(&test).unwrap()).unwrap();
    let pred_data = parse_conll(&std::fs::read_to_string(&pred).unwrap()).unwrap();
    assert_eq!(gold_data.len(), pred_data.len());
    for ((g, _), (p, _)) in gold_data.iter().zip(&pred_data) {
        assert_eq!(g, p, "tagging keeps sentences intact");
    }

    let report = stdout(&cli_ok(&["eval", "--gold", s(&test), "--pred", s(&pred), "--report-format", "tsv"]));
    let micro: Vec<&str> = report.lines().find(|l| l.starts_with("micro\t")).unwrap().split('\t').collect();
    let f1: f64 = micro[3].parse().unwrap();
    assert!(f1 > 0.9, "templated corpus should be easy, got {report}");

    // a model is self-contained: tagging ignores a different --lexicon
    let lex = d.join("lex.tsv");
    std::fs::write(&lex, "oven\t_\toven\n").unwrap();
    let again = d.join("pred2.conll");
    cli_ok(&["tag", "--model", s(&model), "--in", s(&test), "--out", s(&again), "--lexicon", s(&lex)]);
    assert_eq!(std::fs::read(&pred).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("corpus.conll");
    write_corpus(&corpus, &synthetic_corpus(10, 4));
    std::fs::write(d.join("cfg.toml"), "[paths]\nmodel = \"from-config.crf\"\n[train]\nmax_iterations = 20\nc2 = 0.5\n").unwrap();
    let cfg = d.join("cfg.toml");
    cli_ok(&["train", "--config", s(&cfg), "--train", s(&corpus)]);
    let text = std::fs::read_to_string(d.join("from-config.crf")).unwrap();
    assert!(text.contains("\nc2\t0.5\n"));
    cli_ok(&["train", "--config", s(&cfg), "--train", s(&corpus), "--c2", "0.25", "--out", s(&d.join("flag.crf"))]);
    assert!(std::fs::read_to_string(d.join("flag.crf")).unwrap().contains("\nc2\t0.25\n"));

    std::fs::write(d.join("bad.toml"), "[train]\nlearning_rate = 1\n").unwrap();
    let out = cli(&["train", "--config", s(&d.join("bad.toml")), "--train", s(&corpus), "--out", s(&d.join("x"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("learning_rate"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    let out = cli(&["frobnicate"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    assert_eq!(cli(&["split", "--in", "x.conll"]).status.code(), Some(1));

    let bad = d.join("bad.conll");
    std::fs::write(&bad, "oven\t_\t_\t_\tB-Wear\n").unwrap();
    let out = cli(&["report", "distribution", "--in", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.conll") && err.contains("line 1"), "{err}");

    let model = d.join("m.crf");
    std::fs::write(&model, "recipe-iot-crf\t1\nmetadata\t0\n").unwrap();
    let out = cli(&["tag", "--model", s(&model), "--in", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(cli(&["eval", "--gold", s(&d.join("missing.conll")), "--pred", s(&bad)]).status.code(), Some(2));
}

#[test]
fn convert_round_trip_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("corpus.conll");
    write_corpus(&corpus, &synthetic_corpus(8, 4));
    let jsonl = d.join("corpus.jsonl");
    cli_ok(&["convert", "--in", s(&corpus), "--out", s(&jsonl)]);
    let back = d.join("back.conll");
    cli_ok(&["convert", "--in", s(&jsonl), "--out", s(&back)]);
    assert_eq!(std::fs::read_to_string(&corpus).unwrap(), std::fs::read_to_string(&back).unwrap());

    let dist = stdout(&cli_ok(&["report", "distribution", "--in", s(&corpus), "--report-format", "tsv"]));
    let lines: Vec<&str> = dist.lines().collect();
    assert_eq!(lines[0], "device\tspans\twhere%\twhat%\twhy%\thow%");
    assert!(lines.iter().any(|l| l.starts_with("oven\t")));
    assert!(lines.iter().any(|l| l.starts_with("fridge\t")));

    let comp = stdout(&cli_ok(&["report", "completeness", "--in", s(&corpus), "--overall", "--report-format", "tsv"]));
    assert!(comp.lines().nth(1).unwrap().starts_with("all\t"));

    let agree = stdout(&cli_ok(&["agreement", s(&corpus), s(&back), "--report-format", "tsv"]));
    assert!(agree.contains("mean\t-\t1.0000"));
}

#[test]
fn commands_apply_rules_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("c.conll");
    write_corpus(
        &corpus,
        &[common::tagged(
            "a",
            "r",
            Some("fridge"),
            "Chill for 2 hours until set",
            &[("2 hours", recipe_iot_core::corpus::SlotLabel::How)],
        )],
    );
    let rules = d.join("rules.tsv");
    std::fs::write(&rules, "fridge\tduration\tcooling time\tkeep\t5\n").unwrap();
    let out = stdout(&cli_ok(&["commands", "--in", s(&corpus), "--rules", s(&rules)]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["where"], "fridge");
    assert_eq!(v["where_source"], "device_hint");
    assert_eq!(v["what"], "cooling time");
    assert_eq!(v["why"], "keep");
    assert_eq!(v["cues"][0]["kind"], "while_condition");
    assert_eq!(v["schema_version"], 1);

    let raw = stdout(&cli_ok(&["commands", "--in", s(&corpus), "--no-infer"]));
    let v: serde_json::Value = serde_json::from_str(raw.trim()).unwrap();
    assert_eq!(v["complete"], false);
}

#[test]
fn expand_lists_neighbours() {
    let dir = tempfile::tempdir().unwrap();
    let emb = dir.path().join("vec.txt");
    std::fs::write(&emb, "3 2\noven 1 0\nstove 0.9 0.1\nbowl 0 1\n").unwrap();
    let out = stdout(&cli_ok(&["expand", "--embeddings", s(&emb), "--term", "oven", "--k", "1"]));
    assert!(out.starts_with("stove\t0.99"));
    assert_eq!(cli(&["expand", "--embeddings", s(&emb), "--term", "kettle"]).status.code(), Some(2));
}
