mod common;

use std::fs;
use std::process::Command;

use hyperlex::aggregate::{Strategy, StrategyKind};
use hyperlex::Construction;
use hyperlex_cli::{compare_strategies, run_pipeline, ConfigLayer, RunConfig, RunStatus};
use hyperlex_learn::Family;
use sha2::{Digest, Sha256};

use common::{csv_lookup, files_under, five_word, five_word_config, synthetic, SynthOptions};

#[test]
fn five_word_characteristic_lengths_reach_the_aggregation_csv() {
    let fx = five_word();
    let cfg = five_word_config(&fx, "out");
    let manifest = run_pipeline(&cfg).unwrap();
    assert_eq!(manifest.status, RunStatus::Complete);
    let features = cfg.output_dir.join("features");
    let length = |tag: &str| {
        csv_lookup(
            &features.join(format!("{tag}.csv")),
            "dog",
            &format!("length_{tag}"),
        )
        .unwrap()
    };
    assert!((length("ego") - 4.4).abs() < 1e-9);
    assert!((length("hypergraph") - 4.0).abs() < 1e-9);
    // the cover value is the mean over the emitted communities holding dog
    let cover = fs::read_to_string(cfg.output_dir.join("structures/lemon.txt")).unwrap();
    let len = |w: &str| w.chars().count() as f64;
    let means: Vec<f64> = cover
        .lines()
        .map(|l| l.split('\t').skip(1).collect::<Vec<_>>())
        .filter(|c| c.contains(&"dog"))
        .map(|c| c.iter().map(|w| len(w)).sum::<f64>() / c.len() as f64)
        .collect();
    assert!(means.len() >= 2);
    let expected = means.iter().sum::<f64>() / means.len() as f64;
    assert!(
        (length("lemon") - expected).abs() < 1e-9,
        "lemon {}",
        length("lemon")
    );
    assert_eq!(length("non_network"), 3.0);
    let d = manifest.dataset.as_ref().unwrap();
    assert_eq!((d.vocabulary, d.hyperedges), (5, 3));
}

#[test]
fn manifest_lists_every_emitted_file_with_its_digest() {
    let fx = five_word();
    let cfg = five_word_config(&fx, "out");
    let manifest = run_pipeline(&cfg).unwrap();
    let mut listed: Vec<String> = manifest.artifacts.iter().map(|a| a.path.clone()).collect();
    listed.push("manifest.json".into());
    listed.sort();
    assert_eq!(listed, files_under(&cfg.output_dir));
    for a in &manifest.artifacts {
        let bytes = fs::read(cfg.output_dir.join(&a.path)).unwrap();
        assert_eq!(hex_sha(&bytes), a.sha256, "{}", a.path);
        assert_eq!(bytes.len() as u64, a.bytes);
    }
    // five words are far too few contexts for the extremes statistic
    assert!(manifest
        .compartments
        .iter()
        .all(|c| c.statistic.is_none() && c.note.is_some()));
    assert!(manifest
        .warnings
        .iter()
        .any(|w| w.contains("no extremes statistic")));
    let inputs: Vec<_> = manifest.inputs.iter().map(|d| d.sha256.clone()).collect();
    assert_eq!(
        inputs,
        vec![
            hex_sha(&fs::read(&fx.responses).unwrap()),
            hex_sha(&fs::read(&fx.norms).unwrap())
        ]
    );
}

#[test]
fn predictor_copy_target_gives_unit_r2() {
    let fx = synthetic(&SynthOptions {
        copy_target: true,
        ..SynthOptions::default()
    });
    let mut cfg = fx.config("out");
    cfg.strategies = vec![StrategyKind::NonNetwork];
    cfg.folds = 10;
    run_pipeline(&cfg).unwrap();
    let json = read_json(
        &cfg.output_dir
            .join("models/non_network__linear.metrics.json"),
    );
    assert!((json["r2_mean"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(json["family"], "linear");
    assert_eq!(json["strategy"], "non_network");
    assert_eq!(json["per_fold"].as_array().unwrap().len(), 10);
}

#[test]
fn target_enters_the_predictors_only_on_request() {
    let fx = synthetic(&SynthOptions::default());
    let header = |cfg: &RunConfig| {
        run_pipeline(cfg).unwrap();
        let text = fs::read_to_string(cfg.output_dir.join("features/hypergraph.csv")).unwrap();
        text.lines().next().unwrap().to_string()
    };
    let mut cfg = fx.config("plain");
    cfg.shap.enabled = false;
    let plain = header(&cfg);
    assert!(!plain.contains("concreteness_hypergraph"));
    cfg.include_target = true;
    cfg.output_dir = fx.out("leaky");
    let leaky = header(&cfg);
    assert!(leaky.contains("concreteness_hypergraph"));
    assert_eq!(leaky.split(',').count(), plain.split(',').count() + 1);
}

#[test]
fn identical_configs_give_byte_identical_reports() {
    let fx = synthetic(&SynthOptions::default());
    let mut cfg = fx.config("out");
    cfg.strategies = vec![
        StrategyKind::EgoNetwork,
        StrategyKind::HypergraphStar,
        StrategyKind::LouvainCommunity,
    ];
    cfg.models = vec![Family::Linear, Family::RandomForest];
    let first = run_pipeline(&cfg).unwrap();
    let snapshot: Vec<(String, Vec<u8>)> = first
        .artifacts
        .iter()
        .map(|a| {
            (
                a.path.clone(),
                fs::read(cfg.output_dir.join(&a.path)).unwrap(),
            )
        })
        .collect();
    let second = run_pipeline(&cfg).unwrap();
    assert_eq!(first.artifacts, second.artifacts);
    for (path, bytes) in snapshot {
        assert_eq!(
            fs::read(cfg.output_dir.join(&path)).unwrap(),
            bytes,
            "{path}"
        );
    }
    assert!(first
        .artifacts
        .iter()
        .any(|a| a.path.ends_with(".predictions.csv")));
    assert!(first.artifacts.iter().any(|a| a.path.ends_with(".svg")));
}

#[test]
fn echoed_config_reproduces_the_run() {
    let fx = synthetic(&SynthOptions::default());
    let mut cfg = fx.config("out");
    cfg.models = vec![Family::Svr];
    let first = run_pipeline(&cfg).unwrap();
    let json = read_json(&cfg.output_dir.join("models/hypergraph__svr.metrics.json"));
    let echoed: RunConfig = serde_json::from_value(json["config"].clone()).unwrap();
    assert_eq!(echoed, cfg);
    // the TOML rendering of the echo resolves to the same config
    let via_toml = ConfigLayer::from_toml(&echoed.to_toml().unwrap())
        .unwrap()
        .resolve()
        .unwrap();
    assert_eq!(via_toml, cfg);
    let again = run_pipeline(&via_toml).unwrap();
    assert_eq!(first.artifacts, again.artifacts);
}

#[test]
fn comparison_has_one_row_per_strategy_and_family() {
    let fx = synthetic(&SynthOptions::default());
    let mut cfg = fx.config("out");
    cfg.strategies = vec![
        StrategyKind::NonNetwork,
        StrategyKind::EgoNetwork,
        StrategyKind::HypergraphStar,
    ];
    cfg.models = vec![Family::Linear, Family::AdaBoostR2];
    cfg.shap.enabled = false;
    let (manifest, table) = compare_strategies(&cfg).unwrap();
    assert_eq!(table.rows.len(), 6);
    for &k in &cfg.strategies {
        for &f in &cfg.models {
            assert!(table.get(Strategy::new(k, false), f).is_some(), "{k} {f}");
            assert!(manifest.result(Strategy::new(k, false), f).is_some());
        }
    }
    let md = fs::read_to_string(cfg.output_dir.join("comparison.md")).unwrap();
    assert!(md.contains("| Model | Metric | Non-Net | G: Ego-Net | Hypergraph |"));
    assert!(md.contains("| Linear Regression | RMSE M |"));
    assert!(md.contains("| AdaBoost | RMSE M |"));
    let csv = fs::read_to_string(cfg.output_dir.join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);

    cfg.strategies.truncate(1);
    assert!(compare_strategies(&cfg).is_err());
}

#[test]
fn gap_comparison_columns_carry_gap_labels() {
    let fx = synthetic(&SynthOptions::default());
    let mut cfg = fx.config("out");
    cfg.strategies = vec![StrategyKind::LemonCover, StrategyKind::HypergraphStar];
    cfg.gap = true;
    cfg.models = vec![Family::RandomForest];
    cfg.shap.enabled = false;
    cfg.figures = false;
    let (_, table) = compare_strategies(&cfg).unwrap();
    let md = table.to_markdown();
    assert!(
        md.contains("| Model | Metric | G: Lemon-gap | Hypergraph-gap |"),
        "{md}"
    );
    assert!(md.contains("| Random Forest | RMSE M |"));
    assert!(table
        .get(
            Strategy::new(StrategyKind::HypergraphStar, true),
            Family::RandomForest
        )
        .is_some());
}

#[test]
fn every_construction_runs_and_community_strategies_emit_partitions() {
    let fx = synthetic(&SynthOptions::default());
    for c in Construction::ALL {
        let mut cfg = fx.config(&format!("out_{c}"));
        cfg.construction = c;
        cfg.strategies = vec![StrategyKind::LouvainCommunity, StrategyKind::EvaCommunity];
        cfg.shap.enabled = false;
        cfg.figures = false;
        let m = run_pipeline(&cfg).unwrap();
        let paths: Vec<&str> = m.artifacts.iter().map(|a| a.path.as_str()).collect();
        assert!(paths.contains(&format!("structures/graph_{c}.tsv").as_str()));
        assert!(paths.contains(&"structures/louvain.csv") && paths.contains(&"structures/eva.csv"));
        let d = m.dataset.unwrap();
        assert!(d.louvain_communities.unwrap() >= 2, "{c}");
    }
}

#[test]
fn compartments_report_a_statistic_with_enough_contexts() {
    let fx = synthetic(&SynthOptions::default());
    let mut cfg = fx.config("out");
    cfg.emit_null_moments = true;
    cfg.shap.enabled = false;
    let m = run_pipeline(&cfg).unwrap();
    let s = m
        .compartment("hypergraph", hyperlex::FeatureName::Aoa)
        .unwrap();
    assert!(s.statistic.unwrap() < 0.0);
    let moments = fs::read_to_string(cfg.output_dir.join("compartments/moments.csv")).unwrap();
    assert!(moments.starts_with("structure,context_id,feature,mean,std,size,permutation\n"));
    assert!(moments.lines().any(|l| l.ends_with(",empirical")));
    assert!(moments.lines().any(|l| l.ends_with(",19")));
    assert!(cfg
        .output_dir
        .join("figures/compartments_hypergraph_aoa.svg")
        .exists());
}

#[test]
fn failing_run_leaves_a_partial_manifest() {
    let fx = synthetic(&SynthOptions::default());
    let mut cfg = fx.config("out");
    cfg.norms = vec![fx.dir.path().join("missing.csv")];
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(format!("{err:#}").contains("partial manifest"));
    let json = read_json(&cfg.output_dir.join("manifest.json"));
    assert_eq!(json["status"], "failed");
    assert!(json["error"].as_str().unwrap().contains("missing.csv"));
    assert_eq!(json["inputs"].as_array().unwrap().len(), 1);
}

#[test]
fn binary_exit_codes_follow_the_run_outcome() {
    let fx = five_word();
    let cfg_path = fx.dir.path().join("run.toml");
    fs::write(
        &cfg_path,
        "responses = \"responses.tsv\"\nnorms = [\"norms.csv\"]\nstrategies = \"ego,hypergraph\"\n\
         models = \"linear\"\nfolds = 2\ntune = false\ndedup = true\noutput_dir = \"from_file\"\n\
         [shap]\nbackground_size = 4\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_hyperlex");
    let env_out = fx.dir.path().join("from_env");
    let ok = Command::new(bin)
        .args(["run", "--config"])
        .arg(&cfg_path)
        .env("HYPERLEX_OUTPUT_DIR", &env_out)
        .env("RUST_LOG", "error")
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(env_out.join("manifest.json").exists());
    assert!(!fx.dir.path().join("from_file").exists());

    let flag_out = fx.dir.path().join("from_flag");
    let ok = Command::new(bin)
        .args(["compare", "--config"])
        .arg(&cfg_path)
        .arg("--output-dir")
        .arg(&flag_out)
        .env("HYPERLEX_OUTPUT_DIR", &env_out)
        .env("RUST_LOG", "error")
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout)
        .contains("| Model | Metric | G: Ego-Net | Hypergraph |"));
    assert!(flag_out.join("comparison.md").exists());

    let bad = Command::new(bin)
        .args(["run", "--config"])
        .arg(&cfg_path)
        .args(["--construction", "star"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("construction"));
}

fn read_json(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn hex_sha(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
