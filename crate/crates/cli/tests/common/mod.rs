//! On-disk fixtures shared by the integration targets.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hyperlex::aggregate::StrategyKind;
use hyperlex_cli::RunConfig;
use hyperlex_learn::Family;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

pub const NORM_HEADER: &str =
    "word,valence,arousal,dominance,semantic_size,concreteness,gender,aoa,familiarity,frequency,polysemy";

pub struct Fixture {
    pub dir: TempDir,
    pub responses: PathBuf,
    pub norms: PathBuf,
}

impl Fixture {
    pub fn new(responses_tsv: &str, norms_csv: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let responses = dir.path().join("responses.tsv");
        let norms = dir.path().join("norms.csv");
        fs::write(&responses, responses_tsv).unwrap();
        fs::write(&norms, norms_csv).unwrap();
        Fixture {
            dir,
            responses,
            norms,
        }
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Small, fast settings: family defaults, few folds, light attribution.
    pub fn config(&self, out: &str) -> RunConfig {
        let mut c = RunConfig::with_inputs(&self.responses, vec![self.norms.clone()]);
        c.folds = 5;
        c.tune = false;
        c.models = vec![Family::Linear];
        c.strategies = vec![StrategyKind::HypergraphStar];
        c.shap.background_size = 20;
        c.shap.max_instances = 10;
        c.null_permutations = 20;
        c.output_dir = self.out(out);
        c
    }
}

/// The five-word toy: dog's ego-network holds all five words, dog sits in
/// the triangles {dog, box, cat} and {dog, zebra, elephant}, and dog's star
/// holds the three hyperedges of the original three instances. The extra
/// rows make every word a cue (so it survives vocabulary filtering) while
/// repeating existing hyperedge word sets, which collapse under dedup.
pub fn five_word() -> Fixture {
    let responses = "cue\tR1\tR2\tR3\n\
        dog\tbox\tcat\t\n\
        zebra\tdog\tbox\t\n\
        dog\tzebra\telephant\t\n\
        box\tdog\tcat\t\n\
        cat\tbox\tdog\t\n\
        elephant\tzebra\tdog\t\n";
    let norms = format!(
        "{NORM_HEADER}\n\
         dog,7.1,5.2,5.5,3.1,6.8,4.2,2.5,6.6,9000,7\n\
         box,5.0,3.1,5.0,3.3,6.5,4.0,3.1,6.2,4000,5\n\
         cat,6.9,4.8,5.1,2.9,6.7,3.5,2.7,6.4,6000,4\n\
         zebra,5.8,4.9,4.8,5.0,6.3,4.1,4.6,4.9,700,1\n\
         elephant,6.0,4.4,4.3,6.8,6.6,4.4,3.9,5.3,1500,2\n"
    );
    Fixture::new(responses, &norms)
}

pub fn five_word_config(fx: &Fixture, out: &str) -> RunConfig {
    let mut c = fx.config(out);
    c.dedup = true;
    c.folds = 2;
    c.strategies = vec![
        StrategyKind::NonNetwork,
        StrategyKind::EgoNetwork,
        StrategyKind::LemonCover,
        StrategyKind::HypergraphStar,
    ];
    c.shap.background_size = 4;
    c
}

pub struct SynthOptions {
    pub words: usize,
    pub rows: usize,
    pub clusters: usize,
    /// probability that a response comes from the cue's own cluster
    pub homophily: f64,
    /// familiarity is an exact copy of concreteness
    pub copy_target: bool,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            words: 120,
            rows: 600,
            clusters: 6,
            homophily: 0.8,
            copy_target: false,
            seed: 1,
        }
    }
}

/// Lowercase letters only, unique per index, length 4 to 7.
pub fn word(i: usize) -> String {
    let mut s = String::from("w");
    let mut k = i;
    for _ in 0..3 {
        s.push((b'a' + (k % 26) as u8) as char);
        k /= 26;
    }
    s.push_str(&"z".repeat(i % 4));
    s
}

/// Words carry a latent score; clusters are contiguous score ranges and
/// every norm is a noisy function of the score.
pub fn synthetic(o: &SynthOptions) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let n = o.words;
    let cluster = |i: usize| i * o.clusters / n;
    let members: Vec<Vec<usize>> = (0..o.clusters)
        .map(|c| (0..n).filter(|&i| cluster(i) == c).collect())
        .collect();
    let mut responses = String::from("cue\tR1\tR2\tR3\n");
    let mut emit = |cue: usize, rng: &mut ChaCha8Rng| {
        let mut picked = vec![cue];
        while picked.len() < 4 {
            let w = if rng.gen_bool(o.homophily) {
                let m = &members[cluster(cue)];
                m[rng.gen_range(0..m.len())]
            } else {
                rng.gen_range(0..n)
            };
            if !picked.contains(&w) {
                picked.push(w);
            }
        }
        let _ = writeln!(
            responses,
            "{}\t{}\t{}\t{}",
            word(cue),
            word(picked[1]),
            word(picked[2]),
            word(picked[3])
        );
    };
    for i in 0..n {
        emit(i, &mut rng);
    }
    for _ in n..o.rows {
        let cue = rng.gen_range(0..n);
        emit(cue, &mut rng);
    }
    let mut norms = format!("{NORM_HEADER}\n");
    for i in 0..n {
        let z = (i as f64 + 0.5) / n as f64;
        let frequency = (10.0f64).powf(2.0 + 3.0 * rng.gen::<f64>()).round();
        let polysemy = 1 + rng.gen_range(0..9);
        let mut noise = |s: f64| s * rng.gen_range(-1.0..1.0);
        let concreteness = 1.5 + 3.0 * z + noise(0.4);
        let familiarity = if o.copy_target {
            concreteness
        } else {
            4.0 + noise(1.0)
        };
        let _ = writeln!(
            norms,
            "{},{:.4},{:.4},{:.4},{:.4},{:.6},{:.4},{:.4},{:.6},{},{}",
            word(i),
            5.0 + 2.0 * z + noise(0.5),
            4.0 + noise(1.0),
            5.0 - z + noise(0.5),
            3.0 + 2.0 * z + noise(0.8),
            concreteness,
            4.0 + noise(1.5),
            3.0 + 3.0 * (1.0 - z) + noise(0.5),
            familiarity,
            frequency,
            polysemy,
        );
    }
    Fixture::new(&responses, &norms)
}

/// Every file under `root`, as sorted `/`-separated relative paths.
pub fn files_under(root: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap();
                out.push(
                    rel.components()
                        .map(|c| c.as_os_str().to_string_lossy())
                        .collect::<Vec<_>>()
                        .join("/"),
                );
            }
        }
    }
    out.sort();
    out
}

/// Value of `column` in the row whose first field equals `key`.
pub fn csv_lookup(path: &Path, key: &str, column: &str) -> Option<f64> {
    let mut rdr = csv::Reader::from_path(path).ok()?;
    let col = rdr.headers().ok()?.iter().position(|h| h == column)?;
    rdr.records()
        .filter_map(|r| r.ok())
        .find(|r| r.get(0) == Some(key))
        .and_then(|r| r.get(col)?.parse().ok())
}
