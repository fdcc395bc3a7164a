use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hyperkge::checkpoint;
use hyperkge_core::train::{init_embeddings, seeded_rng};
use hyperkge_core::TrainConfig;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperkge"));
    cmd.env_remove("HYPERKGE_DATA");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Writes a dataset directory: `train`, `valid` and `test` as line lists.
fn dataset(root: &Path, name: &str, splits: [&str; 3]) -> PathBuf {
    let dir = root.join(name);
    fs::create_dir_all(&dir).unwrap();
    for (file, text) in ["train.txt", "valid.txt", "test.txt"].iter().zip(splits) {
        fs::write(dir.join(file), text).unwrap();
    }
    dir
}

/// Two relations over a ring of 20 entities, with a few held-out triples.
fn ring(root: &Path) -> PathBuf {
    let mut all = Vec::new();
    for i in 0..20 {
        all.push(format!("n{i}\tnext\tn{}\n", (i + 1) % 20));
        all.push(format!("n{}\tprev\tn{i}\n", (i + 1) % 20));
    }
    let valid: String = all[..4].concat();
    let test: String = all[4..10].concat();
    let train: String = all[10..].concat();
    dataset(root, "ring", [&train, &valid, &test])
}

fn train_args(data: &Path, out: &Path) -> Vec<String> {
    [
        "train", "--data", data.to_str().unwrap(), "--out", out.to_str().unwrap(), "--dim", "4", "--neg", "2",
        "--seed", "5",
    ]
    .map(String::from)
    .to_vec()
}

#[test]
fn zero_epochs_write_the_initialisation() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let out = tmp.path().join("run");
    let o = run(bin().args(train_args(&data, &out)).args(["--epochs", "0"]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for file in ["model.qkge", "train.log", "entities.dict", "relations.dict", "config.txt"] {
        assert!(out.join(file).exists(), "{file}");
    }
    let ckpt = checkpoint::load(&out.join("model.qkge")).unwrap();
    let config = TrainConfig {
        dim: 4,
        seed: 5,
        ..Default::default()
    };
    let init = init_embeddings(&config, 20, 2, &mut seeded_rng(5)).unwrap();
    assert_eq!(fs::read(out.join("model.qkge")).unwrap(), checkpoint::encode(&init, false));
    assert_eq!(ckpt.table.num_entities(), 20);
    assert_eq!(fs::read_to_string(out.join("train.log")).unwrap(), "");
}

#[test]
fn same_seed_same_files() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = run(bin().args(train_args(&data, out)).args(["--epochs", "6", "--eval-every", "2"]));
        assert_eq!(code(&o), 0);
    }
    for file in ["model.qkge", "train.log"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let log = fs::read_to_string(a.join("train.log")).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0].split('\t').count(), 2);
    assert_eq!(lines[1].split('\t').count(), 3);
}

#[test]
fn eval_reports_logged_mrr_and_split_sizes() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let out = tmp.path().join("run");
    let o = run(bin().args(train_args(&data, &out)).args(["--epochs", "20", "--eval-every", "5"]));
    assert_eq!(code(&o), 0);
    let best = fs::read_to_string(out.join("train.log"))
        .unwrap()
        .lines()
        .filter_map(|l| l.split('\t').nth(2).map(|m| m.parse::<f64>().unwrap()))
        .fold(f64::MIN, f64::max);
    let ckpt = out.join("model.qkge");
    let eval = |split: &str| {
        let o = run(bin().args(["eval", "--checkpoint", ckpt.to_str().unwrap(), "--data", data.to_str().unwrap()]).args([
            "--split", split,
        ]));
        assert_eq!(code(&o), 0);
        let text = stdout(&o);
        let row: Vec<String> = text.lines().nth(1).unwrap().split('\t').map(String::from).collect();
        (row[0].parse::<usize>().unwrap(), row[2].parse::<f64>().unwrap())
    };
    let (valid_queries, valid_mrr) = eval("valid");
    let (test_queries, _) = eval("test");
    assert_eq!((valid_queries, test_queries), (8, 12));
    assert!((valid_mrr - best).abs() < 5e-7, "{valid_mrr} vs {best}");
}

#[test]
fn per_relation_and_type_constraints() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(code(&run(bin().args(train_args(&data, &out)).args(["--epochs", "3"]))), 0);
    let o = run(bin().args([
        "eval",
        "--checkpoint",
        out.join("model.qkge").to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--per-relation",
        "--type-constraints",
        "--workers",
        "3",
        "--ties",
        "pessimistic",
    ]));
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("relation\tqueries\tMRR\n"));
    assert!(text.contains("\nnext\t") && text.contains("\nprev\t"));
}

#[test]
fn corrupted_checkpoint_is_a_data_error() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(code(&run(bin().args(train_args(&data, &out)).args(["--epochs", "1"]))), 0);
    let path = out.join("model.qkge");
    let mut bytes = fs::read(&path).unwrap();
    bytes[checkpoint::HEADER_LEN + 3] ^= 1;
    fs::write(&path, bytes).unwrap();
    let o = run(bin().args(["eval", "--checkpoint", path.to_str().unwrap(), "--data", data.to_str().unwrap()]));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
}

#[test]
fn vocabulary_mismatch_is_a_data_error() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let other = dataset(tmp.path(), "other", ["a\tr\tb\n", "", "b\tr\ta\n"]);
    let out = tmp.path().join("run");
    assert_eq!(code(&run(bin().args(train_args(&data, &out)).args(["--epochs", "1"]))), 0);
    let o = run(bin().args([
        "eval",
        "--checkpoint",
        out.join("model.qkge").to_str().unwrap(),
        "--data",
        other.to_str().unwrap(),
    ]));
    assert_eq!(code(&o), 2);
}

#[test]
fn degenerate_relation_is_a_numeric_error() {
    let tmp = TempDir::new().unwrap();
    let data = dataset(tmp.path(), "tiny", ["a\tr\tb\n", "", "b\tr\ta\n"]);
    let dump = "# hyperkge variant=quate dim=1 reciprocal=false\n## entities\na\t1,0,0,0\nb\t0,1,0,0\n## relations\nr\t0,0,0,0\n";
    let tsv = tmp.path().join("dump.tsv");
    fs::write(&tsv, dump).unwrap();
    let model = tmp.path().join("model");
    assert_eq!(code(&run(bin().args(["import", "--tsv", tsv.to_str().unwrap(), "--out", model.to_str().unwrap()]))), 0);
    let o = run(bin().args([
        "eval",
        "--checkpoint",
        model.join("model.qkge").to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
    ]));
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn export_import_export_through_the_cli() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(code(&run(bin().args(train_args(&data, &out)).args(["--epochs", "2"]))), 0);
    let first = run(bin().args(["export", "--checkpoint", out.join("model.qkge").to_str().unwrap()]));
    assert_eq!(code(&first), 0);
    let tsv = tmp.path().join("a.tsv");
    fs::write(&tsv, &first.stdout).unwrap();
    let back = tmp.path().join("back");
    assert_eq!(code(&run(bin().args(["import", "--tsv", tsv.to_str().unwrap(), "--out", back.to_str().unwrap()]))), 0);
    let second = run(bin().args(["export", "--checkpoint", back.join("model.qkge").to_str().unwrap()]));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(fs::read(out.join("model.qkge")).unwrap(), fs::read(back.join("model.qkge")).unwrap());
}

/// A dataset with WN18RR's entity and relation counts.
fn wn18rr_shaped(root: &Path) -> PathBuf {
    let mut train = String::new();
    for i in 0..40943 {
        let _ = writeln!(train, "{i:08}\t_r{}\t{:08}", i % 11, (i + 1) % 40943);
    }
    dataset(root, "wn18rr", [&train, "", ""])
}

#[test]
fn params_counts() {
    let tmp = TempDir::new().unwrap();
    wn18rr_shaped(tmp.path());
    let o = run(bin().env("HYPERKGE_DATA", tmp.path()).args(["params", "--data", "wn18rr", "--dim", "100"]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "16381600\n");
    let o = run(bin().env("HYPERKGE_DATA", tmp.path()).args(["params", "--data", "wn18rr", "--preset", "quate1-wn18rr"]));
    assert_eq!(stdout(&o), "16381600\n");
    let empty = dataset(tmp.path(), "empty", ["", "", ""]);
    let o = run(bin().args(["params", "--data", empty.to_str().unwrap()]));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn preset_resolves_published_values() {
    let tmp = TempDir::new().unwrap();
    ring(tmp.path());
    let out = tmp.path().join("run");
    let o = run(bin().env("HYPERKGE_DATA", tmp.path()).args([
        "train",
        "--data",
        "ring",
        "--preset",
        "quate1-wn18rr",
        "--epochs",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let resolved = fs::read_to_string(out.join("config.txt")).unwrap();
    assert_eq!(stdout(&o), resolved);
    for line in ["dim = 100", "lambda1 = 0.1", "lambda2 = 0.1", "neg = 1", "epochs = 0", "lr = 0.1", "batches = 10"] {
        assert!(resolved.lines().any(|l| l == line), "{line}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# small run\ndim = 3\nneg = 4\nepochs = 0\n").unwrap();
    let out = tmp.path().join("run");
    let o = run(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--neg",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("dim = 3\n") && text.contains("neg = 2\n"));
}

#[test]
fn n3_switches_variant_unless_kept() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let out = tmp.path().join("run");
    let o = run(bin().args(train_args(&data, &out)).args(["--epochs", "0", "--n3", "0.01"]));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("variant = quate-raw\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let o = run(bin().args(train_args(&data, &out)).args(["--epochs", "0", "--n3", "0.01", "--keep-normalization"]));
    assert!(stdout(&o).contains("variant = quate\n"));
}

#[test]
fn reciprocal_and_octonion_runs() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    for extra in [&["--reciprocal"][..], &["--octonion"], &["--variant", "dual-rotation"]] {
        let out = tmp.path().join("run");
        let o = run(bin().args(train_args(&data, &out)).args(["--epochs", "2"]).args(extra));
        assert_eq!(code(&o), 0, "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
        let o = run(bin().args([
            "eval",
            "--checkpoint",
            out.join("model.qkge").to_str().unwrap(),
            "--data",
            data.to_str().unwrap(),
        ]));
        assert_eq!(code(&o), 0, "{extra:?}");
    }
}

#[test]
fn usage_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let data = ring(tmp.path());
    let d = data.to_str().unwrap();
    let cases: [&[&str]; 6] = [
        &["train", "--data", d, "--epoch", "3"],
        &["train", "--data", d, "--variant", "distmult", "--octonion"],
        &["train", "--data", d, "--variant", "rotate"],
        &["train", "--data", d, "--preset", "nope"],
        &["eval", "--checkpoint", "x", "--data", d, "--split", "dev"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = run(bin().args(args));
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(code(&run(bin().arg("--help"))), 0);
}

#[test]
fn missing_or_malformed_data_exit_two() {
    let tmp = TempDir::new().unwrap();
    let o = run(bin().args(["params", "--data", tmp.path().join("absent").to_str().unwrap()]));
    assert_eq!(code(&o), 2);
    let bad = dataset(tmp.path(), "bad", ["a\tr\tb\nc\td\n", "", ""]);
    let o = run(bin().args(["params", "--data", bad.to_str().unwrap()]));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("train.txt") && String::from_utf8_lossy(&o.stderr).contains('2'));
    let partial = tmp.path().join("partial");
    fs::create_dir_all(&partial).unwrap();
    fs::write(partial.join("train.txt"), "a\tr\tb\n").unwrap();
    assert_eq!(code(&run(bin().args(["params", "--data", partial.to_str().unwrap()]))), 2);
}

#[test]
fn presets_are_listed() {
    let o = run(bin().arg("presets"));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 12);
    let o = run(bin().args(["presets", "quate2-fb15k237"]));
    assert!(stdout(&o).contains("n3 = 0.05"));
}
