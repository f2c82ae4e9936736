use std::path::PathBuf;
use std::process::{Command, Output};

fn partlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("partlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exact_p_at_four() {
    let o = partlab(&["exact", "--p", "--n", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "n,pi_n,graphical_count,p_exact\n4,5,2,2/5\n");
}

#[test]
fn exact_r_small_values() {
    let o = partlab(&["exact", "--r", "--n", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1), Some("3,6,2/3"));
}

#[test]
fn exponents_json_carries_the_decay_exponent() {
    let o = partlab(&["exponents", "solve", "--output", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("0.003297210314"), "{text}");
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let row = &doc["results"][0];
    assert!((row["rho_star"].as_f64().unwrap() - 1528.691213).abs() < 1e-3);
    assert!((row["beta"].as_f64().unwrap() - 0.01363853235).abs() < 1e-9);
    assert!((row["delta"].as_f64().unwrap() - 0.006594420627).abs() < 1e-8);
    assert!((row["gamma"].as_f64().unwrap() - 0.2483513948).abs() < 1e-8);
    assert_eq!(doc["manifest"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn beta_override_leaves_rho_star_null() {
    let o = partlab(&["exponents", "solve", "--beta-override", "0.02", "--output", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["results"][0]["rho_star"].is_null());
    let delta = doc["results"][0]["delta"].as_f64().unwrap();
    assert!((delta - 0.02 / 2.1).abs() < 1e-15);
}

#[test]
fn estimate_p_is_deterministic() {
    let a = scratch("a.csv");
    let b = scratch("b.csv");
    for path in [&a, &b] {
        let o = partlab(&[
            "estimate-p", "--n", "40", "--trials", "100000", "--seed", "7", "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().starts_with("statistic,n,method,trials,hits,"));
    let mut side = a.into_os_string();
    side.push(".manifest.json");
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(side).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["trials"], "100000");
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_partlab"))
            .args(["surrogate", "--event", "eg", "--n", "10000", "--gamma", "0.24", "--trials", "2000", "--seed", "5"])
            .env("PARTLAB_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn randomized_commands_require_a_seed() {
    let o = partlab(&["gp", "persist", "--N", "100", "--alpha", "0", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: missing-parameter:"), "{err}");
}

#[test]
fn invalid_parameters_fail_with_one_line() {
    for args in [
        &["gp", "persist", "--N", "100", "--alpha", "0.5", "--trials", "10", "--seed", "1"][..],
        &["exact", "--r", "--n", "31"][..],
        &["surrogate", "--event", "eg", "--n", "100", "--gamma", "0.3", "--trials", "10", "--seed", "1"][..],
        &["sample", "--n", "10", "--trials", "3", "--seed", "1", "--method", "magic"][..],
        &["exact", "--n", "4"][..],
        &["gp", "cov", "--m", "0", "--n", "3"][..],
    ] {
        let o = partlab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let cfg = scratch("run.conf");
    std::fs::write(&cfg, "# cov sweep\nm = 1\nn = 2\noutput = json\n").unwrap();
    let o = partlab(&["gp", "cov", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["results"][0]["cov"], 1.5);
    let o = partlab(&["gp", "cov", "--config", cfg.to_str().unwrap(), "--m", "2", "--output", "csv"]);
    assert_eq!(stdout(&o), "m,n,cov\n2,2,2.5\n");
}

#[test]
fn sample_dump_holds_partitions_of_n() {
    let dump = scratch("dump.txt");
    let o = partlab(&[
        "sample", "--n", "25", "--trials", "50", "--seed", "3", "--method", "fristedt", "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        let total: u64 = line.split(',').map(|x| x.parse::<u64>().unwrap()).sum();
        assert_eq!(total, 25);
    }
    assert_eq!(stdout(&o).lines().count(), 51);
}

#[test]
fn selfcheck_subset_passes() {
    let o = partlab(&["selfcheck", "--only", "1,3,5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().skip(1).all(|l| l.contains(",pass,")), "{out}");
    assert_eq!(stderr(&o).lines().filter(|l| l.starts_with("criterion")).count(), 3);
}
