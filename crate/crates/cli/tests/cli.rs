use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qanneal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qanneal")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SA: &str = r#"
seed = 3
method = "sa-mc"
schedule = "inv_log:c=3"
steps = 300
n_runs = 16

[model]
family = "sk"
n = 6
"#;

#[test]
fn run_is_deterministic_and_seed_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sa.toml", SA);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for out in [&a, &b] {
        let o = qanneal(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read_to_string(a.join("sa-mc.csv")).unwrap(), fs::read_to_string(b.join("sa-mc.csv")).unwrap());
    let o = qanneal(&["run", "--config", &cfg, "--seed", "4", "--out", c.to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(fs::read_to_string(a.join("sa-mc.csv")).unwrap(), fs::read_to_string(c.join("sa-mc.csv")).unwrap());
    let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("sa-mc.json")).unwrap()).unwrap();
    assert_eq!(sidecar["master_seed"], 3);
    assert!(sidecar["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let typo = write_config(dir.path(), "typo.toml", &SA.replace("steps", "stepz"));
    assert_eq!(qanneal(&["run", "--config", &typo, "--out", out]).status.code(), Some(2));
    let big = write_config(
        dir.path(),
        "big.toml",
        "seed = 1\nmethod = \"master\"\nschedule = \"inv_log:c=3\"\nduration = 10.0\n[model]\nfamily = \"sk\"\nn = 20\n",
    );
    assert_eq!(qanneal(&["run", "--config", &big, "--out", out]).status.code(), Some(3));
    let missing = dir.path().join("nope.toml");
    assert_eq!(qanneal(&["run", "--config", missing.to_str().unwrap(), "--out", out]).status.code(), Some(4));
    assert_eq!(qanneal(&["run"]).status.code(), Some(2));
}

#[test]
fn gen_then_run_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sa.toml", SA);
    let o = qanneal(&["gen", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(dir.path().join("instance.txt").exists());
    let from_file = SA.replace("family = \"sk\"\nn = 6", "family = \"file\"\npath = \"instance.txt\"");
    let cfg2 = write_config(dir.path(), "file.toml", &from_file);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(qanneal(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(qanneal(&["run", "--config", &cfg2, "--out", b.to_str().unwrap()]).status.success());
    assert_eq!(fs::read_to_string(a.join("sa-mc.csv")).unwrap(), fs::read_to_string(b.join("sa-mc.csv")).unwrap());
}

#[test]
fn fit_and_compare_on_synthetic_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let traj = |f: &dyn Fn(f64) -> f64| {
        let mut s = String::from("t,p,label\n");
        for k in 0..=30 {
            let t = 10f64.powf(1.0 + 2.0 * k as f64 / 30.0);
            s += &format!("{t:?},{:?},P_QA\n", f(t));
        }
        s
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, traj(&|t| 1.0 - 5.0 / t)).unwrap();
    fs::write(&b, traj(&|t| 1.0 - 5.0 / (t * t))).unwrap();
    let o = qanneal(&["fit", "--input", a.to_str().unwrap(), "--window", "100,1000"]);
    assert!(o.status.success());
    let fit: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((fit["slope"].as_f64().unwrap() + 1.0).abs() < 1e-3);
    let o = qanneal(&["fit", "--input", a.to_str().unwrap(), "--window", "100,110"]);
    assert_eq!(o.status.code(), Some(2));

    let o = qanneal(&["compare", "--a", a.to_str().unwrap(), "--b", a.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(2).all(|l| l.ends_with(",0")), "{text}");
    let out = dir.path().join("cmp");
    let o = qanneal(&["compare", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(fs::read_to_string(out.join("comparison.csv")).unwrap().starts_with("# a = "));
}

#[test]
fn quench_writes_four_processes() {
    let dir = tempfile::tempdir().unwrap();
    let body = "seed = 2\nschedule = \"inv_sqrt:c=1\"\nsteps = 50\nreplicas = 4\n[model]\nfamily = \"ea2d\"\nside = 3\nperiodic = true\n[quench]\nsa_runs = 4\nqa_runs = 2\n";
    let cfg = write_config(dir.path(), "q.toml", body);
    let o = qanneal(&["quench", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("quench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn single_spin_table() {
    let o = qanneal(&["single-spin", "--schedule", "inv", "--h", "1", "--c", "0.5,2", "--ht-end", "1000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("h,c,schedule"));
    assert_eq!(qanneal(&["single-spin", "--schedule", "cosine", "--h", "1", "--c", "1"]).status.code(), Some(2));
}
