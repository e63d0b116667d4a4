use std::fs;
use std::path::Path;
use std::process::Command;

fn advcap(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_advcap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SIM: &str = r#"
workflow = "simulate"
seed = 21

[network]
n_r = 2
n_a = 1
routes = [{ kind = "bsc", N = 0.05, D = 0.1 }, { kind = "bec", N = 0.05, D = 0.1 }]

[simulate]
block_length = 16
trials = 200
rate = 0.25
strategy = { kind = "foreseer", policy = "greedy" }
"#;

#[test]
fn table1_prints_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = advcap(&["--workflow", "table1", "--out-dir", out, "--quiet"]);
    // no [table1] table
    assert_eq!(o.status.code(), Some(1));

    let cfg = write_config(dir.path(), "workflow = \"table1\"\n[table1]\nN = 0.1\nD = 0.1\n");
    let o = advcap(&["--config", &cfg, "--out-dir", out]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("0.3199"), "{stdout}");
    assert!(dir.path().join("table1.csv").exists());
}

#[test]
fn simulate_overrides_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SIM);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = advcap(&["--config", &cfg, "--out-dir", d.to_str().unwrap(), "--trials", "150", "--quiet"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["simulation.csv", "simulation.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let csv = fs::read_to_string(a.join("simulation.csv")).unwrap();
    // 3 placements x 2 routes
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(3) == Some("150")));

    let c = dir.path().join("c");
    advcap(&["--config", &cfg, "--out-dir", c.to_str().unwrap(), "--seed", "22", "--quiet"]);
    assert_ne!(fs::read(a.join("simulation.json")).unwrap(), fs::read(c.join("simulation.json")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    let cfg = write_config(dir.path(), &SIM.replace("seed = 21", ""));
    assert_eq!(advcap(&["--config", &cfg, "--out-dir", out, "--quiet"]).status.code(), Some(1));

    let gauss = r#"
workflow = "rates"
[network]
n_r = 1
n_a = 1
routes = [{ kind = "awgn", N = 0.1, D = 2.0, P = 1.0 }]
"#;
    let cfg = write_config(dir.path(), gauss);
    let o = advcap(&["--config", &cfg, "--out-dir", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("must exceed distortion limit"), "{}", String::from_utf8_lossy(&o.stderr));

    let impossible = "workflow = \"codegen\"\nseed = 1\n[codegen]\nq = 2\nk = 6\nn = 8\nd_target = 4\nmax_tries = 20\n";
    let cfg = write_config(dir.path(), impossible);
    assert_eq!(advcap(&["--config", &cfg, "--out-dir", out, "--quiet"]).status.code(), Some(2));
}

#[test]
fn rates_and_codegen() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let rates = r#"
workflow = "rates"
[network]
n_r = 2
n_a = 1
routes = [{ kind = "bsc", N = 0.02, D = 0.05 }, { kind = "bsc", N = 0.02, D = 0.05 }]
"#;
    let cfg = write_config(dir.path(), rates);
    let o = advcap(&["--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    for name in ["cap_memoryless_replacement", "low_foreseer_replacement", "up_foreseer_replacement"] {
        assert!(stdout.contains(name), "{stdout}");
    }
    assert!(out.join("rates.json").exists() && out.join("rates.csv").exists());

    let cg = "workflow = \"codegen\"\nseed = 3\n[codegen]\nq = 3\nk = 2\nn = 8\n";
    let cfg = write_config(dir.path(), cg);
    let o = advcap(&["--config", &cfg, "--out-dir", out.to_str().unwrap(), "--n", "9", "--quiet"]);
    assert!(o.status.success());
    let g = fs::read_to_string(out.join("generator.txt")).unwrap();
    assert!(g.starts_with("# linear code q=3 k=2 n=9"), "{g}");
}
