//! The command-line binary: exit codes, sidecars and reproducible CSVs.

mod support;

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_linkveil");
use support::small_runs;

fn run(out: &Path, args: &[String]) -> std::process::Output {
    Command::new(BIN).arg("--out-dir").arg(out).args(args).output().unwrap()
}

fn gen_graph(dir: &Path) -> std::path::PathBuf {
    let st = Command::new(BIN).args(["--out-dir", dir.to_str().unwrap(), "gen", "--n", "120", "--attach", "3"]).output().unwrap();
    assert!(st.status.success());
    dir.join("ba_n120_a3_s1.el")
}

#[test]
fn every_subcommand_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_graph(dir.path());
    for (file, args) in small_runs(&g) {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for out in [&a, &b] {
            let o = run(out, &args);
            assert!(o.status.success(), "{file}: {}", String::from_utf8_lossy(&o.stderr));
        }
        let body_a = std::fs::read(a.join(file)).unwrap();
        assert_eq!(body_a, std::fs::read(b.join(file)).unwrap(), "{file}");
        let side: serde_json::Value =
            serde_json::from_slice(&std::fs::read(a.join(file).with_extension("json")).unwrap()).unwrap();
        assert_eq!(side["run_config"]["seed"], 1, "{file}");
        assert!(side["run_config"]["command"]["subcommand"].is_string());
    }
}

#[test]
fn perturb_writes_edge_list_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_graph(dir.path());
    let o = run(dir.path(), &["perturb".into(), "--in".into(), g.to_str().unwrap().into(), "--t".into(), "5".into(), "--M".into(), "10".into()]);
    assert!(o.status.success());
    let el = dir.path().join("ba_n120_a3_s1_t5.el");
    let text = std::fs::read_to_string(&el).unwrap();
    let side: serde_json::Value = serde_json::from_slice(&std::fs::read(el.with_extension("json")).unwrap()).unwrap();
    let s = &side["summary"];
    assert_eq!(s["t"], 5);
    assert_eq!(s["M"], 10);
    assert_eq!(s["seed"], 1);
    assert!(s["skipped_slots"].is_u64());
    assert_eq!(s["m_prime"].as_u64().unwrap() as usize, text.lines().count());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = |args: &[&str]| Command::new(BIN).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["--out-dir", out, "gen", "--n", "20"]), 0);
    assert_eq!(code(&["--out-dir", out, "si", "--in", "/does/not/exist.el"]), 1);
    assert_eq!(code(&["--out-dir", out, "si", "--no-such-flag"]), 1);
    assert_eq!(code(&["--out-dir", out, "gen", "--n", "3", "--attach", "5"]), 1);
    std::fs::write(dir.path().join("bad.el"), "1 2\n3\n").unwrap();
    assert_eq!(code(&["--out-dir", out, "slem", "--in", dir.path().join("bad.el").to_str().unwrap()]), 1);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_graph(dir.path());
    let args = ["si", "--in", g.to_str().unwrap(), "--links", "30"];
    for threads in ["1", "3"] {
        let st = Command::new(BIN)
            .env("LINKVEIL_THREADS", threads)
            .args(["--out-dir", dir.path().join(threads).to_str().unwrap()])
            .args(args)
            .output()
            .unwrap();
        assert!(st.status.success());
    }
    assert_eq!(
        std::fs::read(dir.path().join("1/fig13_si.csv")).unwrap(),
        std::fs::read(dir.path().join("3/fig13_si.csv")).unwrap()
    );
}
