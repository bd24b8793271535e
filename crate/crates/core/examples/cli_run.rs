//! Drives the command-line front end in-process and reads back an artifact.

fn main() {
    let dir = std::env::temp_dir().join("linkveil_cli_example");
    let out = dir.to_str().unwrap();
    let code = linkveil::cli::run(["linkveil", "--out-dir", out, "--seed", "3", "si", "--n", "300", "--links", "10"]);
    println!("exit code {code}");
    let csv = std::fs::read_to_string(dir.join("fig13_si.csv")).unwrap();
    println!("{}", csv.lines().take(6).collect::<Vec<_>>().join("\n"));
}
