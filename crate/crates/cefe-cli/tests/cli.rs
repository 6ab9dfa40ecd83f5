//! Black-box tests of the binary: exit codes, transcripts, file flows, and
//! the attack report format.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cefe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cefe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cefe-cli-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn demo_fe1_transcript_ends_ok() {
    let out = cefe(&["demo", "fe1", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.trim_end().ends_with("dec = f(m): OK"),
        "transcript was: {text}"
    );
}

#[test]
fn demos_all_schemes_exit_zero() {
    for scheme in ["ske", "pke", "css", "rnce", "garble", "fead", "feq"] {
        let out = cefe(&["demo", scheme, "--seed", "3"]);
        assert_eq!(out.status.code(), Some(0), "demo {scheme} failed: {}", stdout(&out));
    }
}

#[test]
fn vrfy_on_truncated_envelope_exits_2() {
    let dir = tmpdir("trunc");
    let key = dir.join("key.env");
    let ct = dir.join("ct.env");
    let vk = dir.join("vk.env");
    let cert = dir.join("cert.env");
    assert_eq!(
        cefe(&["ske", "keygen", "--out", key.to_str().unwrap(), "--seed", "1"]).status.code(),
        Some(0)
    );
    assert_eq!(
        cefe(&[
            "ske", "enc", "--key", key.to_str().unwrap(), "--message", "1010",
            "--ct", ct.to_str().unwrap(), "--vk", vk.to_str().unwrap(), "--seed", "2",
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        cefe(&[
            "ske", "del", "--ct", ct.to_str().unwrap(), "--cert", cert.to_str().unwrap(),
            "--seed", "3",
        ])
        .status
        .code(),
        Some(0)
    );
    // Truncate the certificate envelope.
    let bytes = std::fs::read(&cert).unwrap();
    std::fs::write(&cert, &bytes[..bytes.len() - 5]).unwrap();
    let out = cefe(&[
        "ske", "vrfy", "--vk", vk.to_str().unwrap(), "--cert", cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enc_dec_roundtrip_reproduces_plaintext() {
    let dir = tmpdir("roundtrip");
    let key = dir.join("key.env");
    let ct = dir.join("ct.env");
    let vk = dir.join("vk.env");
    let message = "110100101101";
    cefe(&["ske", "keygen", "--out", key.to_str().unwrap(), "--seed", "4"]);
    cefe(&[
        "ske", "enc", "--key", key.to_str().unwrap(), "--message", message,
        "--ct", ct.to_str().unwrap(), "--vk", vk.to_str().unwrap(), "--seed", "5",
    ]);
    let out = cefe(&[
        "ske", "dec", "--key", key.to_str().unwrap(), "--ct", ct.to_str().unwrap(),
        "--seed", "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), message);
}

#[test]
fn wrong_key_decryption_exits_3() {
    let dir = tmpdir("wrongkey");
    let key = dir.join("key.env");
    let other = dir.join("other.env");
    let ct = dir.join("ct.env");
    let vk = dir.join("vk.env");
    cefe(&["ske", "keygen", "--out", key.to_str().unwrap(), "--seed", "7"]);
    cefe(&["ske", "keygen", "--out", other.to_str().unwrap(), "--seed", "8"]);
    cefe(&[
        "ske", "enc", "--key", key.to_str().unwrap(), "--message", "0101",
        "--ct", ct.to_str().unwrap(), "--vk", vk.to_str().unwrap(), "--seed", "9",
    ]);
    let out = cefe(&[
        "ske", "dec", "--key", other.to_str().unwrap(), "--ct", ct.to_str().unwrap(),
        "--seed", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn attack_report_and_csv_format() {
    let dir = tmpdir("attack");
    let csv = dir.join("report.csv");
    let out = cefe(&[
        "attack", "cesk-qrom", "--strategy", "measure-all", "--trials", "4000",
        "--seed", "11", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("rate:"));
    assert!(text.contains("ci95:"));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = csv_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "strategy,trials,passes,rate,ci_low,ci_high"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "measure-all");
    assert_eq!(row[1], "4000");
    let rate: f64 = row[3].parse().unwrap();
    assert!(rate < 0.05, "measure-all pass rate should be tiny, got {rate}");
}

#[test]
fn unknown_strategy_and_scheme_are_usage_errors() {
    assert_eq!(
        cefe(&["attack", "cesk-qrom", "--strategy", "guess", "--trials", "10"]).status.code(),
        Some(1)
    );
    assert_eq!(cefe(&["attack", "nope"]).status.code(), Some(1));
    assert_eq!(cefe(&["bogus"]).status.code(), Some(1));
}

#[test]
fn params_check_exit_codes() {
    assert_eq!(
        cefe(&["params", "check", "--css", "128,128,32,65,64"]).status.code(),
        Some(0)
    );
    assert_eq!(
        cefe(&["params", "check", "--css", "7,7,1,4,3"]).status.code(),
        Some(4)
    );
    assert_eq!(
        cefe(&["params", "check", "--css", "7,7,1,4,3", "--force"]).status.code(),
        Some(0)
    );
    assert_eq!(cefe(&["params", "check"]).status.code(), Some(1));
    // Invalid feq parameter files are parameter rejections.
    let dir = tmpdir("params");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "q=1\nt=9\nn=4\n").unwrap();
    assert_eq!(
        cefe(&["params", "check", "--feq", bad.to_str().unwrap()]).status.code(),
        Some(4)
    );
}

#[test]
fn selftest_passes() {
    let out = cefe(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all checks passed"));
}

#[test]
fn css_flow_with_code_files() {
    // Load a CSS pair from plain-text matrix files: the [15,11] Hamming
    // code and its dual, written out from the library's own constructors.
    let dir = tmpdir("codes");
    let pair = cefe::gf2::hamming15_pair();
    let write_code = |path: &std::path::Path, code: &cefe::gf2::LinearCode| {
        let mut text = format!("{} {}\n", code.length(), code.dimension());
        for i in 0..code.dimension() {
            text.push_str(&format!("{}\n", code.generator().row(i)));
        }
        std::fs::write(path, text).unwrap();
    };
    let c1 = dir.join("c1.txt");
    let c2 = dir.join("c2.txt");
    write_code(&c1, pair.c1());
    write_code(&c2, pair.c2());
    let key = dir.join("key.env");
    let ct = dir.join("ct.env");
    let vk = dir.join("vk.env");
    cefe(&["ske", "keygen", "--out", key.to_str().unwrap(), "--seed", "20"]);
    let message = "1010011"; // one seven-bit block
    let out = cefe(&[
        "ske", "enc", "--key", key.to_str().unwrap(), "--message", message,
        "--variant", "css", "--c1", c1.to_str().unwrap(), "--c2", c2.to_str().unwrap(),
        "--t", "1", "--p", "15",
        "--ct", ct.to_str().unwrap(), "--vk", vk.to_str().unwrap(), "--seed", "21",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cefe(&[
        "ske", "dec", "--key", key.to_str().unwrap(), "--ct", ct.to_str().unwrap(),
        "--seed", "22",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), message);
}

#[test]
fn seeded_runs_are_reproducible() {
    let dir = tmpdir("seeded");
    let key = dir.join("key.env");
    cefe(&["ske", "keygen", "--out", key.to_str().unwrap(), "--seed", "42"]);
    let first = std::fs::read(&key).unwrap();
    cefe(&["ske", "keygen", "--out", key.to_str().unwrap(), "--seed", "42"]);
    assert_eq!(std::fs::read(&key).unwrap(), first);
}
