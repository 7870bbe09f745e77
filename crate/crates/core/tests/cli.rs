use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ecrt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecrt"))
        .args(args)
        .output()
        .expect("spawn ecrt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn table1_default() {
    let o = ecrt(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "b,rho,R_C,R_SOSI,R_ECRT");
    assert_eq!(lines[1], "3,5,6,28,7");
    assert_eq!(lines[6], "6,10,10,84,11");
    assert!(stderr(&o).starts_with("config: fnyq=1"));
}

#[test]
fn table1_scaled_and_custom_rows() {
    let o = ecrt(&["table1", "--fnyq", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "3,5,12,56,14"));

    let o = ecrt(&["table1", "--rows", "4:6"]);
    assert_eq!(stdout(&o), "b,rho,R_C,R_SOSI,R_ECRT\n4,6,7,40,8\n");
}

#[test]
fn table1_bad_rows_is_usage_error() {
    let o = ecrt(&["table1", "--rows", "4:0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error:"));
}

#[test]
fn encode_decode_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g.txt");
    let stream = dir.path().join("g.ecrt");
    let decoded = dir.path().join("g_hat.txt");
    fs::write(&input, "1000\n-1750.5 0\n2249.9\n-2250\n").unwrap();

    let o = ecrt(&["encode", "--input", p(&input), "--b", "14", "--out", p(&stream)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("bits_per_sample=19"));
    assert_eq!(fs::metadata(&stream).unwrap().len(), 36 + (5 * 19u64).div_ceil(8));

    let o = ecrt(&["decode", "--input", p(&stream), "--out", p(&decoded), "--truth", p(&input)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g_hat: Vec<f64> = fs::read_to_string(&decoded)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let g = [1000.0, -1750.5, 0.0, 2249.9, -2250.0];
    assert_eq!(g_hat.len(), g.len());
    for (a, b) in g.iter().zip(&g_hat) {
        assert!((a - b).abs() <= 281.25 / 2f64.powi(15), "{a} vs {b}");
    }
    assert!(stdout(&o).contains("mae="));
}

#[test]
fn rcrt_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g.txt");
    let stream = dir.path().join("g.bin");
    let decoded = dir.path().join("out.txt");
    fs::write(&input, "1000\n-37.5\n").unwrap();
    let o = ecrt(&["encode", "--input", p(&input), "--scheme", "rcrt", "--b", "10", "--out", p(&stream)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("bits_per_sample=20"));
    let o = ecrt(&["decode", "--input", p(&stream), "--out", p(&decoded)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("scheme=rcrt"));
}

#[test]
fn empty_input_round_trips() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("empty.txt");
    let stream = dir.path().join("empty.ecrt");
    let decoded = dir.path().join("empty_out.txt");
    fs::write(&input, "").unwrap();
    let o = ecrt(&["encode", "--input", p(&input), "--out", p(&stream)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::metadata(&stream).unwrap().len(), 36);
    let o = ecrt(&["decode", "--input", p(&stream), "--out", p(&decoded)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("count=0"));
    assert_eq!(fs::read_to_string(&decoded).unwrap(), "");
}

#[test]
fn out_of_range_amplitude_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("big.txt");
    fs::write(&input, "0\n22001\n").unwrap();
    let o = ecrt(&["encode", "--input", p(&input), "--out", p(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("22001"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad_text = dir.path().join("bad.txt");
    fs::write(&bad_text, "1.0\nabc\n").unwrap();
    let o = ecrt(&["encode", "--input", p(&bad_text), "--out", p(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));

    let bad_stream = dir.path().join("bad.ecrt");
    fs::write(&bad_stream, b"NOPE....").unwrap();
    let o = ecrt(&["decode", "--input", p(&bad_stream), "--out", p(&dir.path().join("y"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("sys.ini");
    fs::write(&cfg, "tau1 = 15\nbogus = 1\n").unwrap();
    let o = ecrt(&["sweep", "--config", p(&cfg), "--bmin", "14", "--bmax", "14", "--trials", "1", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("sys.ini");
    fs::write(&cfg, "# system\nb = 3\nsample-period = 1\n").unwrap();
    let input = dir.path().join("g.txt");
    fs::write(&input, "10\n").unwrap();
    let stream = dir.path().join("s");
    let o = ecrt(&["encode", "--config", p(&cfg), "--b", "6", "--input", p(&input), "--out", p(&stream)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("bits_per_sample=11"));
}

#[test]
fn verify_suites() {
    let o = ecrt(&["verify", "--suite", "corollary"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[PASS]"));

    let o = ecrt(&["verify", "--suite", "crt-oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = ecrt(&["verify", "--suite", "bounds", "--seeds", "1", "--samples", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = ecrt(&["verify", "--suite", "bounds", "--noise-es", "9.375", "--seeds", "1", "--samples", "500"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));

    let o = ecrt(&["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep", "--bmin", "12", "--bmax", "14", "--trials", "2", "--samples", "2000"];
    let a = ecrt(&args);
    let b = ecrt(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let csv = stdout(&a);
    assert!(csv.starts_with("scheme,bits_per_sample,bitrate_bps,mae,bound,seed\n"));
    assert!(csv.lines().any(|l| l.starts_with("ecrt,19,19,")));
}

#[test]
fn sweep_noise_beyond_tolerance_warns() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = ecrt(&[
        "sweep", "--bmin", "14", "--bmax", "14", "--trials", "1", "--samples", "500", "--noise-es", "5", "--out", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning:"));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.lines().filter(|l| l.starts_with("ecrt,")).all(|l| l.contains("NaN")));
}
