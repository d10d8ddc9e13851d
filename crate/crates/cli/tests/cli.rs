use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gzlab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gzlab"))
        .args(args)
        .env("GZLAB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gn_prints_ratio_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = gzlab(&["gn", "--n", "6"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,G,singular_series,ratio,in_window"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let g: f64 = row[1].parse().unwrap();
    assert!((g - 1.206949).abs() < 1e-6);
}

#[test]
fn zeros_served_from_cache_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["zeros", "--q", "4", "--chi", "1", "--T", "50"];
    let first = gzlab(&args, dir.path());
    assert!(first.status.success());
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = gzlab(&args, dir.path());
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).starts_with("q,chi,beta,gamma\n4,\"q:4,idx:1\",0.5,6.0209"));
}

#[test]
fn corrupt_cache_is_regenerated_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["zeros", "--q", "5", "--chi", "2", "--T", "20"];
    let good = gzlab(&args, dir.path());
    let path = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    fs::write(&path, "q,chi,beta,gamma\n5,garbage\n").unwrap();
    let again = gzlab(&args, dir.path());
    assert!(again.status.success());
    assert!(String::from_utf8_lossy(&again.stderr).contains("warning"));
    assert_eq!(good.stdout, again.stdout);
    assert_eq!(fs::read(&path).unwrap(), good.stdout);
}

#[test]
fn cache_key_separates_heights_and_characters() {
    let dir = tempfile::tempdir().unwrap();
    gzlab(&["zeros", "--q", "5", "--chi", "1", "--T", "10"], dir.path());
    gzlab(&["zeros", "--q", "5", "--chi", "1", "--T", "12"], dir.path());
    gzlab(&["zeros", "--q", "5", "--chi", "3", "--T", "10"], dir.path());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn env_overrides_cache_dir_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag = flag_dir.path().to_str().unwrap();
    gzlab(&["zeros", "--q", "3", "--chi", "1", "--T", "10", "--cache-dir", flag], env_dir.path());
    assert_eq!(fs::read_dir(env_dir.path()).unwrap().count(), 1);
    assert_eq!(fs::read_dir(flag_dir.path()).unwrap().count(), 0);
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = gzlab(&["compare", "--q", "3", "--N", "10000", "--delta", "0.5"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["in_window"], true);
    for key in ["q", "N", "S_direct", "S0", "S1", "S_inf", "chi1", "chi1_parity", "epsilon_obs", "decomposition_defect"] {
        assert!(v["series"].get(key).is_some(), "{key}");
    }
    for key in ["q", "N", "model_sum", "main_term", "rel_err", "lemma_ratio"] {
        assert!(v["model"].get(key).is_some(), "{key}");
    }
    // a window narrower than the observed deviation
    let tight = gzlab(&["compare", "--q", "30", "--N", "100", "--delta", "0.9"], dir.path());
    assert_eq!(tight.status.code(), Some(2));
    let bad = gzlab(&["compare", "--q", "3"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let unknown = gzlab(&["compare", "--q", "3", "--N", "100", "--bogus"], dir.path());
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn json_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let model = gzlab(&["model", "--q", "5", "--N", "1000"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&model.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["q", "N", "model_sum", "main_term", "rel_err", "lemma_ratio"]);
    let comp = gzlab(&["components", "--q", "8", "--N", "1000"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&comp.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        ["q", "N", "S_direct", "S0", "S1", "S_inf", "chi1", "chi1_parity", "epsilon_obs", "decomposition_defect"]
    );
    assert_eq!(v["chi1"], "q:8,idx:0,1");
}

#[test]
fn pchi_lists_every_character() {
    let dir = tempfile::tempdir().unwrap();
    let o = gzlab(&["pchi", "--q", "5", "--N", "100"], dir.path());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("chi,re,im,abs\n\"q:5,idx:0\""));
    let one = gzlab(&["pchi", "--q", "5", "--N", "100", "--chi", "q:5,idx:2"], dir.path());
    assert_eq!(stdout(&one).lines().nth(1), text.lines().nth(3));
    let wrong = gzlab(&["pchi", "--q", "5", "--N", "100", "--chi", "q:7,idx:2"], dir.path());
    assert_eq!(wrong.status.code(), Some(1));
}

#[test]
fn scan_and_sieve() {
    let dir = tempfile::tempdir().unwrap();
    let o = gzlab(&["scan", "--from", "1000", "--to", "1100", "--delta", "0.5"], dir.path());
    assert_eq!(stdout(&o).lines().count(), 52);
    let s = gzlab(&["sieve", "--limit", "100", "--out", "csv"], dir.path());
    assert_eq!(stdout(&s), "limit,primes,psi\n100,25,94.0453112294\n");
    let odd = gzlab(&["scan", "--from", "1001", "--to", "1100"], dir.path());
    assert_eq!(odd.status.code(), Some(1));
}

#[test]
fn explicit_residual_reports_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = gzlab(&["explicit", "--q", "3", "--chi", "1", "--N", "1000", "--T", "30"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["within_bound"], true);
    let principal = gzlab(&["explicit", "--q", "3", "--chi", "0", "--N", "1000", "--T", "30"], dir.path());
    assert_eq!(principal.status.code(), Some(1));
}
