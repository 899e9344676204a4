use std::path::Path;
use std::process::{Command, Output};

fn svqi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svqi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &[&str] = &["--points", "fibonacci", "--sizes", "150,300", "--orders", "2", "--eval-grid", "200"];

#[test]
fn convergence_writes_self_describing_csv() {
    let o = svqi(&[&["convergence"], SMALL].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for key in ["#kernel=", "#rho=", "#h_mode=", "#points=", "#field="] {
        assert!(text.contains(key), "missing {key}");
    }
    assert!(text.contains("field,family,order,n,source,h,rho,err_combined"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert_eq!(text, stdout(&svqi(&[&["convergence"], SMALL].concat())));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[kernel]\nfamily = we32\norders = 6\n[points]\npoints = fibonacci\nsizes = 100\n").unwrap();
    let o = svqi(&["convergence", "--config", cfg.to_str().unwrap(), "--orders", "8", "--print-config"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("family=we32"));
    assert!(text.contains("orders=8\n"));
    assert!(text.contains("sizes=100\n"));
}

#[test]
fn config_errors_exit_with_2() {
    assert_eq!(svqi(&["convergence", "--family", "cauchy"]).status.code(), Some(2));
    assert_eq!(svqi(&["noise", "--realizations", "0"]).status.code(), Some(2));
    assert_eq!(svqi(&["kernel-info", "--family", "poisson", "--order", "4", "--rho", "0.5"]).status.code(), Some(2));
    assert_eq!(svqi(&["convergence", "--no-such-flag"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = svqi(&["convergence", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.cfg: unknown key 'colour'"));
}

#[test]
fn data_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = svqi(&["convergence", "--points", "std", "--points-dir", dir.path().to_str().unwrap(), "--sizes", "1434"]);
    assert_eq!(o.status.code(), Some(3));
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x1,x2,x3,f1,f2,f3\n1,0,0,0,1,zero\n").unwrap();
    assert_eq!(svqi(&["decompose", "--input", bad.to_str().unwrap()]).status.code(), Some(3));
    let missing = dir.path().join("none.csv");
    assert_eq!(svqi(&["decompose", "--input", missing.to_str().unwrap()]).status.code(), Some(3));
}

fn write_samples(path: &Path, zero: bool) {
    let mut text = String::from("x1,x2,x3,f1,f2,f3\n");
    let n = 200;
    for i in 0..n {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = 2.399963229728653 * i as f64;
        let (x, y) = (r * phi.cos(), r * phi.sin());
        // rotation field e3 × x
        let f = if zero { [0.0; 3] } else { [-y, x, 0.0] };
        text += &format!("{x},{y},{z},{},{},{}\n", f[0], f[1], f[2]);
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn decompose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let out = dir.path().join("out.csv");
    write_samples(&input, false);
    let o = svqi(&["decompose", "-i", input.to_str().unwrap(), "-o", out.to_str().unwrap(), "--eval-grid", "30", "--rho", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("#kernel=") && text.contains("#rho=") && text.contains("#N=200"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "y1,y2,y3,div1,div2,div3,curl1,curl2,curl3,comb1,comb2,comb3");
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 30);
    for r in rows {
        // a rotation is divergence-free: the curl-free part is small, combined = div + curl
        for i in 0..3 {
            assert!((r[9 + i] - r[3 + i] - r[6 + i]).abs() < 1e-12);
        }
        assert!(r[6..9].iter().all(|v| v.abs() < 0.05), "{r:?}");
    }
}

#[test]
fn decompose_zero_input_gives_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("zero.csv");
    write_samples(&input, true);
    let o = svqi(&["decompose", "-i", input.to_str().unwrap(), "--eval-grid", "10"]);
    assert!(o.status.success());
    for line in stdout(&o).lines().filter(|l| !l.starts_with('#')).skip(1) {
        assert!(line.split(',').skip(3).all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
}

#[test]
fn kernel_info_and_points() {
    let o = svqi(&["kernel-info", "--rho", "0.5", "--degree", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("ell,coeff\n0,1e0\n") || text.contains("ell,coeff\n0,"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 7);

    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("ss009.00050");
    let o = svqi(&["points", "--kind", "random", "-n", "50", "--save", saved.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("#h_measured="));
    let o = svqi(&["points", "--kind", "std", "-n", "50", "--points-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("#N=50"));
    assert!(stdout(&svqi(&["points", "--fetch-note"])).contains("ss053.01434"));
}
