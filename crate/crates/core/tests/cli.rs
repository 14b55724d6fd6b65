use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fraclap"))
}


fn run(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn ground_state_output_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let (a, b) = (d.join("a"), d.join("b"));
    for out in [&a, &b] {
        assert_eq!(run(&["ground-state", "--s", "0.4", "--nodes", "129", "--out", out.to_str().unwrap()]), 0);
    }
    for f in ["ground_state.json", "ground_state.dat", "mesh.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let sol = a.join("ground_state.json");
    let o = bin().args(["symmetry", "--solution", sol.to_str().unwrap()]).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("symmetric"));
}

#[test]
fn eigen_writes_report_and_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(run(&["eigen", "--s", "0.5", "--nodes", "65", "--k", "2", "--out", d.to_str().unwrap()]), 0);
    for f in ["eigen.json", "phi_1.json", "phi_2.dat"] {
        assert!(d.join(f).exists(), "{f}");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = d.to_str().unwrap();
    assert_eq!(run(&["ground-state", "--s", "1.2", "--out", out]), 2);
    assert_eq!(run(&["nodal", "--s", "0.5", "--p", "1.5", "--out", out]), 2);
    assert_eq!(run(&["solve-linear", "--s", "0.5", "--potential", "cubic:1", "--out", out]), 2);
    assert_eq!(run(&["symmetry", "--solution", d.join("missing.json").to_str().unwrap()]), 2);
    assert_eq!(run(&["nodal", "--s", "0.3", "--nodes", "65", "--max-iter", "2", "--out", out]), 3);
    assert_eq!(run(&["ground-state", "--s", "0.5", "--bogus"]), 2);
}
