use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_matcop"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(name)
}

#[test]
fn prove_then_check() {
    let dir = std::env::temp_dir().join(format!("matcop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let proof = dir.join("fig2.proof");
    for mode in ["tableau", "matrix", "core", "avatar"] {
        let out = bin()
            .args(["prove", "--mode", mode, "--stats", "--proof-out"])
            .arg(&proof)
            .arg(corpus("fig2.p"))
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{mode}");
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("% SZS status Unsatisfiable for fig2"), "{text}");
        assert!(text.contains("% selectors "), "{text}");

        let out = bin().arg("check").arg(&proof).arg(corpus("fig2.p")).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{mode}");
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "accept");
    }
    // the same document does not prove a different problem
    let out = bin().arg("check").arg(&proof).arg(corpus("chain2.p")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes() {
    let out = bin().arg("prove").arg(corpus("lonely.sat.p")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Satisfiable"));

    let out = bin()
        .args(["prove", "--mode", "matrix", "--max-depth", "2"])
        .arg(corpus("lonely.sat.p"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().arg("prove").arg(corpus("no_such_file.p")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_and_generator() {
    let out = bin()
        .args(["oracle", "--d-max", "3"])
        .arg(corpus("fig2.p"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("theorem with 3 copies"));

    let a = bin().args(["gen", "--seed", "5"]).output().unwrap().stdout;
    let b = bin()
        .args(["gen", "--seed", "5", "--profile", "epr"])
        .output()
        .unwrap()
        .stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}
