//! Compiles a C program against the generated header and, when the static
//! library is present, links and runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn compiler() -> Option<&'static str> {
    ["cc", "clang", "gcc"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

/// `target/<profile>/libranklab_ffi.a`, found relative to this test binary.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libranklab_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_compiles_and_links() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let include = manifest().join("include");
    let source = manifest().join("tests/c/smoke.c");
    let status = Command::new(cc)
        .args(["-std=c11", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&source)
        .status()
        .unwrap();
    assert!(status.success(), "header does not compile");

    let Some(lib) = static_lib() else {
        eprintln!("static library not built; link step skipped");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let out = Command::new(cc)
        .args(["-std=c11", "-I"])
        .arg(&include)
        .arg(&source)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "link failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    run(&exe);
}

fn run(exe: &Path) {
    let out = Command::new(exe).output().unwrap();
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
