//! Compiles and runs a C program against the generated header and static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "cantor.h"

int main(void) {
    CantorPair *pair = NULL;
    if (cantor_pair_new("3", "3", "1", "3", "3", "1", &pair) != CANTOR_STATUS_OK) return 1;
    bool holds = false;
    if (cantor_pair_lemma1(pair, &holds) != CANTOR_STATUS_OK || !holds) return 2;
    char *json = NULL;
    if (cantor_certify_point(pair, "1", "2", 0, &json) != CANTOR_STATUS_OK) return 3;
    if (strstr(json, "\"verdict\": \"no\"") == NULL && strstr(json, "\"verdict\":\"no\"") == NULL) return 4;
    cantor_string_free(json);
    cantor_pair_free(pair);
    if (cantor_pair_new("2", "2", "1", "3", "3", "1", &pair) != CANTOR_STATUS_INVALID_ARGUMENT) return 5;
    if (cantor_last_error_message() == NULL) return 6;
    puts("ok");
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests/<name>-<hash> lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().map(|_| cc)
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib = target_dir().join("libcantor_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "C program exited with {:?}",
        out.status.code()
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
