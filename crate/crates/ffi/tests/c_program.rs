//! Compiles a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "qdverify.h"

int main(void) {
    QdVerdict v;
    if (qd_teleport_check(0.82, 0.82, &v) != QD_STATUS_OK) return 10;
    if (v.is_quantum_domain || fabs(v.rhs - 0.9330127) > 1e-6) return 11;

    double b = 0.0;
    if (qd_total_nonorthogonality(2.0, 0.1, &b) != QD_STATUS_INVALID_INPUT) return 12;
    if (strlen(qd_last_error_message()) == 0) return 13;

    QdStorageReport *h = NULL;
    if (qd_storage_analyze("Appel", -1.86, 5.38, -0.21, 1.32, 128, QD_STORAGE_MODE_AS_PUBLISHED, &h) != QD_STATUS_OK) {
        fprintf(stderr, "%s\n", qd_last_error_message());
        return 14;
    }
    QdStorageSummary s;
    if (qd_storage_report_summary(h, &s) != QD_STATUS_OK) return 15;
    printf("%s %.5f %.5f\n", qd_storage_report_label(h), s.lhs, s.rhs_min);
    qd_storage_report_free(h);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libqdverify_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("Appel 0.80010 0.9832"), "{text}");
}
