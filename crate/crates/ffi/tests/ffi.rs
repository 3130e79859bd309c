use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dfrelay_ffi::*;

fn fig2(snr_db: f64) -> *mut DfrelayConfig {
    let mut c = ptr::null_mut();
    let s = unsafe { dfrelay_config_new(4, 5.0, snr_db, 1.0, 1.0, -3.0, 0.0, 0.0, &mut c) };
    assert_eq!(s, DfrelayStatus::Ok);
    assert!(!c.is_null());
    c
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dfrelay_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn analytic_matches_library() {
    let c = fig2(12.0);
    let mut v = 0.0;
    assert_eq!(unsafe { dfrelay_p_e2e(c, &mut v) }, DfrelayStatus::Ok);
    let config = dfrelay::SystemConfig::from_db(4, 5.0, 12.0, (1.0, 1.0), -3.0, 0.0, 0.0).unwrap();
    assert_eq!(v, dfrelay::analytic::p_e2e(&config).unwrap().value);
    assert_eq!(last_error(), "");
    unsafe { dfrelay_config_free(c) };
}

#[test]
fn setters_update_the_handle() {
    let c = fig2(0.0);
    let (mut before, mut after) = (0.0, 0.0);
    unsafe {
        dfrelay_p_e2e(c, &mut before);
        assert_eq!(dfrelay_config_set_total_snr_db(c, 12.0), DfrelayStatus::Ok);
        assert_eq!(dfrelay_config_set_threshold_db(c, 4.0), DfrelayStatus::Ok);
        dfrelay_p_e2e(c, &mut after);
        dfrelay_config_free(c);
    }
    assert!(after < before);
}

#[test]
fn direct_link_closed_form() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { dfrelay_p_non_coop(1.0, &mut v) },
        DfrelayStatus::Ok
    );
    assert!((v - 0.146_446_609_406_726).abs() < 1e-12);
    assert_eq!(
        unsafe { dfrelay_p_non_coop(-1.0, &mut v) },
        DfrelayStatus::InvalidParameter
    );
    assert!(last_error().contains("gamma"), "{}", last_error());
}

#[test]
fn simulation_is_seeded() {
    let c = fig2(6.0);
    let (mut a, mut b) = (DfrelayEstimate::default(), DfrelayEstimate::default());
    unsafe {
        assert_eq!(
            dfrelay_simulate(c, 3, 100_000, 0, &mut a),
            DfrelayStatus::Ok
        );
        assert_eq!(
            dfrelay_simulate(c, 3, 100_000, 0, &mut b),
            DfrelayStatus::Ok
        );
    }
    assert_eq!(a.value, b.value);
    assert_eq!(a.trials, 100_000);
    assert!(a.ci_halfwidth > 0.0);
    let mut v = 0.0;
    unsafe { dfrelay_p_e2e(c, &mut v) };
    assert!((a.value - v).abs() < 4.0 * a.ci_halfwidth / 1.96 + 0.25 * v);
    assert_eq!(
        unsafe { dfrelay_simulate(c, 3, 0, 0, &mut a) },
        DfrelayStatus::InvalidSimulation
    );
    unsafe { dfrelay_config_free(c) };
}

#[test]
fn threshold_optimum() {
    let c = fig2(0.0);
    let (mut g, mut ber) = (0.0, 0.0);
    assert_eq!(
        unsafe { dfrelay_find_gamma_opt(c, 24.0, &mut g, &mut ber) },
        DfrelayStatus::Ok
    );
    let template = dfrelay::SystemConfig::from_db(4, 5.0, 0.0, (1.0, 1.0), -3.0, 0.0, 0.0).unwrap();
    let p = dfrelay::optimizer::find_gamma_opt(24.0, &template).unwrap();
    assert_eq!((g, ber), (p.gamma_opt_db, p.ber_at_opt));
    unsafe { dfrelay_config_free(c) };
}

#[test]
fn null_and_invalid_arguments() {
    let mut c = ptr::null_mut();
    let mut v = 7.0;
    unsafe {
        assert_eq!(
            dfrelay_p_e2e(ptr::null(), &mut v),
            DfrelayStatus::NullPointer
        );
        assert_eq!(v, 7.0);
        assert_eq!(
            dfrelay_config_new(4, 5.0, 0.0, 1.0, 1.0, -3.0, 0.0, 0.0, ptr::null_mut()),
            DfrelayStatus::NullPointer
        );
        assert_eq!(
            dfrelay_config_new(65, 5.0, 0.0, 1.0, 1.0, -3.0, 0.0, 0.0, &mut c),
            DfrelayStatus::InvalidParameter
        );
        assert!(c.is_null());
        assert!(!last_error().is_empty());
        dfrelay_config_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dfrelay.h")).unwrap();
    for name in [
        "dfrelay_config_new",
        "dfrelay_config_free",
        "dfrelay_config_set_threshold_db",
        "dfrelay_config_set_total_snr_db",
        "dfrelay_p_e2e",
        "dfrelay_p_non_coop",
        "dfrelay_simulate",
        "dfrelay_find_gamma_opt",
        "dfrelay_last_error",
        "typedef struct DfrelayConfig DfrelayConfig;",
    ] {
        assert!(header.contains(name), "{name} missing");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "dfrelay.h"

int main(void) {
    DfrelayConfig *c = NULL;
    double ber = 0.0;
    if (dfrelay_config_new(4, 5.0, 12.0, 1.0, 1.0, -3.0, 0.0, 0.0, &c) != DFRELAY_STATUS_OK) return 10;
    if (dfrelay_p_e2e(c, &ber) != DFRELAY_STATUS_OK) return 11;
    if (!(ber > 0.0 && ber < 0.5)) return 12;
    if (dfrelay_p_non_coop(-1.0, &ber) != DFRELAY_STATUS_INVALID_PARAMETER) return 13;
    if (dfrelay_last_error()[0] == '\0') return 14;
    dfrelay_config_free(c);
    printf("ok\n");
    return 0;
}
"#;

/// Compiles a C program against the generated header and the static
/// library built next to this test binary.
#[test]
fn c_program_links_against_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libdfrelay_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("ffi_smoke.c");
    let bin = dir.join("ffi_smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
