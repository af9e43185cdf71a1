use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use sphere_qmc_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let n = unsafe { sqmc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn single_point_round_trip() {
    let xyz = [0.0, 0.0, 1.0 + 1e-9];
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sqmc_config_from_xyz(xyz.as_ptr(), 1, &mut c) }, SqmcStatus::Ok);
    assert_eq!(unsafe { sqmc_config_len(c) }, 1);
    let mut back = [0.0; 3];
    assert_eq!(unsafe { sqmc_config_copy_xyz(c, back.as_mut_ptr(), 3) }, SqmcStatus::Ok);
    assert_eq!(back, [0.0, 0.0, 1.0]);

    let mut w = SqmcWce::default();
    assert_eq!(unsafe { sqmc_wce(c, 2.0, 1e-10, &mut w) }, SqmcStatus::Ok);
    let exact = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    assert!((w.value - exact).abs() < 1e-12);
    let mut h = SqmcWce::default();
    assert_eq!(unsafe { sqmc_wce_heat(c, 2.0, 1e-10, &mut h) }, SqmcStatus::Ok);
    assert!((h.value - exact).abs() < 1e-9);
    unsafe { sqmc_config_free(c) };
}

#[test]
fn sampling_matches_library() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sqmc_sample(SqmcSampler::IidUniform as u32, 20, 5, 3, &mut c) }, SqmcStatus::Ok);
    let mut xyz = vec![0.0; 60];
    assert_eq!(unsafe { sqmc_config_copy_xyz(c, xyz.as_mut_ptr(), 60) }, SqmcStatus::Ok);
    unsafe { sqmc_config_free(c) };
    let direct = sphere_qmc::samplers::sample_iid_uniform(20, &sphere_qmc::RngStream::new(5, 3)).unwrap();
    let flat: Vec<f64> = direct.triples().into_iter().flatten().collect();
    assert_eq!(flat, xyz);
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sqmc_sample(99, 4, 0, 0, &mut c) }, SqmcStatus::InvalidInput);
    assert!(last_error().contains("unknown sampler"));
    assert_eq!(unsafe { sqmc_sample(2, 0, 0, 0, &mut c) }, SqmcStatus::InvalidInput);
    assert!(c.is_null());

    let off_sphere = [0.0, 0.0, 2.0];
    assert_eq!(unsafe { sqmc_config_from_xyz(off_sphere.as_ptr(), 1, &mut c) }, SqmcStatus::InvalidInput);
    assert!(last_error().contains("unit sphere"));
    assert_eq!(unsafe { sqmc_config_from_xyz(ptr::null(), 1, &mut c) }, SqmcStatus::NullPointer);

    let mut w = SqmcWce::default();
    assert_eq!(unsafe { sqmc_wce(ptr::null(), 2.0, 1e-8, &mut w) }, SqmcStatus::NullPointer);
    assert_eq!(last_error(), "config is null");

    assert_eq!(unsafe { sqmc_sample(2, 3, 0, 0, &mut c) }, SqmcStatus::Ok);
    assert_eq!(unsafe { sqmc_wce(c, 0.5, 1e-8, &mut w) }, SqmcStatus::Domain);
    assert_eq!(unsafe { sqmc_wce(c, 1.01, 1e-15, &mut w) }, SqmcStatus::Numerical);
    assert_eq!(unsafe { sqmc_wce(c, 2.0, 1e-8, ptr::null_mut()) }, SqmcStatus::NullPointer);
    let mut small = [0.0; 8];
    assert_eq!(unsafe { sqmc_config_copy_xyz(c, small.as_mut_ptr(), 8) }, SqmcStatus::BufferTooSmall);
    unsafe { sqmc_config_free(c) };
    unsafe { sqmc_config_free(ptr::null_mut()) };
    assert_eq!(unsafe { sqmc_config_len(ptr::null()) }, 0);
}

#[test]
fn truncated_error_message_is_terminated() {
    let mut c = ptr::null_mut();
    unsafe { sqmc_sample(42, 4, 0, 0, &mut c) };
    let mut buf = [1 as std::ffi::c_char; 5];
    let full = unsafe { sqmc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 4);
    assert_eq!(buf[4], 0);
    assert_eq!(unsafe { sqmc_last_error_message(ptr::null_mut(), 0) }, full);
}

#[test]
fn bounds_and_zeta() {
    let mut e = SqmcExplicitConfidence::default();
    assert_eq!(unsafe { sqmc_explicit_confidence(1000, 3.0, &mut e) }, SqmcStatus::Ok);
    assert!(e.wce_bound < 3e-3 && e.numerator < 2.86 && e.failure_prob < 1e-3);
    assert_eq!(unsafe { sqmc_explicit_confidence(2, 3.0, &mut e) }, SqmcStatus::Domain);

    let mut p = -1.0;
    assert_eq!(unsafe { sqmc_concentration_tail(16, 1.0, 0.05, &mut p) }, SqmcStatus::Ok);
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(unsafe { sqmc_concentration_tail(16, 1.0, 1e-4, &mut p) }, SqmcStatus::Domain);

    let (mut v, mut err) = (0.0, 0.0);
    assert_eq!(unsafe { sqmc_zeta(2.0, 1e-13, &mut v, &mut err) }, SqmcStatus::Ok);
    assert!((v - 1.0).abs() <= 1e-12 && err <= 1e-13);
    assert_eq!(unsafe { sqmc_zeta(2.0, 1e-13, ptr::null_mut(), &mut err) }, SqmcStatus::NullPointer);

    let ver = unsafe { CStr::from_ptr(sqmc_version()) };
    assert_eq!(ver.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps/
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libsphere_qmc_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new(cc)
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc);
        }
    }
    Err(())
}
