use std::ffi::{CStr, CString};
use std::ptr;

use jitterdisc_ffi::*;

fn last_error() -> String {
    let p = jd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn empty_result() -> JdDiscResult {
    JdDiscResult {
        value: 0.0,
        normalized: 0.0,
        delta: 0.0,
        kind: JdDiscKind::Exact,
        side: JdSide::None,
    }
}

fn gen(sampler: JdSampler, size: u64, dim: usize, seed: u64) -> *mut JdPointSet {
    let mut ps = ptr::null_mut();
    let s = unsafe { jd_pointset_generate(sampler, size, dim, seed, &mut ps) };
    assert_eq!(s, JdStatus::Ok, "{}", last_error());
    ps
}

#[test]
fn generate_and_inspect() {
    let ps = gen(JdSampler::Jittered, 3, 2, 1);
    unsafe {
        assert_eq!(jd_pointset_len(ps), 9);
        assert_eq!(jd_pointset_dim(ps), 2);
        let c = std::slice::from_raw_parts(jd_pointset_coords(ps), 18);
        assert!(c.iter().all(|&x| (0.0..1.0).contains(&x)));
        jd_pointset_free(ps);
    }
    let hc = gen(JdSampler::HalfCube, 2, 3, 1);
    let u = gen(JdSampler::Uniform, 10, 3, 1);
    let l = gen(JdSampler::Lhs, 10, 3, 1);
    unsafe {
        assert_eq!(jd_pointset_len(hc), 4);
        assert_eq!(jd_pointset_len(u), 10);
        assert_eq!(jd_pointset_len(l), 10);
        jd_pointset_free(hc);
        jd_pointset_free(u);
        jd_pointset_free(l);
        jd_pointset_free(ptr::null_mut());
        assert_eq!(jd_pointset_len(ptr::null()), 0);
    }
}

#[test]
fn from_coords_validates() {
    let mut ps = ptr::null_mut();
    let coords = [0.25, 0.75];
    unsafe {
        assert_eq!(jd_pointset_from_coords(coords.as_ptr(), 2, 1, &mut ps), JdStatus::Ok);
        let mut r = empty_result();
        assert_eq!(jd_star_disc_exact(ps, &mut r, ptr::null_mut()), JdStatus::Ok);
        assert_eq!(r.value, 0.5);
        jd_pointset_free(ps);

        let bad = [0.5, 1.0];
        assert_eq!(jd_pointset_from_coords(bad.as_ptr(), 2, 1, &mut ps), JdStatus::InvalidArgument);
        assert!(last_error().contains("must be < 1"));
        assert_eq!(jd_pointset_from_coords(ptr::null(), 2, 1, &mut ps), JdStatus::NullPointer);
    }
}

#[test]
fn three_methods_sandwich() {
    let ps = gen(JdSampler::Jittered, 8, 2, 5);
    let (mut e, mut h, mut c) = (empty_result(), empty_result(), empty_result());
    let mut corner = [0.0; 2];
    unsafe {
        assert_eq!(jd_star_disc_exact(ps, &mut e, corner.as_mut_ptr()), JdStatus::Ok);
        assert_eq!(jd_star_disc_heuristic(ps, 8, 3, &mut h, ptr::null_mut()), JdStatus::Ok);
        assert_eq!(jd_star_disc_certified(ps, 64, &mut c, ptr::null_mut()), JdStatus::Ok);
        let mut v = 0.0;
        let closed = e.side == JdSide::Overfull;
        assert_eq!(jd_signed_disc(ps, ptr::null(), corner.as_ptr(), closed, &mut v), JdStatus::Ok);
        assert!((v.abs() - e.value).abs() < 1e-9);
        jd_pointset_free(ps);
    }
    assert_eq!(e.kind, JdDiscKind::Exact);
    assert_eq!(h.kind, JdDiscKind::LowerWitness);
    assert_eq!(c.kind, JdDiscKind::CertifiedUpper);
    assert!(e.delta.is_nan());
    assert!(c.delta > 0.0);
    assert!(h.value <= e.value + 1e-9 && e.value <= c.value + 1e-9);
    assert!((e.normalized - e.value / 64.0).abs() < 1e-15);
}

#[test]
fn error_codes() {
    let mut ps = ptr::null_mut();
    let mut r = empty_result();
    unsafe {
        assert_eq!(jd_pointset_generate(JdSampler::Jittered, 0, 2, 0, &mut ps), JdStatus::InvalidArgument);
        assert_eq!(jd_star_disc_exact(ptr::null(), &mut r, ptr::null_mut()), JdStatus::NullPointer);
        let big = gen(JdSampler::Jittered, 3, 7, 0);
        assert_eq!(jd_star_disc_exact(big, &mut r, ptr::null_mut()), JdStatus::Infeasible);
        assert!(last_error().contains("heuristic"));
        jd_pointset_free(big);
        let mut v = 0.0;
        assert_eq!(jd_maxbin_prob_bound(100, 10, 0.0, &mut v), JdStatus::Range);
        assert_eq!(jd_maxbin_alpha(100, 1, 0.0, &mut v), JdStatus::Domain);
        assert_eq!(jd_star_disc_heuristic(ptr::null(), 0, 0, &mut r, ptr::null_mut()), JdStatus::NullPointer);
    }
    // a successful call clears the message
    let mut v = 0.0;
    assert_eq!(unsafe { jd_maxbin_exact_expect(1, 1, &mut v) }, JdStatus::Ok);
    assert!(jd_last_error_message().is_null());
    assert!((v - 0.25).abs() < 1e-15);
}

#[test]
fn file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("p.txt").to_str().unwrap()).unwrap();
    let ps = gen(JdSampler::Jittered, 5, 3, 9);
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(jd_pointset_write(ps, path.as_ptr()), JdStatus::Ok);
        assert_eq!(jd_pointset_read(path.as_ptr(), &mut back), JdStatus::Ok);
        let a = std::slice::from_raw_parts(jd_pointset_coords(ps), 375);
        let b = std::slice::from_raw_parts(jd_pointset_coords(back), 375);
        assert_eq!(a, b);
        jd_pointset_free(ps);
        jd_pointset_free(back);
        let missing = CString::new(dir.path().join("none.txt").to_str().unwrap()).unwrap();
        assert_eq!(jd_pointset_read(missing.as_ptr(), &mut back), JdStatus::Io);
    }
}

#[test]
fn bounds_struct() {
    let mut b = JdBounds {
        lower_main: 0.0,
        lower_main_applicable: true,
        smallm_lower: 0.0,
        upper: 0.0,
        upper_applicable: false,
        mc_reference: 0.0,
    };
    unsafe {
        assert_eq!(jd_bounds(64, 2, false, &mut b), JdStatus::Ok);
    }
    assert!(!b.lower_main_applicable);
    assert!(b.upper_applicable);
    assert!((b.mc_reference - (2.0f64 * 4096.0).sqrt()).abs() < 1e-9);
    unsafe {
        assert_eq!(jd_bounds(2, 2, false, &mut b), JdStatus::Ok);
    }
    assert!(b.lower_main.is_nan());
}

#[test]
fn c_program_links_against_header() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libjitterdisc_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("cc not available");
    assert!(status.success());
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(env!("CARGO_PKG_VERSION")));
}
