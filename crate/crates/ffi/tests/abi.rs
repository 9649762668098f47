use std::ffi::CStr;
use std::f64::consts::PI;
use std::ptr;

use pwcomplete_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { pwc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn sphere(nt: usize, np: usize) -> *mut PwcSurface {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pwc_sphere_new(1.0, nt, np, &mut s) }, PwcStatus::Ok);
    s
}

fn directions(nt: usize, np: usize) -> *mut PwcDirections {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { pwc_directions_new(nt, np, &mut d) }, PwcStatus::Ok);
    d
}

#[test]
fn bessel_and_errors() {
    let mut v = 0.0;
    assert_eq!(unsafe { pwc_sph_bessel_j(0, PI, &mut v) }, PwcStatus::Ok);
    assert!(v.abs() < 1e-15);
    assert_eq!(unsafe { pwc_sph_bessel_j(0, 1.0, ptr::null_mut()) }, PwcStatus::NullPointer);
    assert!(last_error().contains("null"));
    let ver = unsafe { CStr::from_ptr(pwc_version()) }.to_str().unwrap();
    assert_eq!(ver, env!("CARGO_PKG_VERSION"));
}

#[test]
fn surfaces() {
    let s = sphere(10, 20);
    assert_eq!(unsafe { pwc_surface_len(s) }, 200);
    let mut xyz = vec![0.0; 600];
    let mut w = vec![0.0; 200];
    assert_eq!(unsafe { pwc_surface_nodes(s, xyz.as_mut_ptr(), w.as_mut_ptr(), 200) }, PwcStatus::Ok);
    assert!((w.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    assert!(xyz.chunks(3).all(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs() < 1e-14));
    assert_eq!(
        unsafe { pwc_surface_nodes(s, xyz.as_mut_ptr(), ptr::null_mut(), 10) },
        PwcStatus::BufferTooSmall
    );
    unsafe { pwc_surface_free(s) };
    unsafe { pwc_surface_free(ptr::null_mut()) };
    assert_eq!(unsafe { pwc_surface_len(ptr::null()) }, 0);

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { pwc_sphere_new(-1.0, 10, 20, &mut bad) }, PwcStatus::InvalidArgument);
    assert!(bad.is_null());

    let (l, m, eps) = ([2usize], [0i64], [0.1]);
    let mut star = ptr::null_mut();
    let st = unsafe { pwc_star_new(1.0, l.as_ptr(), m.as_ptr(), eps.as_ptr(), 1, 12, 24, &mut star) };
    assert_eq!(st, PwcStatus::Ok);
    assert_eq!(unsafe { pwc_surface_len(star) }, 288);
    unsafe { pwc_surface_free(star) };
    let m_bad = [3i64];
    let st = unsafe { pwc_star_new(1.0, l.as_ptr(), m_bad.as_ptr(), eps.as_ptr(), 1, 12, 24, &mut star) };
    assert_eq!(st, PwcStatus::InvalidArgument);
    assert!(last_error().contains("exceeds degree"));
}

#[test]
fn ball_eigs() {
    let mut ks = [0.0; 8];
    let mut mults = [0usize; 8];
    let mut count = 0;
    let st = unsafe { pwc_ball_eigs(1.0, 6.5, ks.as_mut_ptr(), mults.as_mut_ptr(), 8, &mut count) };
    assert_eq!(st, PwcStatus::Ok);
    assert_eq!(count, 4);
    assert_eq!(&mults[..4], &[1, 3, 5, 1]);
    assert!((ks[0] - PI).abs() < 1e-12);
    let st = unsafe { pwc_ball_eigs(1.0, 6.5, ks.as_mut_ptr(), mults.as_mut_ptr(), 2, &mut count) };
    assert_eq!(st, PwcStatus::BufferTooSmall);
    assert_eq!(count, 4);
}

#[test]
fn indicator_and_fit() {
    let s = sphere(24, 48);
    let d = directions(12, 24);
    let (mut at, mut off) = (0.0, 0.0);
    assert_eq!(unsafe { pwc_completeness_indicator(PI, s, d, 600, 7, &mut at) }, PwcStatus::Ok);
    assert_eq!(unsafe { pwc_completeness_indicator(2.0, s, d, 600, 7, &mut off) }, PwcStatus::Ok);
    assert!(at <= 0.02 && off >= 0.2, "{at} {off}");
    assert_eq!(
        unsafe { pwc_completeness_indicator(-1.0, s, d, 600, 7, &mut at) },
        PwcStatus::InvalidWavenumber
    );
    assert_eq!(
        unsafe { pwc_completeness_indicator(PI, ptr::null(), d, 600, 7, &mut at) },
        PwcStatus::NullPointer
    );

    let (mut res, mut norm) = (0.0, 0.0);
    assert_eq!(unsafe { pwc_fit_harmonic(PI, s, d, 0, 0, f64::NAN, &mut res, &mut norm) }, PwcStatus::Ok);
    assert!((res - 1.0).abs() < 1e-6);
    assert_eq!(unsafe { pwc_fit_harmonic(1.0, s, d, 0, 0, f64::NAN, &mut res, &mut norm) }, PwcStatus::Ok);
    assert!(res <= 1e-8 && norm > 0.0);
    unsafe {
        pwc_directions_free(d);
        pwc_surface_free(s);
    }
}

#[test]
fn sweeps() {
    let s = sphere(24, 48);
    let d = directions(12, 24);
    let mut sw = ptr::null_mut();
    assert_eq!(unsafe { pwc_sweep_new(s, d, 3.0, 3.3, 31, 600, 1, 2, &mut sw) }, PwcStatus::Ok);
    assert_eq!(unsafe { pwc_sweep_dip_count(sw) }, 1);
    let (mut k, mut v, mut m) = (0.0, 0.0, 0usize);
    assert_eq!(unsafe { pwc_sweep_dip(sw, 0, &mut k, &mut v, &mut m) }, PwcStatus::Ok);
    assert!((k - PI).abs() < 1e-3 && m == 1);
    assert_eq!(unsafe { pwc_sweep_dip(sw, 1, &mut k, &mut v, &mut m) }, PwcStatus::InvalidArgument);

    let mut len = 0;
    let mut ks = vec![0.0; 31];
    let mut vals = vec![0.0; 31];
    let st = unsafe { pwc_sweep_samples(sw, ks.as_mut_ptr(), vals.as_mut_ptr(), 31, &mut len) };
    assert_eq!((st, len), (PwcStatus::Ok, 31));
    assert_eq!((ks[0], ks[30]), (3.0, 3.3));

    let mut needed = 0;
    let st = unsafe { pwc_sweep_to_json(sw, ptr::null_mut(), 0, &mut needed) };
    assert_eq!(st, PwcStatus::BufferTooSmall);
    let mut buf = vec![0 as std::ffi::c_char; needed + 1];
    assert_eq!(unsafe { pwc_sweep_to_json(sw, buf.as_mut_ptr(), buf.len(), &mut needed) }, PwcStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(parsed["dips"].as_array().unwrap().len(), 1);
    unsafe { pwc_sweep_free(sw) };

    let mut sl = ptr::null_mut();
    assert_eq!(unsafe { pwc_single_layer_sweep_new(s, 3.0, 3.3, 31, 1, &mut sl) }, PwcStatus::Ok);
    assert_eq!(unsafe { pwc_sweep_dip_count(sl) }, 1);
    assert_eq!(unsafe { pwc_sweep_dip(sl, 0, &mut k, ptr::null_mut(), ptr::null_mut()) }, PwcStatus::Ok);
    assert!((k - PI).abs() < 5e-3, "{k}");
    unsafe { pwc_sweep_free(sl) };

    let st = unsafe { pwc_sweep_new(s, d, 5.0, 3.0, 31, 600, 1, 1, &mut sw) };
    assert_eq!(st, PwcStatus::InvalidArgument);
    unsafe {
        pwc_directions_free(d);
        pwc_surface_free(s);
    }
}

#[test]
fn verify_suite_passes() {
    let (mut passed, mut total) = (0, 0);
    assert_eq!(unsafe { pwc_verify_suite(3, &mut passed, &mut total) }, PwcStatus::Ok);
    assert!(total > 0);
    assert_eq!(passed, total);
}

#[test]
fn errors_are_per_thread() {
    let mut v = 0.0;
    assert_eq!(unsafe { pwc_sph_bessel_j(0, 1.0, ptr::null_mut()) }, PwcStatus::NullPointer);
    std::thread::spawn(move || {
        assert_eq!(unsafe { pwc_last_error_message(ptr::null_mut(), 0) }, 0);
    })
    .join()
    .unwrap();
    assert_eq!(unsafe { pwc_sph_bessel_j(0, 1.0, &mut v) }, PwcStatus::Ok);
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/pwcomplete.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["pwc_sphere_new", "pwc_sweep_new", "pwc_last_error_message", "PWC_STATUS_BUFFER_TOO_SMALL"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
