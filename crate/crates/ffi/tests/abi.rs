use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use crftiw_ffi::*;

fn last_error() -> String {
    let p = crftiw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn curve(len: usize, phase: f64) -> Vec<f64> {
    (0..len)
        .map(|t| 2.0 + (0.3 * t as f64 + phase).sin() + 0.01 * t as f64)
        .collect()
}

#[test]
fn features_match_the_library() {
    let values = curve(64, 0.0);
    let mut out = [0.0; 10];
    let mut written = 0;
    let status = unsafe {
        crftiw_featurize_ti(
            values.as_ptr(),
            64,
            ptr::null(),
            out.as_mut_ptr(),
            out.len(),
            &mut written,
        )
    };
    assert_eq!(status, CrftiwStatus::Ok);
    assert_eq!(written, 7);
    let expected = crftiw::wavelet::featurize_ti(
        &crftiw::wavelet::Curve::new(values).unwrap(),
        &crftiw::wavelet::WaveletFilter::symmlet8(),
    )
    .unwrap();
    assert_eq!(&out[..7], expected.as_slice());
}

#[test]
fn errors_carry_codes_and_messages() {
    let values = curve(24, 0.0);
    let mut out = [0.0; 10];
    let mut written = 0;
    let status = unsafe {
        crftiw_featurize_ti(
            values.as_ptr(),
            24,
            ptr::null(),
            out.as_mut_ptr(),
            10,
            &mut written,
        )
    };
    assert_eq!(status, CrftiwStatus::Wavelet);
    assert!(last_error().contains("24"));

    let values = curve(64, 0.0);
    let status = unsafe {
        crftiw_featurize_ti(
            values.as_ptr(),
            64,
            ptr::null(),
            out.as_mut_ptr(),
            3,
            &mut written,
        )
    };
    assert_eq!(status, CrftiwStatus::InvalidArgument);

    let name = CString::new("db99").unwrap();
    let status = unsafe {
        crftiw_featurize_ti(
            values.as_ptr(),
            64,
            name.as_ptr(),
            out.as_mut_ptr(),
            10,
            &mut written,
        )
    };
    assert_eq!(status, CrftiwStatus::Wavelet);

    let status = unsafe { crftiw_ari(ptr::null(), ptr::null(), 3, ptr::null_mut()) };
    assert_eq!(status, CrftiwStatus::NullPointer);

    let mut l = 0;
    let status = unsafe { crftiw_select_l([1.0].as_ptr(), 1, 15.0, &mut l) };
    assert_eq!(status, CrftiwStatus::Mixture);
}

#[test]
fn scalar_entry_points() {
    let values = curve(32, 1.0);
    let mut err = 1.0;
    let name = CString::new("haar").unwrap();
    assert_eq!(
        unsafe { crftiw_parseval_error(values.as_ptr(), 32, name.as_ptr(), &mut err) },
        CrftiwStatus::Ok
    );
    assert!(err < 1e-12);

    let (p, q) = ([1usize, 1, 1, 2], [1usize, 2, 1, 2]);
    let mut index = 1.0;
    assert_eq!(
        unsafe { crftiw_ari(p.as_ptr(), q.as_ptr(), 4, &mut index) },
        CrftiwStatus::Ok
    );
    assert!(index.abs() < 1e-12);

    let table = [
        -1034.0, -894.0, -815.0, -791.0, -774.0, -767.0, -754.0, -743.0, -733.0, -734.0,
    ];
    let mut l = 0;
    assert_eq!(
        unsafe { crftiw_select_l(table.as_ptr(), 10, 15.0, &mut l) },
        CrftiwStatus::Ok
    );
    assert_eq!(l, 5);
}

#[test]
fn handles_round_trip() {
    let n = 40;
    let (p, d) = (3, 2);
    let cov: Vec<f64> = (0..n * d)
        .map(|k| ((k * 37 % 11) as f64 - 5.0) / 3.0 + 0.01 * k as f64)
        .collect();
    let features: Vec<f64> = (0..n * p)
        .map(|k| {
            let i = k / p;
            let a = 0.6 * cov[2 * i] + 0.8 * cov[2 * i + 1];
            a * a + (k % p) as f64 + if i < n / 2 { 0.0 } else { 2.0 }
        })
        .collect();

    let mut fit = ptr::null_mut();
    let status =
        unsafe { crftiw_index_fit(features.as_ptr(), n, p, cov.as_ptr(), d, -1, 7, &mut fit) };
    assert_eq!(status, CrftiwStatus::Ok);
    let mut gamma = [0.0; 2];
    assert_eq!(
        unsafe { crftiw_index_fit_gamma(fit, gamma.as_mut_ptr(), 2) },
        CrftiwStatus::Ok
    );
    assert!((gamma[0].hypot(gamma[1]) - 1.0).abs() < 1e-12);
    let mut free_loss = 0.0;
    assert_eq!(
        unsafe { crftiw_index_fit_loss(fit, &mut free_loss) },
        CrftiwStatus::Ok
    );
    let mut residuals = vec![0.0; n * p];
    assert_eq!(
        unsafe { crftiw_index_fit_residuals(fit, residuals.as_mut_ptr(), residuals.len()) },
        CrftiwStatus::Ok
    );
    unsafe { crftiw_index_fit_free(fit) };

    let mut constrained = ptr::null_mut();
    let status = unsafe {
        crftiw_index_fit(
            features.as_ptr(),
            n,
            p,
            cov.as_ptr(),
            d,
            1,
            7,
            &mut constrained,
        )
    };
    assert_eq!(status, CrftiwStatus::Ok);
    let mut loss = 0.0;
    unsafe { crftiw_index_fit_loss(constrained, &mut loss) };
    assert!(loss >= free_loss);
    unsafe { crftiw_index_fit_free(constrained) };

    let mut mixture = ptr::null_mut();
    let status = unsafe { crftiw_mixture_fit(residuals.as_ptr(), n, p, 2, 3, &mut mixture) };
    assert_eq!(status, CrftiwStatus::Ok, "{}", last_error());
    let mut loglik = f64::NAN;
    assert_eq!(
        unsafe { crftiw_mixture_loglik(mixture, &mut loglik) },
        CrftiwStatus::Ok
    );
    assert!(loglik.is_finite());
    let mut post = vec![0.0; n * 2];
    assert_eq!(
        unsafe { crftiw_mixture_posteriors(mixture, post.as_mut_ptr(), post.len()) },
        CrftiwStatus::Ok
    );
    for row in post.chunks(2) {
        assert!((row[0] + row[1] - 1.0).abs() < 1e-12);
    }
    let mut labels = vec![0usize; n];
    assert_eq!(
        unsafe { crftiw_mixture_labels(mixture, labels.as_mut_ptr(), n) },
        CrftiwStatus::Ok
    );
    assert!(labels.iter().all(|l| *l == 1 || *l == 2));
    assert_eq!(
        unsafe { crftiw_mixture_labels(mixture, labels.as_mut_ptr(), 3) },
        CrftiwStatus::InvalidArgument
    );
    unsafe { crftiw_mixture_free(mixture) };

    let mut bad = ptr::null_mut();
    let status = unsafe { crftiw_mixture_fit(residuals.as_ptr(), n, p, 0, 3, &mut bad) };
    assert_eq!(status, CrftiwStatus::Mixture);
    assert!(bad.is_null());
    unsafe {
        crftiw_mixture_free(ptr::null_mut());
        crftiw_index_fit_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/crftiw.h")).unwrap();
    for name in [
        "crftiw_last_error",
        "crftiw_featurize_ti",
        "crftiw_parseval_error",
        "crftiw_ari",
        "crftiw_select_l",
        "crftiw_index_fit(",
        "crftiw_index_fit_free",
        "crftiw_mixture_fit(",
        "crftiw_mixture_labels",
        "crftiw_mixture_free",
        "typedef struct CrftiwMixture CrftiwMixture",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles a C program against the header and the static library.
#[test]
fn c_program_links_against_static_library() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libcrftiw_ffi.a");
    let compiler = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&compiler).arg("--version").output().is_err() {
        eprintln!(
            "skipping: no static library at {} or no C compiler",
            lib.display()
        );
        return;
    }
    let exe = tempfile::tempdir().unwrap();
    let bin = exe.path().join("smoke");
    let status = Command::new(&compiler)
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok 6");
}
