use mlcs_ffi::*;
use std::ffi::CStr;
use std::process::Command;
use std::ptr;

fn unit() -> *mut MlcsParams {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { mlcs_params_new(1.0, 1.0, 1.0, 1.0, &mut p) },
        MlcsStatus::Ok
    );
    p
}

fn last_error() -> String {
    let p = mlcs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn evaluates_exp_at_unit_parameters() {
    let p = unit();
    let mut s = MlcsSeries::default();
    unsafe {
        assert_eq!(mlcs_ml_eval(p, 1.0, 1e-14, 1000, &mut s), MlcsStatus::Ok);
        assert!((s.value - std::f64::consts::E).abs() < 1e-13);
        assert!(s.converged);
        let mut t = MlcsSeries::default();
        assert_eq!(
            mlcs_ml_eval_1f1(p, 1.0, 1e-14, 1000, &mut t),
            MlcsStatus::Ok
        );
        assert!((t.value - s.value).abs() < 1e-13);
        mlcs_params_free(p);
    }
}

#[test]
fn invalid_parameters_report_domain() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { mlcs_params_new(-1.0, 1.0, 1.0, 1.0, &mut p) },
        MlcsStatus::Domain
    );
    assert!(p.is_null());
    assert_eq!(last_error(), "alpha must be positive");
}

#[test]
fn null_pointers_are_rejected() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(
            mlcs_structure_e(ptr::null(), 1, &mut v),
            MlcsStatus::NullPointer
        );
        let p = unit();
        assert_eq!(
            mlcs_structure_e(p, 1, ptr::null_mut()),
            MlcsStatus::NullPointer
        );
        mlcs_params_free(p);
        mlcs_params_free(ptr::null_mut());
        mlcs_state_free(ptr::null_mut());
    }
}

#[test]
fn non_convergence_still_writes_partial_sum() {
    let p = unit();
    let mut s = MlcsSeries::default();
    unsafe {
        assert_eq!(
            mlcs_ml_eval(p, 50.0, 1e-12, 10, &mut s),
            MlcsStatus::NonConvergence
        );
        assert!(!s.converged);
        assert!(s.value > 0.0);
        mlcs_params_free(p);
    }
}

#[test]
fn coherent_state_round_trip() {
    let p = unit();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(mlcs_cs_build(p, 1.0, 0.0, &mut s), MlcsStatus::Ok);
        let mut n = 0usize;
        assert_eq!(mlcs_state_len(s, &mut n), MlcsStatus::Ok);
        let mut norm = 0.0;
        for i in 0..n {
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(mlcs_state_coeff(s, i, &mut re, &mut im), MlcsStatus::Ok);
            norm += re * re + im * im;
        }
        let mut tail = 0.0;
        assert_eq!(mlcs_state_tail_mass(s, &mut tail), MlcsStatus::Ok);
        assert!((norm + tail - 1.0).abs() < 1e-12);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(mlcs_state_coeff(s, n, &mut re, &mut im), MlcsStatus::Domain);
        mlcs_state_free(s);

        assert_eq!(
            mlcs_overlap(p, 1.0, 0.0, 2.0, 0.0, &mut re, &mut im),
            MlcsStatus::Ok
        );
        assert!((re - (-0.5f64).exp()).abs() < 1e-10 && im == 0.0);
        mlcs_params_free(p);
    }
}

#[test]
fn scalar_entry_points() {
    let p = unit();
    let mut v = 0.0;
    unsafe {
        assert_eq!(mlcs_k_gamma(3.0, 1.0, &mut v), MlcsStatus::Ok);
        assert!((v - 2.0).abs() < 1e-13);
        assert_eq!(mlcs_k_pochhammer(1.0, 3, 2.0, &mut v), MlcsStatus::Ok);
        assert!((v - 15.0).abs() < 1e-12);
        assert_eq!(mlcs_structure_e(p, 4, &mut v), MlcsStatus::Ok);
        assert_eq!(v, 4.0);
        assert_eq!(mlcs_meijer_g_weight(p, 2.0, &mut v), MlcsStatus::Ok);
        assert!((v - (-2.0f64).exp()).abs() < 1e-13);
        assert_eq!(mlcs_measure_weight_h(p, 2.0, &mut v), MlcsStatus::Ok);
        assert!((v - 1.0).abs() < 1e-11);
        assert_eq!(mlcs_partition_linear(1.0, 1.0, &mut v), MlcsStatus::Ok);
        assert!((v - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert_eq!(mlcs_husimi_q(p, 50.0, 1.0, 0.0, &mut v), MlcsStatus::Ok);
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(mlcs_p_function(p, 1.0, 1.0, 0.0, &mut v), MlcsStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(mlcs_nu(1.0, &mut v), MlcsStatus::Ok);
        assert!((v - 2.266_534_507_699_849).abs() < 1e-9);
        assert_eq!(mlcs_continuum_husimi(1.0, 1.0, 0.0, &mut v), MlcsStatus::Ok);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(
            mlcs_continuum_husimi(-1.0, 1.0, 0.0, &mut v),
            MlcsStatus::Domain
        );
        mlcs_params_free(p);
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mlcs.h");
    assert!(std::path::Path::new(header).exists());
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, header])
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{compiler} rejected the header"),
            Err(_) => eprintln!("{compiler} not available; header check skipped"),
        }
    }
}

#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libmlcs_ffi.a");
    if !lib.exists() {
        eprintln!(
            "static library not found at {}; link check skipped",
            lib.display()
        );
        return;
    }
    let dir = env!("CARGO_MANIFEST_DIR");
    let out = std::env::temp_dir().join(format!("mlcs_smoke_{}", std::process::id()));
    let built = Command::new("cc")
        .arg(format!("{dir}/tests/c/smoke.c"))
        .arg(format!("-I{dir}/include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status();
    match built {
        Ok(s) => assert!(s.success(), "C smoke program failed to build"),
        Err(_) => {
            eprintln!("cc not available; link check skipped");
            return;
        }
    }
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    let (value, message) = text.trim().split_once('|').unwrap();
    assert!((value.parse::<f64>().unwrap() - std::f64::consts::E).abs() < 1e-13);
    assert_eq!(message, "alpha must be positive");
}
