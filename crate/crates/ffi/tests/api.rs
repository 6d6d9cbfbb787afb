use std::ffi::{CStr, CString};
use std::ptr;

use heading_consensus_ffi::*;

fn builtin(name: &str) -> *mut HcScenario {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hc_scenario_builtin(name.as_ptr(), &mut s) }, HcStatus::Ok);
    s
}

fn last_error() -> String {
    let p = hc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn hexagon_round_trip() {
    unsafe {
        let s = builtin("hexagon");
        assert_eq!(hc_scenario_agent_count(s), 6);
        let mut seed = 0;
        assert_eq!(hc_scenario_seed(s, &mut seed), HcStatus::Ok);
        assert_eq!(seed, 42);
        let (mut tx, mut ty) = (f64::NAN, f64::NAN);
        assert_eq!(hc_scenario_target(s, &mut tx, &mut ty), HcStatus::Ok);
        assert!(tx.hypot(ty) < 1e-9);

        let mut t = ptr::null_mut();
        assert_eq!(hc_simulate(s, 1e-3, 30.0, 1000, &mut t), HcStatus::Ok);
        assert_eq!(hc_trajectory_sample_count(t), 31);
        let mut time = 0.0;
        let mut buf = [0.0; 12];
        assert_eq!(hc_trajectory_sample(t, 30, &mut time, buf.as_mut_ptr(), buf.len()), HcStatus::Ok);
        assert!((time - 30.0).abs() < 1e-12);
        // root ends on its set point (-1, 0)
        assert!((buf[0] + 1.0).abs() < 1e-6 && buf[1].abs() < 1e-6);
        assert_eq!(hc_trajectory_sample(t, 31, &mut time, buf.as_mut_ptr(), buf.len()), HcStatus::IndexOutOfRange);
        assert_eq!(hc_trajectory_sample(t, 0, &mut time, buf.as_mut_ptr(), 11), HcStatus::BufferTooSmall);

        let mut r = ptr::null_mut();
        assert_eq!(hc_analyze(t, 0.0, 0.0, &mut r), HcStatus::Ok);
        let (mut c, mut a, mut f) = (false, false, false);
        assert_eq!(hc_report_verdicts(r, &mut c, &mut a, &mut f), HcStatus::Ok);
        assert!(c && a && f);
        let (mut edge, mut root) = (1.0, 1.0);
        assert_eq!(hc_report_final_errors(r, &mut edge, &mut root), HcStatus::Ok);
        assert!(edge < 1e-6 && root < 1e-6);

        let mut json = ptr::null_mut();
        assert_eq!(hc_report_to_json(r, &mut json), HcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["consensus"], serde_json::Value::Bool(true));
        hc_string_free(json);

        hc_report_free(r);
        hc_trajectory_free(t);
        hc_scenario_free(s);
    }
}

#[test]
fn misdirected_has_no_common_target() {
    unsafe {
        let s = builtin("hexagon-misdirected");
        let (mut x, mut y) = (0.0, 0.0);
        assert_eq!(hc_scenario_target(s, &mut x, &mut y), HcStatus::InvalidScenario);
        assert!(last_error().contains("Assumption 2"), "{}", last_error());
        hc_scenario_free(s);
    }
}

#[test]
fn local_frames_match_global() {
    unsafe {
        let s = builtin("torricelli");
        let (mut g, mut l) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(hc_simulate(s, 1e-2, 5.0, 50, &mut g), HcStatus::Ok);
        let frames = [0.4, -2.0, 3.0];
        assert_eq!(hc_simulate_local_frame(s, frames.as_ptr(), 3, 1e-2, 5.0, 50, &mut l), HcStatus::Ok);
        let n = hc_trajectory_sample_count(g);
        assert_eq!(n, hc_trajectory_sample_count(l));
        let (mut tg, mut tl) = (0.0, 0.0);
        let (mut bg, mut bl) = ([0.0; 6], [0.0; 6]);
        for k in 0..n {
            hc_trajectory_sample(g, k, &mut tg, bg.as_mut_ptr(), 6);
            hc_trajectory_sample(l, k, &mut tl, bl.as_mut_ptr(), 6);
            assert_eq!(tg, tl);
            for (a, b) in bg.iter().zip(&bl) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert_eq!(hc_simulate_local_frame(s, frames.as_ptr(), 2, 1e-2, 5.0, 50, &mut l), HcStatus::InvalidParameter);
        hc_trajectory_free(g);
        hc_trajectory_free(l);
        hc_scenario_free(s);
    }
}

#[test]
fn json_scenarios_and_errors() {
    unsafe {
        let mut s = ptr::null_mut();
        let good = CString::new(
            r#"{"positions": [[1, 0], [0, 1]], "edges": [[1, 2]], "target": [0, 0], "initial_headings": [[0, 1], [1, 0]]}"#,
        )
        .unwrap();
        assert_eq!(hc_scenario_from_json(good.as_ptr(), &mut s), HcStatus::Ok);
        let mut seed = 0;
        assert_eq!(hc_scenario_seed(s, &mut seed), HcStatus::NotAvailable);
        let mut re = ptr::null_mut();
        assert_eq!(hc_scenario_reseed(s, 9, &mut re), HcStatus::Ok);
        assert_eq!(hc_scenario_seed(re, &mut seed), HcStatus::Ok);
        assert_eq!(seed, 9);
        let (mut h1, mut h2) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(hc_scenario_hash(s, &mut h1), HcStatus::Ok);
        assert_eq!(hc_scenario_hash(re, &mut h2), HcStatus::Ok);
        assert_eq!(CStr::from_ptr(h1).to_bytes().len(), 64);
        assert_ne!(CStr::from_ptr(h1), CStr::from_ptr(h2));
        hc_string_free(h1);
        hc_string_free(h2);
        hc_scenario_free(re);
        hc_scenario_free(s);

        let garbage = CString::new("{not json").unwrap();
        assert_eq!(hc_scenario_from_json(garbage.as_ptr(), &mut s), HcStatus::ParseError);
        let cycle = CString::new(
            r#"{"positions": [[0, 0], [1, 0], [2, 0]], "edges": [[2, 3], [3, 2]], "target": [5, 5], "seed": 1}"#,
        )
        .unwrap();
        assert_eq!(hc_scenario_from_json(cycle.as_ptr(), &mut s), HcStatus::InvalidScenario);
        assert!(last_error().contains("Assumption 1"), "{}", last_error());

        assert_eq!(hc_scenario_from_json(ptr::null(), &mut s), HcStatus::NullPointer);
        assert_eq!(hc_scenario_builtin(good.as_ptr(), ptr::null_mut()), HcStatus::NullPointer);
        let bad_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(hc_scenario_from_json(bad_utf8.as_ptr().cast(), &mut s), HcStatus::InvalidUtf8);
        assert_eq!(hc_scenario_agent_count(ptr::null()), 0);
        hc_scenario_free(ptr::null_mut());
        hc_trajectory_free(ptr::null_mut());
        hc_report_free(ptr::null_mut());
        hc_string_free(ptr::null_mut());

        let ok = builtin("torricelli");
        let mut t = ptr::null_mut();
        assert_eq!(hc_simulate(ok, 0.0, 1.0, 1, &mut t), HcStatus::InvalidParameter);
        assert_eq!(hc_simulate(ok, 1e-2, f64::NAN, 1, &mut t), HcStatus::InvalidParameter);
        assert_eq!(hc_simulate(ok, 1e-2, 1.0, 0, &mut t), HcStatus::InvalidParameter);
        hc_scenario_free(ok);
    }
}

#[test]
fn recover_target_through_the_abi() {
    let (mut x, mut y) = (0.0, 0.0);
    let st = unsafe { hc_recover_target(2.0, 0.0, -1.0, 0.0, 0.0, 3.0, 0.0, -2.0, &mut x, &mut y) };
    assert_eq!(st, HcStatus::Ok);
    assert!(x.abs() < 1e-12 && y.abs() < 1e-12);
    let st = unsafe { hc_recover_target(0.0, 0.0, 1.0, 0.0, 0.0, 1.0, -3.0, 0.0, &mut x, &mut y) };
    assert_eq!(st, HcStatus::SingularGeometry);
    let st = unsafe { hc_recover_target(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, &mut x, &mut y) };
    assert_eq!(st, HcStatus::InvalidParameter);
}
