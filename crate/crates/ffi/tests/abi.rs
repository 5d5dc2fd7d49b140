use std::ffi::{CStr, CString};
use std::ptr;

use hgproto::bank::{ClassPrototypes, PrototypeBank};
use hgproto::{CentroidSet, FeatureMatrix};
use hgproto_ffi::*;
use ndarray::array;

fn last_error() -> String {
    let p = hg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn saved_bank(dir: &tempfile::TempDir) -> CString {
    let mut bank = PrototypeBank::new(2, 2, 1, 3).unwrap();
    let pos = CentroidSet::new(array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
    let neg = CentroidSet::new(array![[-1.0, 0.0], [0.0, -1.0]]).unwrap();
    bank.set_prototypes(0, ClassPrototypes::new(pos.clone(), neg, pos).unwrap()).unwrap();
    let path = dir.path().join("bank.hppb");
    hgproto::bank::file::save(&bank, &path).unwrap();
    CString::new(path.to_str().unwrap()).unwrap()
}

#[test]
fn bank_load_query_save_free() {
    let dir = tempfile::tempdir().unwrap();
    let path = saved_bank(&dir);
    let mut bank: *mut HgBank = ptr::null_mut();
    unsafe {
        assert_eq!(hg_bank_load(path.as_ptr(), &mut bank), HgStatus::Ok);
        let (mut k, mut d, mut l) = (0, 0, 0);
        assert_eq!(hg_bank_shape(bank, &mut k, &mut d, &mut l), HgStatus::Ok);
        assert_eq!((k, d, l), (2, 2, 1));

        let mut global = [0.0; 4];
        assert_eq!(hg_bank_global_prototypes(bank, 0, global.as_mut_ptr(), 4), HgStatus::Ok);
        assert_eq!(global, [1.0, 0.0, 0.0, 1.0]);
        assert_eq!(hg_bank_global_prototypes(bank, 0, global.as_mut_ptr(), 3), HgStatus::BufferTooSmall);

        let copy = CString::new(dir.path().join("copy.hppb").to_str().unwrap()).unwrap();
        assert_eq!(hg_bank_save(bank, copy.as_ptr()), HgStatus::Ok);
        let a = std::fs::read(path.to_str().unwrap()).unwrap();
        let b = std::fs::read(copy.to_str().unwrap()).unwrap();
        assert_eq!(a, b);
        hg_bank_free(bank);
        hg_bank_free(ptr::null_mut());
    }
}

#[test]
fn load_errors_report_status_and_message() {
    let mut bank: *mut HgBank = ptr::null_mut();
    let missing = CString::new("/nonexistent/bank.hppb").unwrap();
    unsafe {
        assert_eq!(hg_bank_load(missing.as_ptr(), &mut bank), HgStatus::Io);
        assert!(bank.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(hg_bank_load(ptr::null(), &mut bank), HgStatus::NullPointer);

        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.hppb");
        std::fs::write(&bad, b"NOPE0000000000000000").unwrap();
        let bad = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(hg_bank_load(bad.as_ptr(), &mut bank), HgStatus::Format);
        assert!(last_error().contains("magic"));
    }
}

#[test]
fn uninitialized_bank_cannot_score_or_save() {
    let mut bank: *mut HgBank = ptr::null_mut();
    unsafe {
        assert_eq!(hg_bank_new(2, 2, 1, 0, &mut bank), HgStatus::Ok);
        let c = [1.0, 0.0, 0.0, 1.0];
        let mut gap = 0.0;
        assert_eq!(hg_gap_score(bank, 0, c.as_ptr(), 2, 2, &mut gap), HgStatus::BankUninitialized);
        let dir = tempfile::tempdir().unwrap();
        let out = CString::new(dir.path().join("x").to_str().unwrap()).unwrap();
        assert_eq!(hg_bank_save(bank, out.as_ptr()), HgStatus::BankUninitialized);
        hg_bank_free(bank);
        assert_eq!(hg_bank_new(0, 2, 1, 0, &mut bank), HgStatus::InvalidConfig);
    }
}

#[test]
fn fcm_matches_library() {
    let x = [0.0, 0.0, 1.0, 0.0, 4.0, 0.0, 5.0, 0.0];
    let mut u = [0.0; 8];
    let mut c = [0.0; 4];
    let mut j = 0.0;
    let mut iters = 0usize;
    let status = unsafe {
        hg_fcm_run(x.as_ptr(), 4, 2, 2, 2.0, 5, 7, u.as_mut_ptr(), c.as_mut_ptr(), &mut j, &mut iters)
    };
    assert_eq!(status, HgStatus::Ok);

    let fm = FeatureMatrix::new(array![[0.0, 0.0], [1.0, 0.0], [4.0, 0.0], [5.0, 0.0]]).unwrap();
    let r = hgproto::fcm::run(
        &fm,
        2,
        &hgproto::fcm::InitStrategy::RandomMembership { seed: 7 },
        &hgproto::fcm::FcmConfig::default(),
    )
    .unwrap();
    assert_eq!(u.to_vec(), r.membership.as_array().iter().copied().collect::<Vec<_>>());
    assert_eq!(c.to_vec(), r.centroids.as_array().iter().copied().collect::<Vec<_>>());
    assert_eq!(Some(j), r.final_objective());
    assert_eq!(iters, r.iterations_run);

    let status = unsafe { hg_fcm_run(x.as_ptr(), 4, 2, 9, 2.0, 5, 7, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, HgStatus::InvalidConfig);
    assert!(last_error().contains("K = 9"));
    let status = unsafe { hg_fcm_run(x.as_ptr(), 4, 2, 2, 1.0, 5, 7, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, HgStatus::InvalidConfig);
}

#[test]
fn forward_and_gap() {
    let dir = tempfile::tempdir().unwrap();
    let path = saved_bank(&dir);
    let mut bank: *mut HgBank = ptr::null_mut();
    unsafe {
        assert_eq!(hg_bank_load(path.as_ptr(), &mut bank), HgStatus::Ok);
        let x = [1.0, 0.1, 0.9, 0.0, 0.1, 1.0, 0.0, 0.8];
        let mut feats = [0.0; 8];
        let mut cents = [0.0; 4];
        assert_eq!(hg_forward(bank, 0, x.as_ptr(), 4, 2, 1, feats.as_mut_ptr(), cents.as_mut_ptr()), HgStatus::Ok);
        assert!(feats.iter().all(|v| v.is_finite()));
        let mut again = [0.0; 8];
        assert_eq!(hg_forward(bank, 0, x.as_ptr(), 4, 2, 1, again.as_mut_ptr(), ptr::null_mut()), HgStatus::Ok);
        assert_eq!(feats, again);

        let mut gap = 0.0;
        let positive = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(hg_gap_score(bank, 0, positive.as_ptr(), 2, 2, &mut gap), HgStatus::Ok);
        assert!((gap - 2.0).abs() < 1e-12);
        assert_eq!(hg_gap_score(bank, 0, positive.as_ptr(), 2, 3, &mut gap), HgStatus::InvalidData);
        hg_bank_free(bank);
    }
}

#[test]
fn oinfo_json_round_trip() {
    let json = CString::new(r#"{"type":"discrete","cards":[2,2,2],"pmf":[0.25,0,0,0.25,0,0.25,0.25,0]}"#).unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(hg_oinfo_analyze_json(json.as_ptr(), &mut out), HgStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        hg_string_free(out);
        assert_eq!(report["verdict"], "Synergy");
        assert!((report["o_information"].as_f64().unwrap() + 1.0).abs() < 1e-9);

        let bad = CString::new("{not json").unwrap();
        assert_eq!(hg_oinfo_analyze_json(bad.as_ptr(), &mut out), HgStatus::Format);
        hg_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/hgproto.h");
    for name in [
        "hg_last_error",
        "hg_bank_new",
        "hg_bank_load",
        "hg_bank_save",
        "hg_bank_free",
        "hg_bank_shape",
        "hg_bank_global_prototypes",
        "hg_fcm_run",
        "hg_forward",
        "hg_gap_score",
        "hg_oinfo_analyze_json",
        "hg_string_free",
        "typedef struct HgBank HgBank",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
