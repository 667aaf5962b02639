use proptest::prelude::*;

use simplexforge::knaster::{optimize, scan_f0, OptContext, OptimizerConfig, ScanSchedule};
use simplexforge::persist::{
    parse_json, parse_scan_csv, read_json, scan_csv, to_json_string, write_json, ResultFile,
    RunManifest,
};
use simplexforge::weyl::seed_sic;

fn manifest() -> RunManifest {
    RunManifest::new(vec!["test".into()], serde_json::json!({}), 7).with_tolerance("residual", 1e-18)
}

#[test]
fn result_file_round_trips_bit_for_bit() {
    let ctx = OptContext::new(3).unwrap();
    let start = ctx.default_start(0).unwrap();
    let cfg = OptimizerConfig {
        target: 0.1,
        ..Default::default()
    };
    let res = optimize(&start, &ctx, &cfg).unwrap();
    let file = ResultFile::from_family(&res, manifest());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("r.json");
    write_json(&path, &file).unwrap();
    let back: ResultFile = read_json(&path).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.residual_sum.to_bits(), res.residual_sum.to_bits());
    let mats = back.hermitian_matrices().unwrap();
    assert_eq!(mats, res.matrices);
}

#[test]
fn seed_file_schema() {
    let ctx = OptContext::new(3).unwrap();
    let file = ResultFile::from_sic(&seed_sic(3).unwrap(), &ctx, manifest()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&to_json_string(&file).unwrap()).unwrap();
    for key in ["manifest", "dim", "power", "f0", "residual_sum", "vertices", "matrices", "spectra", "flags"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["source"], "seed");
    assert_eq!(v["matrices"][0][0].as_array().unwrap().len(), 2);
}

#[test]
fn scan_csv_has_one_row_per_step() {
    let ctx = OptContext::new(3).unwrap();
    let start = ctx.default_start(0).unwrap();
    let entries = scan_f0(0.0, 0.2, 7, &OptimizerConfig::default(), &start, &ctx, ScanSchedule::Sequential, |_| {})
        .unwrap();
    let text = scan_csv(&entries);
    let rows = parse_scan_csv(&text).unwrap();
    assert_eq!(rows.len(), 7);
    for (row, e) in rows.iter().zip(&entries) {
        assert_eq!(row.f0.to_bits(), e.f0.to_bits());
        assert_eq!(row.residual_sum.to_bits(), e.result.residual_sum.to_bits());
        assert_eq!(row.converged, e.result.converged);
    }
    assert!(text.starts_with("f0,residual_sum,iterations,converged,spectra_spread,psd_all\n"));
}

#[test]
fn truncated_file_reports_offset() {
    let ctx = OptContext::new(2).unwrap();
    let file = ResultFile::from_sic(&seed_sic(2).unwrap(), &ctx, manifest()).unwrap();
    let text = to_json_string(&file).unwrap();
    let cut = &text[..text.len() / 2];
    match parse_json::<ResultFile>(cut, "cut.json") {
        Err(simplexforge::Error::Parse { offset, .. }) => assert!(offset <= cut.len()),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let text = to_json_string(&vec![x]).unwrap();
        let back: Vec<f64> = parse_json(&text, "mem").unwrap();
        prop_assert_eq!(back[0].to_bits(), x.to_bits());
    }
}
