use eitslm::config::{PipelineConfig, Request};
use eitslm::io::{FieldGridFile, Manifest};
use eitslm::pipeline::run_pipeline;
use std::fs;
use std::path::Path;

fn run_preset(name: &str, dir: &Path) -> eitslm::pipeline::PipelineSummary {
    let mut cfg = PipelineConfig::preset(name).unwrap();
    cfg.output.dir = dir.to_path_buf();
    run_pipeline(&cfg).unwrap()
}

#[test]
fn phase_demo_produces_a_charge_one_vortex() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_preset("phase-demo", dir.path());
    assert_eq!(s.get("oam_dominant"), Some("1"));
    assert_eq!(s.get("winding_r0.5w"), Some("1"));
    let d: f64 = s.get("cell_thickness_um").unwrap().parse().unwrap();
    assert!((d - 862.0).abs() < 0.03 * 862.0);
    let tmin: f64 = s.get("transmission_min").unwrap().parse().unwrap();
    assert!(tmin > 0.9);
    for f in [
        "pattern_intensity.eitf",
        "transfer_phase.eitf",
        "field_out.eitf",
        "far_field.eitf",
        "oam.csv",
        "lg.csv",
        "profile.csv",
        "switching.csv",
        "switching.txt",
        "analysis.txt",
        "manifest.txt",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let profile = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(profile.starts_with("phi_rad,intensity_mw_cm2,transmission,chi_re,chi_im,phase_rad\n"));
    assert_eq!(profile.lines().count(), 362);
    let field = FieldGridFile::read(&dir.path().join("field_out.eitf")).unwrap();
    assert_eq!((field.nx(), field.ny()), (512, 512));
    assert_eq!(
        fs::metadata(dir.path().join("field_out.eitf"))
            .unwrap()
            .len(),
        32 + 512 * 512 * 16
    );
}

#[test]
fn amplitude_demo_orders_carry_opposite_charge() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_preset("amplitude-demo", dir.path());
    assert_eq!(s.get("order1_winding"), Some("1"));
    assert_eq!(s.get("order-1_winding"), Some("-1"));
    assert!(dir.path().join("orders.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::preset("amplitude-demo").unwrap();
    cfg.grid.n = 128;
    cfg.probe.waist_um = 250.0;
    cfg.analysis.requests = vec![Request::Transmission, Request::Switching];
    cfg.output.dir = a.path().to_path_buf();
    run_pipeline(&cfg).unwrap();
    cfg.output.dir = b.path().to_path_buf();
    run_pipeline(&cfg).unwrap();
    let ma = fs::read_to_string(a.path().join(Manifest::FILE_NAME)).unwrap();
    let mb = fs::read_to_string(b.path().join(Manifest::FILE_NAME)).unwrap();
    assert!(!ma.is_empty());
    assert_eq!(ma, mb);
}

#[test]
fn empty_analysis_still_writes_fields() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::preset("phase-demo").unwrap();
    cfg.grid.n = 128;
    cfg.grid.pitch_um = 64.0;
    cfg.analysis.requests.clear();
    cfg.far_field.enabled = false;
    cfg.output.dir = dir.path().to_path_buf();
    let s = run_pipeline(&cfg).unwrap();
    let manifest = fs::read_to_string(&s.manifest).unwrap();
    assert!(manifest.contains("pattern_intensity.eitf"));
    assert!(manifest.contains("field_out.eitf"));
    assert!(!manifest.contains("far_field.eitf"));
    assert!(!dir.path().join("oam.csv").exists());
}

#[test]
fn png_previews_are_optional() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::preset("phase-demo").unwrap();
    cfg.grid.n = 64;
    cfg.grid.pitch_um = 80.0;
    cfg.probe.waist_um = 500.0;
    cfg.analysis.requests.clear();
    cfg.output.png = true;
    cfg.output.dir = dir.path().to_path_buf();
    run_pipeline(&cfg).unwrap();
    assert!(dir.path().join("pattern.png").exists());
    assert!(dir.path().join("far_field.png").exists());
}
