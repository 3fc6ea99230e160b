#![allow(dead_code)]

use matra::core::engine::{assess, resolve_configuration, Assessment};
use matra::core::model::{Configuration, ThreatModel};
use matra::io::load_model;

pub fn model() -> ThreatModel {
    load_model(matra::OPENCLAW_MODEL.as_bytes()).expect("shipped model loads")
}

pub fn config(model: &ThreatModel, id: &str) -> Configuration {
    resolve_configuration(model, id).expect("configuration exists")
}

pub fn run(model: &ThreatModel, scenario: &str, source: &str, config_id: &str) -> Assessment {
    assess(model, scenario, source, &config(model, config_id)).expect("assessable")
}

pub fn model_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models/openclaw.matra.json")
}
