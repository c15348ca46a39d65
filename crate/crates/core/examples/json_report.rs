//! Reads a system file from JSON and prints the `index` report the command
//! line tool would write.

use maslovkit::harness::commands::{index_command, parse_omega, InputFile};
use maslovkit::harness::ReportDocument;
use maslovkit::index::IndexEngine;

const SYSTEM: &str = r#"{
  "schema_version": "1",
  "n": 1,
  "tau": 1.0,
  "kind": "piecewise-constant",
  "blocks": [
    {"until": 0.5, "matrix": [[3.0, 0.0], [0.0, 1.0]]},
    {"until": 1.0, "matrix": [[1.0, 0.5], [0.5, 2.0]]}
  ],
  "steps": 32,
  "label": "two blocks"
}"#;

pub fn run_example() -> ReportDocument {
    let input = InputFile {
        name: "two-blocks.json".into(),
        text: SYSTEM.into(),
    };
    let omega = parse_omega("1/3").unwrap();
    let report = index_command(&IndexEngine::default(), &input, &omega, None).unwrap();
    println!("{}", report.to_json());
    report
}

fn main() {
    run_example();
}
