//! Dump a distinct state model as JSON, read it back, and render it as
//! Graphviz DOT with the states that violate a property highlighted.

use std::error::Error;

use fsm_rv::checker::{check, CheckOptions};
use fsm_rv::export::{from_json, to_dot, to_json, Color, LabelMode, RenderOptions};
use fsm_rv::generators::{generate, Scenario, ScenarioConfig};
use fsm_rv::model::{state_key, ModelKind};
use fsm_rv::pipeline::{build_model, load_writes};
use fsm_rv::specfile::Spec;

pub fn run() -> Result<String, Box<dyn Error>> {
    let pack = generate(&ScenarioConfig::new(Scenario::Dining, 9, 400).with_bug("adjacent_eating"))?;
    let spec = Spec::parse(&pack.spec)?;
    let writes = load_writes(&spec, pack.trace.as_bytes())?;
    let model = build_model(&spec, ModelKind::Dsm, &writes)?;

    let dump = to_json(&model);
    let model = from_json(&dump)?;
    println!("dump: {} bytes, {} states after reload", dump.len(), model.state_count());

    let safety = &spec.prop("safety").ok_or("no safety property")?.expr;
    let mut opts = RenderOptions {
        labels: LabelMode::Compact,
        ..Default::default()
    };
    if let Some(w) = check(&model, safety, &CheckOptions::default())?.witness {
        opts.highlight.insert(state_key(model.schema(), &w.cells), Color::Red);
    }
    let dot = to_dot(&model, &opts);
    println!("{dot}");
    Ok(dot)
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
