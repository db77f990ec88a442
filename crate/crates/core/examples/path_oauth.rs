//! Path abstraction on the OAuth scheduler: keep only the request, grant
//! and resource states and check that every path from a request to a
//! delivered resource passes through a grant.

use std::error::Error;

use fsm_rv::checker::{check_lsm, check_path, CheckOptions, VerdictValue};
use fsm_rv::generators::{generate, Scenario, ScenarioConfig};
use fsm_rv::model::{build_lsm, state_key, Model, ModelKind};
use fsm_rv::pipeline::{build_model, load_writes};
use fsm_rv::specfile::Spec;

pub fn check(cfg: &ScenarioConfig) -> Result<(usize, VerdictValue, VerdictValue), Box<dyn Error>> {
    let pack = generate(cfg)?;
    let spec = Spec::parse(&pack.spec)?;
    let writes = load_writes(&spec, pack.trace.as_bytes())?;
    let decl = spec.prop("authorized").ok_or("pack without the path declaration")?;

    let Model::Graph(path) = build_model(&spec, ModelKind::Path, &writes)? else {
        unreachable!("path models are graphs")
    };
    let abs = check_path(&path, &decl.expr)?;
    let lsm = build_lsm(spec.schema(), writes.iter().cloned());
    let concrete = check_lsm(&lsm, &decl.expr, &CheckOptions::default())?;

    println!("  {} writes -> {} path states", writes.len(), path.state_count());
    for e in path.edges() {
        println!(
            "    {} -> {} x{}",
            state_key(path.schema(), path.state(e.from)),
            state_key(path.schema(), path.state(e.to)),
            e.count
        );
    }
    println!("  path model: {} ({})", abs.value.as_str(), abs.detail);
    println!("  linear model: {} ({})", concrete.value.as_str(), concrete.detail);
    Ok((path.state_count(), abs.value, concrete.value))
}

pub fn run() -> Result<Vec<(usize, VerdictValue, VerdictValue)>, Box<dyn Error>> {
    let ok = ScenarioConfig::new(Scenario::OAuth, 5, 800);
    println!("correct sessions:");
    let a = check(&ok)?;
    println!("skip_auth:");
    let b = check(&ok.with_bug("skip_auth"))?;
    Ok(vec![a, b])
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
