//! Check the dining philosophers safety property on the linear, distinct
//! and abstract models of a correct run and of a run where two neighbors
//! eat at once.

use std::error::Error;

use fsm_rv::checker::{CheckOptions, VerdictValue};
use fsm_rv::generators::{generate, Scenario, ScenarioConfig};
use fsm_rv::model::ModelKind;
use fsm_rv::pipeline::{load_writes, Workbench};
use fsm_rv::specfile::Spec;

pub fn verdicts(cfg: &ScenarioConfig) -> Result<Vec<(ModelKind, VerdictValue)>, Box<dyn Error>> {
    let pack = generate(cfg)?;
    let spec = Spec::parse(&pack.spec)?;
    let writes = load_writes(&spec, pack.trace.as_bytes())?;
    let wb = Workbench::new(&spec, &writes, CheckOptions::default());
    let safety = spec.prop("safety").ok_or("pack without a safety property")?;
    let mut out = Vec::new();
    for kind in [ModelKind::Lsm, ModelKind::Dsm, ModelKind::Asm] {
        let v = wb.check(safety, kind)?;
        println!("  {kind}: {} ({})", v.value.as_str(), v.detail);
        if let Some(w) = &v.witness {
            let state: Vec<String> = w.vector.iter().map(|(k, x)| format!("{k}={x}")).collect();
            println!("    witness at seq {:?}: {}", w.seq, state.join(", "));
        }
        out.push((kind, v.value));
    }
    Ok(out)
}

pub fn run() -> Result<Vec<Vec<(ModelKind, VerdictValue)>>, Box<dyn Error>> {
    let correct = ScenarioConfig::new(Scenario::Dining, 3, 1000);
    let buggy = correct.clone().with_bug("adjacent_eating");
    println!("correct run:");
    let a = verdicts(&correct)?;
    println!("adjacent_eating:");
    let b = verdicts(&buggy)?;
    Ok(vec![a, b])
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
