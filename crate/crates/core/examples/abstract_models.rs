//! Abstract the readers-writers counters with range cutpoints and compare
//! the abstract model with the concrete one. Each abstract value stands
//! for the concrete set its characteristic function describes.

use std::error::Error;

use fsm_rv::abstraction::AbstractValue;
use fsm_rv::generators::{generate, Scenario, ScenarioConfig};
use fsm_rv::model::{Cell, Model, ModelKind};
use fsm_rv::pipeline::{build_model, load_writes};
use fsm_rv::specfile::Spec;
use fsm_rv::value::Value;

pub fn run() -> Result<(usize, usize), Box<dyn Error>> {
    let pack = generate(&ScenarioConfig::new(Scenario::ReadersWriters, 11, 1500))?;
    let spec = Spec::parse(&pack.spec)?;
    let writes = load_writes(&spec, pack.trace.as_bytes())?;

    let dsm = build_model(&spec, ModelKind::Dsm, &writes)?;
    let Model::Graph(asm) = build_model(&spec, ModelKind::Asm, &writes)? else {
        unreachable!("abstract models are graphs")
    };
    println!("{} writes, DSM {} states, ASM {} states", writes.len(), dsm.state_count(), asm.state_count());

    for &i in &spec.abstracted() {
        let f = spec.function(i);
        println!("abs {} = {}", spec.schema().name(i), f.describe());
        for av in f.abstract_values().unwrap_or_default() {
            // The characteristic set decides membership without the bucket index.
            let set = f.characteristic(&av)?;
            let members: Vec<i64> = (-1..=3).filter(|&x| set.contains(&Value::Int(x))).collect();
            println!("  {:>4}  {:<6} holds {members:?} of -1..=3", av.to_string(), f.label(&av));
        }
    }

    println!("abstract states:");
    for (i, s) in asm.states().iter().enumerate() {
        let cells: Vec<String> = s
            .iter()
            .map(|c| match c {
                Cell::Abstract(AbstractValue::Unknown) | Cell::Undefined => "?".to_owned(),
                c => c.to_string(),
            })
            .collect();
        let out: u64 = asm.edges().iter().filter(|e| e.from == i).map(|e| e.count).sum();
        println!("  s{i} [{}] {out} outgoing transitions", cells.join(", "));
    }
    Ok((dsm.state_count(), asm.state_count()))
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
