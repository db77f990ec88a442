//! A control attribute tracks which method the program last entered, so
//! the model shows control flow next to data. Here a connection pool
//! must never hand out a connection while it is being drained.

use std::error::Error;

use fsm_rv::checker::CheckOptions;
use fsm_rv::model::{state_key, Model, ModelKind};
use fsm_rv::pipeline::{build_model, load_writes, Workbench};
use fsm_rv::specfile::Spec;
use fsm_rv::trace::Event;
use fsm_rv::value::Value;

const SPEC: &str = "\
key open = pool.Pool:1.open : int
control at = method
filter pool.*
prop no_lease_while_draining = G[at == \"pool.Pool.drain\" -> open' <= open]
";

fn trace(lease_in_drain: bool) -> String {
    let mut events = Vec::new();
    let mut seq = 0;
    let mut next = || {
        seq += 1;
        seq
    };
    let mut open = 0;
    for round in 0..3 {
        for _ in 0..2 {
            events.push(Event::method_entry(next(), "worker", "pool.Pool.lease"));
            open += 1;
            events.push(Event::field_write(next(), "worker", "pool.Pool", Some(1), "open", Value::Int(open)));
        }
        events.push(Event::method_entry(next(), "admin", "pool.Pool.drain"));
        let mut sneak = lease_in_drain && round == 1;
        while open > 0 {
            open -= 1;
            events.push(Event::field_write(next(), "admin", "pool.Pool", Some(1), "open", Value::Int(open)));
            if sneak && open == 1 {
                sneak = false;
                open += 1;
                events.push(Event::field_write(next(), "worker", "pool.Pool", Some(1), "open", Value::Int(open)));
            }
        }
    }
    events.iter().map(|e| e.to_record() + "\n").collect()
}

pub fn run() -> Result<Vec<bool>, Box<dyn Error>> {
    let spec = Spec::parse(SPEC)?;
    let mut out = Vec::new();
    for faulty in [false, true] {
        let writes = load_writes(&spec, trace(faulty).as_bytes())?;
        let Model::Graph(dsm) = build_model(&spec, ModelKind::Dsm, &writes)? else {
            unreachable!("distinct models are graphs")
        };
        println!("{} run: {} distinct states", if faulty { "faulty" } else { "clean" }, dsm.state_count());
        for s in dsm.states() {
            println!("  {}", state_key(dsm.schema(), s));
        }
        let wb = Workbench::new(&spec, &writes, CheckOptions::default());
        let v = wb.check(&spec.props()[0], ModelKind::Lsm)?;
        println!("  {}: {}", v.value.as_str(), v.detail);
        out.push(v.is_true());
    }
    Ok(out)
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
