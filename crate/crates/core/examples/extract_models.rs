//! Build the linear and distinct state models of a small hand-written
//! trace: a bounded counter shared by two threads.

use std::error::Error;

use fsm_rv::model::{state_key, Model, ModelKind};
use fsm_rv::pipeline::{build_model, load_writes};
use fsm_rv::specfile::Spec;
use fsm_rv::trace::Event;
use fsm_rv::value::Value;

const SPEC: &str = "\
key n = demo.Counter:1.n : int
key full = demo.Counter:1.full : bool
filter demo.*
";

/// A counter that climbs to 3, wraps, and climbs again.
pub fn trace() -> String {
    let mut out = String::new();
    let mut seq = 0;
    let mut write = |out: &mut String, field: &str, v: Value| {
        seq += 1;
        let thread = if seq % 2 == 0 { "t1" } else { "t2" };
        out.push_str(&Event::field_write(seq, thread, "demo.Counter", Some(1), field, v).to_record());
        out.push('\n');
    };
    write(&mut out, "full", Value::Bool(false));
    for _ in 0..2 {
        for n in 0..=3 {
            write(&mut out, "n", Value::Int(n));
        }
        write(&mut out, "full", Value::Bool(true));
        write(&mut out, "full", Value::Bool(false));
    }
    // Writes outside the filter never reach the model.
    seq += 1;
    out.push_str(&Event::field_write(seq, "t1", "other.Log", None, "line", Value::Str("x".into())).to_record());
    out.push('\n');
    out
}

pub fn run() -> Result<(usize, usize), Box<dyn Error>> {
    let spec = Spec::parse(SPEC)?;
    let writes = load_writes(&spec, trace().as_bytes())?;
    println!("{} key writes", writes.len());

    let lsm = build_model(&spec, ModelKind::Lsm, &writes)?;
    let dsm = build_model(&spec, ModelKind::Dsm, &writes)?;
    println!("LSM: {} states (one per write plus the start)", lsm.state_count());
    println!("DSM: {} distinct states", dsm.state_count());
    if let Model::Graph(g) = &dsm {
        for e in g.edges() {
            println!(
                "  {} -> {}  x{}",
                state_key(g.schema(), g.state(e.from)),
                state_key(g.schema(), g.state(e.to)),
                e.count
            );
        }
    }
    Ok((lsm.state_count(), dsm.state_count()))
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
