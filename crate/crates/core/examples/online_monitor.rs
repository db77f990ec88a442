//! Monitor a program online: a client streams the trace of a faulty
//! readers-writers run over TCP and receives violation notifications on
//! the same connection while it is still sending.

use std::error::Error;
use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, TcpStream};
use std::thread;

use fsm_rv::generators::{generate, Scenario, ScenarioConfig};
use fsm_rv::online::{start_session, Report, Session, SessionOptions};
use fsm_rv::specfile::Spec;

pub fn run() -> Result<(Vec<String>, Report), Box<dyn Error>> {
    let pack = generate(&ScenarioConfig::new(Scenario::ReadersWriters, 4, 1200).with_priority().with_bug("rw_overlap"))?;
    let spec = Spec::parse(&pack.spec)?;
    let session = Session::new(spec, SessionOptions::default())?;
    let handle = start_session("127.0.0.1:0", session)?;
    let addr = handle.addr();
    println!("monitor listening on {addr}");

    // The monitored program: send every record, then close its side.
    let stream = TcpStream::connect(addr)?;
    let mut tx = stream.try_clone()?;
    let trace = pack.trace.clone();
    let sender = thread::spawn(move || -> std::io::Result<()> {
        tx.write_all(trace.as_bytes())?;
        tx.shutdown(Shutdown::Write)
    });

    let mut lines = Vec::new();
    for line in BufReader::new(stream).lines() {
        let line = line?;
        println!("<- {line}");
        lines.push(line);
    }
    sender.join().expect("sender panicked")?;
    let outcome = handle.wait()?;
    println!(
        "{} events, {} states, {} validity checks",
        outcome.report.events, outcome.report.states, outcome.report.validity_checks
    );
    Ok((lines, outcome.report))
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
