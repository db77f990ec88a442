//! Drone flight over a range abstraction of altitude, with distance and
//! compass direction derived from latitude and longitude.

use std::error::Error;

use fsm_rv::checker::{CheckOptions, VerdictValue};
use fsm_rv::generators::{generate, Scenario, ScenarioConfig, HOME_LAT, HOME_LON};
use fsm_rv::model::ModelKind;
use fsm_rv::pipeline::{build_asm_over, load_writes, Workbench};
use fsm_rv::specfile::Spec;
use fsm_rv::trace::{compass, haversine};

pub fn flight(cfg: &ScenarioConfig) -> Result<(usize, Vec<(String, VerdictValue)>), Box<dyn Error>> {
    let pack = generate(cfg)?;
    let spec = Spec::parse(&pack.spec)?;
    let writes = load_writes(&spec, pack.trace.as_bytes())?;
    let a = spec.schema().index("a").ok_or("no altitude attribute")?;
    let asm = build_asm_over(&spec, &[a], &writes)?;
    println!("  {} writes, altitude ASM {} states", writes.len(), asm.state_count());

    let wb = Workbench::new(&spec, &writes, CheckOptions::default());
    let mut out = Vec::new();
    for (name, kind) in [("home", ModelKind::Asm), ("fence", ModelKind::Lsm), ("returns", ModelKind::Lsm)] {
        let decl = spec.prop(name).ok_or("missing property")?;
        let v = wb.check(decl, kind)?;
        println!("  {name} on {kind}: {} ({})", v.value.as_str(), v.detail);
        out.push((name.to_owned(), v.value));
    }
    Ok((asm.state_count(), out))
}

pub fn run() -> Result<Vec<(usize, Vec<(String, VerdictValue)>)>, Box<dyn Error>> {
    // 150 m north of home.
    let lat = HOME_LAT + 150.0 / 111_194.9;
    println!(
        "150 m north: haversine {:.1} m, compass {}",
        haversine(HOME_LAT, HOME_LON, lat, HOME_LON),
        compass(HOME_LAT, HOME_LON, lat, HOME_LON, 2.5)
    );
    let cfg = ScenarioConfig::new(Scenario::Drone, 2, 3000);
    println!("nominal flight:");
    let a = flight(&cfg)?;
    println!("geofence_breach:");
    let b = flight(&cfg.with_bug("geofence_breach"))?;
    Ok(vec![a, b])
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
