use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Emitter;
use crate::value::Value;

pub const HOME_LAT: f64 = 47.397742;
pub const HOME_LON: f64 = 8.545594;

/// Radius of the circuit around home.
const RADIUS_M: f64 = 150.0;
const BREACH_M: f64 = 350.0;
const M_PER_DEG: f64 = 6_371_000.0 * std::f64::consts::PI / 180.0;

pub fn spec() -> &'static str {
    r#"# two laps around home at rising altitudes, then return and land
key lat = jmavsim.LatLonAlt.lat : real
key lon = jmavsim.LatLonAlt.lon : real
key a = jmavsim.LatLonAlt.alt : real
derive d = haversine(lat, lon, 47.397742, 8.545594)
derive dir = compass(lat, lon, 47.397742, 8.545594, 2.5)
filter jmavsim.*
abs a = range[324:362:365:385:386:410:411]
abs dir = bool(dir == "C")
prop home = G[a <= 325 -> dir == "C"]
prop returns = G[(a > 325 && dir != "C") -> F[a <= 325 && dir == "C"]]
prop fence = G[d >= 0 && d <= 300]
"#
}

/// One leg of the flight: altitude band and horizontal track as functions
/// of progress `t` in [0, 1].
struct Leg {
    share: f64,
    alt: fn(f64) -> f64,
    /// (north, east) offset from home in meters.
    pos: fn(f64, bool) -> (f64, f64),
    /// Hovering over home: position noise stays inside the `C` radius.
    over_home: bool,
}

fn home(_: f64, _: bool) -> (f64, f64) {
    (0.0, 0.0)
}

fn at_p(_: f64, _: bool) -> (f64, f64) {
    (RADIUS_M, 0.0)
}

fn lap(t: f64, wide: bool) -> (f64, f64) {
    let r = if wide { RADIUS_M + (BREACH_M - RADIUS_M) * (t * TAU / 2.0).sin().max(0.0) } else { RADIUS_M };
    let a = t * TAU;
    (r * a.cos(), r * a.sin())
}

const LEGS: [Leg; 11] = [
    Leg { share: 0.06, alt: |_| 323.0, pos: home, over_home: true },
    Leg { share: 0.08, alt: |t| 323.0 + 40.5 * t, pos: home, over_home: true },
    Leg { share: 0.08, alt: |_| 363.5, pos: |t, _| (RADIUS_M * t, 0.0), over_home: false },
    Leg { share: 0.04, alt: |t| 363.5 + 22.0 * t, pos: at_p, over_home: false },
    Leg { share: 0.22, alt: |_| 385.5, pos: lap, over_home: false },
    Leg { share: 0.04, alt: |t| 385.5 + 25.0 * t, pos: at_p, over_home: false },
    Leg { share: 0.22, alt: |_| 410.5, pos: lap, over_home: false },
    Leg { share: 0.05, alt: |t| 410.5 - 47.5 * t, pos: at_p, over_home: false },
    Leg { share: 0.08, alt: |_| 363.0, pos: |t, _| (RADIUS_M * (1.0 - t), 0.0), over_home: false },
    Leg { share: 0.08, alt: |t| 363.0 - 40.0 * t, pos: home, over_home: true },
    Leg { share: 0.05, alt: |_| 323.0, pos: home, over_home: true },
];

/// Keep jittered altitudes inside the band their leg targets, so bucket
/// boundaries are crossed only while climbing or descending.
fn jitter_alt(rng: &mut ChaCha8Rng, a: f64, level: bool) -> f64 {
    if !level {
        return a;
    }
    a + rng.gen_range(-0.35..0.35)
}

pub fn run(rng: &mut ChaCha8Rng, target: usize, bug: Option<&str>) -> Emitter {
    let breach = bug == Some("geofence_breach");
    let mut out = Emitter::default();
    // The first sample yields 3 state writes (lon completes the position,
    // alt starts at 0), later ones 5.
    let samples = 1 + target.saturating_sub(3).div_ceil(5);
    let cos_lat = HOME_LAT.to_radians().cos();
    let emit = |out: &mut Emitter, north: f64, east: f64, alt: f64, first: bool| {
        let lat = HOME_LAT + north / M_PER_DEG;
        let lon = HOME_LON + east / (M_PER_DEG * cos_lat);
        let thread = "sensor";
        out.field(thread, "jmavsim.LatLonAlt", 1, "lat", Value::Real(lat), if first { 0 } else { 2 });
        out.field(thread, "jmavsim.LatLonAlt", 1, "lon", Value::Real(lon), 2);
        out.field(thread, "jmavsim.LatLonAlt", 1, "alt", Value::Real(alt), 1);
    };
    emit(&mut out, 0.0, 0.0, 0.0, true);
    let flight = samples - 1;
    let mut counts: Vec<usize> = LEGS.iter().map(|l| ((l.share * flight as f64) as usize).max(1)).collect();
    let total: usize = counts.iter().sum();
    if total < flight {
        counts[0] += flight - total;
    }
    for (k, (leg, &n)) in LEGS.iter().zip(&counts).enumerate() {
        let level = [0, 2, 4, 6, 8, 10].contains(&k);
        for i in 0..n {
            let t = if n == 1 { 1.0 } else { i as f64 / (n - 1) as f64 };
            let (mut north, mut east) = (leg.pos)(t, breach && k == 6);
            let wobble = if leg.over_home { 0.4 } else { 1.5 };
            north += rng.gen_range(-wobble..wobble);
            east += rng.gen_range(-wobble..wobble);
            let alt = jitter_alt(rng, (leg.alt)(t), level);
            emit(&mut out, north, east, alt, false);
        }
    }
    out
}
