//! Attributes computed from other key attributes, such as the distance and
//! compass heading of a GPS position relative to a home point.

use std::collections::HashMap;

use crate::value::Value;

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
pub const DEFAULT_EPSILON_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeriveFn {
    Haversine,
    Compass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivationRule {
    pub out: String,
    pub func: DeriveFn,
    pub lat_attr: String,
    pub lon_attr: String,
    pub ref_lat: f64,
    pub ref_lon: f64,
    /// Radius inside which `compass` yields `"C"`.
    pub epsilon_m: f64,
}

impl DerivationRule {
    pub fn inputs(&self) -> [&str; 2] {
        [&self.lat_attr, &self.lon_attr]
    }

    /// Evaluate from the latest input values; `None` while any input is
    /// still undefined.
    pub fn evaluate(&self, history: &HashMap<String, Value>) -> Option<Value> {
        let lat = history.get(&self.lat_attr)?.as_f64()?;
        let lon = history.get(&self.lon_attr)?.as_f64()?;
        Some(match self.func {
            DeriveFn::Haversine => Value::Real(haversine(self.ref_lat, self.ref_lon, lat, lon)),
            DeriveFn::Compass => Value::Str(
                compass(self.ref_lat, self.ref_lon, lat, lon, self.epsilon_m).to_owned(),
            ),
        })
    }
}

/// Great-circle distance in meters between two coordinates given in degrees.
pub fn haversine(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = (lat2 - lat1).to_radians();
    let dl = (lon2 - lon1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Initial bearing from the first point to the second, degrees in [0, 360).
pub fn bearing(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dl = (lon2 - lon1).to_radians();
    let y = dl.sin() * p2.cos();
    let x = p1.cos() * p2.sin() - p1.sin() * p2.cos() * dl.cos();
    y.atan2(x).to_degrees().rem_euclid(360.0)
}

const SECTORS: [&str; 8] = ["N", "NE", "E", "SE", "S", "SW", "W", "NW"];

/// Eight 45° sectors, `N` covering bearings in [-22.5°, 22.5°).
pub fn compass(ref_lat: f64, ref_lon: f64, lat: f64, lon: f64, epsilon_m: f64) -> &'static str {
    if haversine(ref_lat, ref_lon, lat, lon) < epsilon_m {
        return "C";
    }
    let b = bearing(ref_lat, ref_lon, lat, lon);
    let idx = ((b + 22.5).rem_euclid(360.0) / 45.0).floor() as usize % 8;
    SECTORS[idx]
}

/// Writes produced for `rules` once `changed` received a new value.
/// `history` must already hold the new value.
pub fn derive_attributes(
    changed: &str,
    rules: &[DerivationRule],
    history: &HashMap<String, Value>,
) -> Vec<(String, Value)> {
    rules
        .iter()
        .filter(|r| r.inputs().contains(&changed))
        .filter_map(|r| r.evaluate(history).map(|v| (r.out.clone(), v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(func: DeriveFn) -> DerivationRule {
        DerivationRule {
            out: "o".into(),
            func,
            lat_attr: "lat".into(),
            lon_attr: "lon".into(),
            ref_lat: 0.0,
            ref_lon: 0.0,
            epsilon_m: DEFAULT_EPSILON_M,
        }
    }

    fn hist(lat: f64, lon: f64) -> HashMap<String, Value> {
        HashMap::from([
            ("lat".to_owned(), Value::Real(lat)),
            ("lon".to_owned(), Value::Real(lon)),
        ])
    }

    /// Spherical law of cosines, independent of the haversine route.
    fn cosine_law(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
        let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
        let dl = (lon2 - lon1).to_radians();
        let c = (p1.sin() * p2.sin() + p1.cos() * p2.cos() * dl.cos()).clamp(-1.0, 1.0);
        EARTH_RADIUS_M * c.acos()
    }

    #[test]
    fn zero_distance_at_reference() {
        let h = hist(0.0, 0.0);
        assert_eq!(rule(DeriveFn::Haversine).evaluate(&h), Some(Value::Real(0.0)));
        assert_eq!(rule(DeriveFn::Compass).evaluate(&h), Some(Value::Str("C".into())));
    }

    #[test]
    fn thousandth_degree_of_longitude_at_equator() {
        let d = haversine(0.0, 0.0, 0.0, 0.001);
        let oracle = cosine_law(0.0, 0.0, 0.0, 0.001);
        assert!((oracle - 111.19).abs() < 0.1, "oracle {oracle}");
        assert!((d - oracle).abs() < 0.1, "{d} vs {oracle}");
    }

    #[test]
    fn compass_sectors() {
        assert_eq!(compass(0.0, 0.0, 0.01, 0.0, 1.0), "N");
        assert_eq!(compass(0.0, 0.0, 0.0, 0.01, 1.0), "E");
        assert_eq!(compass(0.0, 0.0, -0.01, 0.0, 1.0), "S");
        assert_eq!(compass(0.0, 0.0, 0.0, -0.01, 1.0), "W");
        assert_eq!(compass(0.0, 0.0, 0.01, 0.01, 1.0), "NE");
        assert_eq!(compass(0.0, 0.0, -0.01, -0.01, 1.0), "SW");
        assert_eq!(compass(0.0, 0.0, 0.000001, 0.0, 1.0), "C");
    }

    #[test]
    fn undefined_inputs_emit_nothing() {
        let only_lat = HashMap::from([("lat".to_owned(), Value::Real(1.0))]);
        assert!(derive_attributes("lat", &[rule(DeriveFn::Haversine)], &only_lat).is_empty());
        let both = hist(0.0, 0.001);
        let out = derive_attributes("lon", &[rule(DeriveFn::Haversine)], &both);
        assert_eq!(out.len(), 1);
        assert!(derive_attributes("alt", &[rule(DeriveFn::Haversine)], &both).is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn haversine_identity_and_symmetry(
                lat1 in -89.0f64..89.0, lon1 in -179.0f64..179.0,
                lat2 in -89.0f64..89.0, lon2 in -179.0f64..179.0,
            ) {
                prop_assert_eq!(haversine(lat1, lon1, lat1, lon1), 0.0);
                let a = haversine(lat1, lon1, lat2, lon2);
                let b = haversine(lat2, lon2, lat1, lon1);
                prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
            }
        }
    }
}
