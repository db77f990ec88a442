use std::collections::HashMap;

use super::control::{control_value, ControlLevel};
use super::derive::DerivationRule;
use super::event::Event;
use super::keys::KeyAttributeSet;
use super::TraceError;
use crate::model::Schema;
use crate::value::{Value, ValueTag};

/// A write on one component of the state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyWrite {
    pub seq: u64,
    /// Position of the attribute in the [`Schema`].
    pub attr: usize,
    pub value: Value,
}

/// Where a state attribute takes its values from.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrSource {
    /// Index into the key attribute set.
    Key(usize),
    Control(ControlLevel),
    /// Index into the derivation rules.
    Derived(usize),
}

/// Turns filtered trace events into [`KeyWrite`]s on the state vector.
///
/// Key attributes that feed a derivation rule are inputs only: their writes
/// update the rule history but do not appear as state components.
#[derive(Debug, Clone)]
pub struct Extractor {
    keys: KeyAttributeSet,
    rules: Vec<DerivationRule>,
    schema: Schema,
    key_slot: Vec<Option<usize>>,
    controls: Vec<(usize, ControlLevel)>,
    rule_slot: Vec<usize>,
    history: HashMap<String, Value>,
    last_seq: Option<u64>,
}

impl Extractor {
    /// `layout` lists the state attributes in vector order.
    pub fn new(
        keys: KeyAttributeSet,
        rules: Vec<DerivationRule>,
        layout: &[(String, AttrSource)],
    ) -> Result<Extractor, String> {
        let mut names = Vec::with_capacity(layout.len());
        let mut key_slot = vec![None; keys.len()];
        let mut controls = Vec::new();
        let mut rule_slot = vec![usize::MAX; rules.len()];
        for (slot, (name, source)) in layout.iter().enumerate() {
            let tag = match source {
                AttrSource::Key(k) => {
                    let attr = keys
                        .attributes()
                        .get(*k)
                        .ok_or_else(|| format!("layout refers to missing key #{k}"))?;
                    key_slot[*k] = Some(slot);
                    attr.tag
                }
                AttrSource::Control(level) => {
                    controls.push((slot, *level));
                    ValueTag::Str
                }
                AttrSource::Derived(r) => {
                    let rule = rules
                        .get(*r)
                        .ok_or_else(|| format!("layout refers to missing rule #{r}"))?;
                    rule_slot[*r] = slot;
                    match rule.func {
                        super::DeriveFn::Haversine => ValueTag::Real,
                        super::DeriveFn::Compass => ValueTag::Str,
                    }
                }
            };
            names.push((name.clone(), tag));
        }
        if let Some(r) = rule_slot.iter().position(|s| *s == usize::MAX) {
            return Err(format!("derived attribute `{}` is not in the layout", rules[r].out));
        }
        for rule in &rules {
            for input in rule.inputs() {
                match keys.get(input) {
                    Some(k) if k.tag.is_numeric() => {}
                    Some(_) => return Err(format!("derive input `{input}` must be numeric")),
                    None => return Err(format!("derive input `{input}` is not a key attribute")),
                }
            }
        }
        Ok(Extractor {
            keys,
            rules,
            schema: Schema::new(names),
            key_slot,
            controls,
            rule_slot,
            history: HashMap::new(),
            last_seq: None,
        })
    }

    /// Layout with every key attribute as a state component.
    pub fn from_keys(keys: KeyAttributeSet) -> Extractor {
        let layout: Vec<_> = keys
            .attributes()
            .iter()
            .enumerate()
            .map(|(i, k)| (k.name.clone(), AttrSource::Key(i)))
            .collect();
        Extractor::new(keys, Vec::new(), &layout).expect("key-only layout is always valid")
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn keys(&self) -> &KeyAttributeSet {
        &self.keys
    }

    /// Normalize one event. Method events only produce control writes.
    pub fn process(&mut self, event: &Event) -> Result<Vec<KeyWrite>, TraceError> {
        if let Some(prev) = self.last_seq {
            if event.seq <= prev {
                return Err(TraceError::SeqOrder {
                    prev,
                    seq: event.seq,
                });
            }
        }
        let mut out = Vec::new();
        for &(slot, level) in &self.controls {
            if let Some(v) = control_value(event, level)? {
                out.push(KeyWrite {
                    seq: event.seq,
                    attr: slot,
                    value: Value::Str(v),
                });
            }
        }
        if let Some((k, value)) = self.keys.match_index(event)? {
            if let Some(slot) = self.key_slot[k] {
                out.push(KeyWrite {
                    seq: event.seq,
                    attr: slot,
                    value: value.clone(),
                });
            }
            if !self.rules.is_empty() {
                let name = self.keys.attributes()[k].name.clone();
                self.history.insert(name.clone(), value.clone());
                for (r, rule) in self.rules.iter().enumerate() {
                    if !rule.inputs().contains(&name.as_str()) {
                        continue;
                    }
                    if let Some(v) = rule.evaluate(&self.history) {
                        out.push(KeyWrite {
                            seq: event.seq,
                            attr: self.rule_slot[r],
                            value: v,
                        });
                    }
                }
            }
        }
        self.last_seq = Some(event.seq);
        Ok(out)
    }

    /// Normalize a whole event sequence.
    pub fn run<I>(&mut self, events: I) -> Result<Vec<KeyWrite>, TraceError>
    where
        I: IntoIterator<Item = Result<Event, TraceError>>,
    {
        let mut out = Vec::new();
        for ev in events {
            out.extend(self.process(&ev?)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{DeriveFn, KeyAttribute};

    #[test]
    fn derived_inputs_are_not_state_components() {
        let keys = KeyAttributeSet::new(vec![
            KeyAttribute::new("lat", "geo.Pos.lat", ValueTag::Real).unwrap(),
            KeyAttribute::new("lon", "geo.Pos.lon", ValueTag::Real).unwrap(),
            KeyAttribute::new("a", "geo.Pos.alt", ValueTag::Real).unwrap(),
        ])
        .unwrap();
        let rule = DerivationRule {
            out: "d".into(),
            func: DeriveFn::Haversine,
            lat_attr: "lat".into(),
            lon_attr: "lon".into(),
            ref_lat: 0.0,
            ref_lon: 0.0,
            epsilon_m: 1.0,
        };
        let layout = vec![
            ("a".to_owned(), AttrSource::Key(2)),
            ("d".to_owned(), AttrSource::Derived(0)),
        ];
        let mut ex = Extractor::new(keys, vec![rule], &layout).unwrap();
        let ev = |seq, f: &str, v| Event::field_write(seq, "t", "geo.Pos", Some(1), f, Value::Real(v));
        assert!(ex.process(&ev(1, "lat", 0.0)).unwrap().is_empty());
        let w = ex.process(&ev(2, "lon", 0.001)).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].attr, 1);
        let w = ex.process(&ev(3, "alt", 5.0)).unwrap();
        assert_eq!(w, vec![KeyWrite { seq: 3, attr: 0, value: Value::Real(5.0) }]);
        assert!(ex.process(&ev(3, "alt", 5.0)).is_err());
    }

    #[test]
    fn control_attribute_tracks_method_entries() {
        let layout = vec![("loc".to_owned(), AttrSource::Control(ControlLevel::Class))];
        let mut ex = Extractor::new(KeyAttributeSet::default(), vec![], &layout).unwrap();
        let w = ex.process(&Event::method_entry(1, "t", "a.b.C.run")).unwrap();
        assert_eq!(w[0].value, Value::Str("a.b.C".into()));
        assert!(ex.process(&Event::method_exit(2, "t", "a.b.C.run")).unwrap().is_empty());
    }
}
