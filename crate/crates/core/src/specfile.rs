//! The scenario spec file: key attributes, control and derived attributes,
//! inclusion filter, abstractions, and the properties to check.
//!
//! ```text
//! # dining philosophers
//! key p1 = phil.Philosopher:1.state : str
//! control loc = class
//! derive d = haversine(lat, lon, 47.3977, 8.5456)
//! filter phil.*
//! abs p1 = bool(p1 == "E")
//! prop safety = G[p1 == "E" -> p2 != "E"]
//! path auth on s = (s == "req") ~~> (s == "granted") ~~> (s == "sent")
//! buffer 4096
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::abstraction::{AbstractionFunction, PathSpec};
use crate::model::Schema;
use crate::propspec::{parse_property, Expr};
use crate::trace::{
    AttrSource, ControlLevel, DerivationRule, DeriveFn, Extractor, InclusionFilter, KeyAttribute,
    KeyAttributeSet, KeyWrite, DEFAULT_EPSILON_M,
};
use crate::value::ValueTag;

pub const DEFAULT_BUFFER: usize = 1024;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read spec file: {0}")]
    Io(#[from] std::io::Error),
}

/// A `prop` or `path` declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct PropDecl {
    pub name: String,
    pub expr: Expr,
    /// Control attribute of a `path` declaration.
    pub path_attr: Option<String>,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct Spec {
    keys: KeyAttributeSet,
    rules: Vec<DerivationRule>,
    filter: InclusionFilter,
    layout: Vec<(String, AttrSource)>,
    schema: Schema,
    abstractions: BTreeMap<usize, AbstractionFunction>,
    props: Vec<PropDecl>,
    buffer: usize,
}

fn syntax(line: usize, message: impl Into<String>) -> SpecError {
    SpecError::Syntax {
        line,
        message: message.into(),
    }
}

fn split_eq(rest: &str) -> Option<(&str, &str)> {
    let (a, b) = rest.split_once('=')?;
    Some((a.trim(), b.trim()))
}

fn parse_derive(out: &str, text: &str) -> Result<DerivationRule, String> {
    let (fname, args) = text
        .split_once('(')
        .and_then(|(f, a)| Some((f.trim(), a.trim().strip_suffix(')')?)))
        .ok_or("expected haversine(...) or compass(...)")?;
    let func = match fname {
        "haversine" => DeriveFn::Haversine,
        "compass" => DeriveFn::Compass,
        other => return Err(format!("unknown derivation `{other}`")),
    };
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let max = if func == DeriveFn::Compass { 5 } else { 4 };
    if args.len() < 4 || args.len() > max {
        return Err(format!("{fname} takes (lat, lon, refLat, refLon{})", if max == 5 { "[, epsilon]" } else { "" }));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    let epsilon_m = match args.get(4) {
        Some(e) => num(e)?,
        None => DEFAULT_EPSILON_M,
    };
    if epsilon_m <= 0.0 {
        return Err("epsilon must be positive".into());
    }
    Ok(DerivationRule {
        out: out.to_owned(),
        func,
        lat_attr: args[0].to_owned(),
        lon_attr: args[1].to_owned(),
        ref_lat: num(args[2])?,
        ref_lon: num(args[3])?,
        epsilon_m,
    })
}

impl Spec {
    pub fn load(path: &Path) -> Result<Spec, SpecError> {
        Spec::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Spec, SpecError> {
        let mut keys = KeyAttributeSet::default();
        let mut rules = Vec::new();
        let mut filter = InclusionFilter::include_all();
        let mut order: Vec<(String, usize, AttrSource)> = Vec::new();
        let mut abs_lines: Vec<(usize, String, String)> = Vec::new();
        let mut props: Vec<PropDecl> = Vec::new();
        let mut buffer = DEFAULT_BUFFER;

        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match word {
                "key" => {
                    let (name, sel) = split_eq(rest).ok_or_else(|| syntax(n, "expected `key <name> = <selector> : <type>`"))?;
                    let (sel, tag) = sel
                        .rsplit_once(':')
                        .filter(|(_, t)| !t.trim().chars().all(|c| c.is_ascii_digit()))
                        .ok_or_else(|| syntax(n, "missing `: <type>` after the selector"))?;
                    let tag: ValueTag = tag.trim().parse().map_err(|e: String| syntax(n, e))?;
                    let attr = KeyAttribute::new(name, sel.trim(), tag).map_err(|e| syntax(n, e))?;
                    keys.push(attr).map_err(|e| syntax(n, e))?;
                    order.push((name.to_owned(), n, AttrSource::Key(keys.len() - 1)));
                }
                "control" => {
                    let (name, level) = split_eq(rest).ok_or_else(|| syntax(n, "expected `control <name> = <level>`"))?;
                    let level: ControlLevel = level.parse().map_err(|e: String| syntax(n, e))?;
                    order.push((name.to_owned(), n, AttrSource::Control(level)));
                }
                "derive" => {
                    let (name, body) = split_eq(rest).ok_or_else(|| syntax(n, "expected `derive <name> = <fn>(...)`"))?;
                    rules.push(parse_derive(name, body).map_err(|e| syntax(n, e))?);
                    order.push((name.to_owned(), n, AttrSource::Derived(rules.len() - 1)));
                }
                "filter" => {
                    if rest.is_empty() || rest.contains(char::is_whitespace) {
                        return Err(syntax(n, "expected `filter <prefix-pattern>`"));
                    }
                    filter.push(rest);
                }
                "abs" => {
                    let (name, body) = split_eq(rest).ok_or_else(|| syntax(n, "expected `abs <attr> = <abstraction>`"))?;
                    abs_lines.push((n, name.to_owned(), body.to_owned()));
                }
                "prop" => {
                    let (name, body) = split_eq(rest).ok_or_else(|| syntax(n, "expected `prop <name> = <property>`"))?;
                    let expr = parse_property(body).map_err(|e| syntax(n, e.to_string()))?;
                    props.push(PropDecl {
                        name: name.to_owned(),
                        expr,
                        path_attr: None,
                        line: n,
                    });
                }
                "path" => {
                    let (head, body) = split_eq(rest).ok_or_else(|| syntax(n, "expected `path <name> on <attr> = (f1) ~~> (f2) ~~> (f3)`"))?;
                    let mut words = head.split_whitespace();
                    let (Some(name), Some("on"), Some(attr), None) = (words.next(), words.next(), words.next(), words.next()) else {
                        return Err(syntax(n, "expected `path <name> on <attr> = ...`"));
                    };
                    let expr = parse_property(&format!("P[{body}]")).map_err(|e| syntax(n, e.to_string()))?;
                    props.push(PropDecl {
                        name: name.to_owned(),
                        expr,
                        path_attr: Some(attr.to_owned()),
                        line: n,
                    });
                }
                "buffer" => {
                    buffer = rest
                        .parse()
                        .ok()
                        .filter(|b| *b > 0)
                        .ok_or_else(|| syntax(n, "buffer size must be a positive integer"))?;
                }
                other => return Err(syntax(n, format!("unknown declaration `{other}`"))),
            }
        }

        // Key attributes consumed by a derivation are inputs, not state.
        let inputs: Vec<String> = rules
            .iter()
            .flat_map(|r| r.inputs().map(str::to_owned))
            .collect();
        let mut layout = Vec::new();
        for (name, n, source) in order {
            if layout.iter().any(|(m, _): &(String, AttrSource)| *m == name) {
                return Err(syntax(n, format!("attribute `{name}` is declared twice")));
            }
            if matches!(source, AttrSource::Key(_)) && inputs.contains(&name) {
                continue;
            }
            layout.push((name, source));
        }
        let extractor = Extractor::new(keys.clone(), rules.clone(), &layout).map_err(SpecError::Invalid)?;
        let schema = extractor.schema().clone();

        let mut abstractions = BTreeMap::new();
        for (n, name, body) in abs_lines {
            let idx = schema
                .index(&name)
                .ok_or_else(|| syntax(n, format!("`{name}` is not a state attribute")))?;
            let f = AbstractionFunction::parse(&name, schema.tag(idx), &body).map_err(|e| syntax(n, e))?;
            if abstractions.insert(idx, f).is_some() {
                return Err(syntax(n, format!("`{name}` already has an abstraction")));
            }
        }
        for p in &props {
            if let Some(v) = p.expr.free_vars().into_iter().find(|v| schema.index(v).is_none()) {
                return Err(syntax(p.line, format!("`{v}` is not a state attribute")));
            }
            if let Some(attr) = &p.path_attr {
                let idx = schema
                    .index(attr)
                    .ok_or_else(|| syntax(p.line, format!("`{attr}` is not a state attribute")))?;
                let Expr::P(slots) = &p.expr else { unreachable!() };
                PathSpec::from_slots(attr, schema.tag(idx), slots).map_err(|e| syntax(p.line, e))?;
            }
        }
        Ok(Spec {
            keys,
            rules,
            filter,
            layout,
            schema,
            abstractions,
            props,
            buffer,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn filter(&self) -> &InclusionFilter {
        &self.filter
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    pub fn set_buffer(&mut self, n: usize) {
        self.buffer = n.max(1);
    }

    pub fn props(&self) -> &[PropDecl] {
        &self.props
    }

    pub fn prop(&self, name: &str) -> Option<&PropDecl> {
        self.props.iter().find(|p| p.name == name)
    }

    /// Append a property declared outside the file.
    pub fn add_prop(&mut self, name: &str, text: &str) -> Result<(), SpecError> {
        let expr = parse_property(text).map_err(|e| SpecError::Invalid(format!("property `{name}`: {e}")))?;
        if let Some(v) = expr.free_vars().into_iter().find(|v| self.schema.index(v).is_none()) {
            return Err(SpecError::Invalid(format!("property `{name}`: `{v}` is not a state attribute")));
        }
        self.props.push(PropDecl {
            name: name.to_owned(),
            expr,
            path_attr: None,
            line: 0,
        });
        Ok(())
    }

    /// Keep only the named declarations.
    pub fn retain_props(&mut self, names: &[String]) -> Result<(), SpecError> {
        if let Some(missing) = names.iter().find(|n| self.prop(n).is_none()) {
            return Err(SpecError::Invalid(format!("no property named `{missing}`")));
        }
        self.props.retain(|p| names.contains(&p.name));
        Ok(())
    }

    pub fn extractor(&self) -> Extractor {
        Extractor::new(self.keys.clone(), self.rules.clone(), &self.layout)
            .expect("layout was validated when the spec was parsed")
    }

    /// Abstraction of attribute `i`; identity when none is declared.
    pub fn function(&self, i: usize) -> AbstractionFunction {
        self.abstractions
            .get(&i)
            .cloned()
            .unwrap_or_else(|| AbstractionFunction::identity(self.schema.name(i), self.schema.tag(i)))
    }

    /// Attributes with an `abs` declaration, in schema order.
    pub fn abstracted(&self) -> Vec<usize> {
        self.abstractions.keys().copied().collect()
    }

    pub fn has_abstraction(&self) -> bool {
        self.abstractions.values().any(|f| !f.is_identity())
    }

    /// Path abstraction for a `P` declaration: the declared control
    /// attribute, or the single attribute its atoms mention.
    pub fn path_spec(&self, p: &PropDecl) -> Result<(PathSpec, usize), String> {
        let spec = match (&p.path_attr, &p.expr) {
            (Some(attr), Expr::P(slots)) => {
                let idx = self.schema.index(attr).ok_or_else(|| format!("`{attr}` is not a state attribute"))?;
                PathSpec::from_slots(attr, self.schema.tag(idx), slots)?
            }
            (None, e) => PathSpec::from_property(e, &self.schema)?,
            _ => unreachable!("path declarations always hold a P property"),
        };
        let idx = self.schema.index(&spec.attr).expect("spec attribute is in the schema");
        Ok((spec, idx))
    }

    /// Projection of the state vector onto `attrs` (schema indices).
    pub fn restrict(&self, attrs: &[usize]) -> Restriction {
        let mut attrs = attrs.to_vec();
        attrs.sort_unstable();
        attrs.dedup();
        let mut slots = vec![None; self.schema.len()];
        let mut names = Vec::new();
        let mut fns = Vec::new();
        for (k, &a) in attrs.iter().enumerate() {
            slots[a] = Some(k);
            names.push((self.schema.name(a).to_owned(), self.schema.tag(a)));
            fns.push(self.function(a));
        }
        Restriction {
            schema: Schema::new(names),
            slots,
            fns,
        }
    }
}

/// A sub-vector of the spec's state attributes with their abstractions.
#[derive(Debug, Clone)]
pub struct Restriction {
    schema: Schema,
    slots: Vec<Option<usize>>,
    fns: Vec<AbstractionFunction>,
}

impl Restriction {
    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn functions(&self) -> &[AbstractionFunction] {
        &self.fns
    }

    /// The write re-indexed into the sub-vector, or `None` if its attribute
    /// is not kept.
    pub fn map(&self, w: &KeyWrite) -> Option<KeyWrite> {
        self.slots[w.attr].map(|attr| KeyWrite {
            seq: w.seq,
            attr,
            value: w.value.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DRONE: &str = r#"
# flight around home
key lat = jmavsim.LatLonAlt.lat : real
key lon = jmavsim.LatLonAlt.lon : real
key a = jmavsim.LatLonAlt.alt : real
derive d = haversine(lat, lon, 47.3977, 8.5456)
derive dir = compass(lat, lon, 47.3977, 8.5456, 2.5)
filter jmavsim.*
abs a = range[324:362:365:385:386:410:411]
abs dir = bool(dir == "C")
prop home = G[a <= 325 -> dir == "C"]
prop fence = G[d >= 0 && d <= 300]
buffer 64
"#;

    #[test]
    fn derive_inputs_leave_the_state_vector() {
        let s = Spec::parse(DRONE).unwrap();
        let names: Vec<_> = s.schema().names().collect();
        assert_eq!(names, ["a", "d", "dir"]);
        assert_eq!(s.schema().tag(1), ValueTag::Real);
        assert_eq!(s.buffer(), 64);
        assert_eq!(s.props().len(), 2);
        assert!(s.has_abstraction());
        assert_eq!(s.abstracted(), [0, 2]);
        assert!(s.function(1).is_identity());
        assert!(s.filter().matches("jmavsim.LatLonAlt"));
    }

    #[test]
    fn restriction_reindexes_writes() {
        let s = Spec::parse(DRONE).unwrap();
        let r = s.restrict(&[2, 0]);
        assert_eq!(r.schema().names().collect::<Vec<_>>(), ["a", "dir"]);
        let w = KeyWrite { seq: 3, attr: 2, value: crate::value::Value::Str("N".into()) };
        assert_eq!(r.map(&w).unwrap().attr, 1);
        assert!(r.map(&KeyWrite { attr: 1, ..w }).is_none());
    }

    #[test]
    fn path_declarations_and_quantifier_variables() {
        let text = "control loc = method\n\
            key up = el.Elevator.up : intList\n\
            key f = el.Elevator.floor : int\n\
            path auth on loc = (loc == \"a.B.req\") ~~> (loc == \"a.B.ok\") ~~> (loc == \"a.B.sent\")\n\
            prop served = G[all(i, up, F[f == i])]";
        let s = Spec::parse(text).unwrap();
        let (spec, idx) = s.path_spec(&s.props()[0]).unwrap();
        assert_eq!((spec.attr.as_str(), idx), ("loc", 0));
        assert!(s.path_spec(&s.props()[1]).is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("key p1 = a.B.c", 1),
            ("\nkey p1 = a.B.c : float", 2),
            ("key k = a.B.c : int\nabs j = bool(j > 0)", 2),
            ("key k = a.B.c : int\nprop x = G[z > 0]", 2),
            ("key k = a.B.c : int\nprop x = G[k >]", 2),
            ("bogus line", 1),
            ("control c = module", 1),
            ("key k = a.B.c : int\npath p on k = (k == 1) ~~> (k == 1) ~~> (k == 2)", 2),
        ] {
            match Spec::parse(text) {
                Err(SpecError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            Spec::parse("key lat = g.P.lat : str\nkey lon = g.P.lon : real\nderive d = haversine(lat, lon, 0, 0)"),
            Err(SpecError::Invalid(_))
        ));
    }
}
