use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::event::{Event, EventKind};
use super::TraceError;
use crate::value::{Value, ValueTag};

/// Which field writes feed a key attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selector {
    pub class: String,
    /// `None` makes the selector instance-agnostic (`p.c.f`).
    pub instance: Option<u64>,
    pub field: String,
}

impl FromStr for Selector {
    type Err = String;

    /// Accepts `pkg.Class:3.field` and `pkg.Class.field`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((class, rest)) = s.split_once(':') {
            let (inst, field) = rest
                .split_once('.')
                .ok_or_else(|| format!("selector `{s}` is missing a field after the instance"))?;
            let instance: u64 = inst
                .parse()
                .map_err(|_| format!("selector `{s}` has a non-numeric instance `{inst}`"))?;
            if instance == 0 {
                return Err(format!("selector `{s}`: instance must be ≥ 1"));
            }
            check_qname(class, s)?;
            check_ident(field).map_err(|e| format!("selector `{s}`: {e}"))?;
            Ok(Selector {
                class: class.to_owned(),
                instance: Some(instance),
                field: field.to_owned(),
            })
        } else {
            let (class, field) = s
                .rsplit_once('.')
                .ok_or_else(|| format!("selector `{s}` needs the form pkg.Class.field"))?;
            check_qname(class, s)?;
            check_ident(field).map_err(|e| format!("selector `{s}`: {e}"))?;
            Ok(Selector {
                class: class.to_owned(),
                instance: None,
                field: field.to_owned(),
            })
        }
    }
}

fn check_qname(class: &str, whole: &str) -> Result<(), String> {
    if class.is_empty() || class.split('.').any(|seg| check_ident(seg).is_err()) {
        return Err(format!("selector `{whole}` has an invalid class name `{class}`"));
    }
    Ok(())
}

pub(crate) fn check_ident(name: &str) -> Result<(), String> {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return Err(format!("`{name}` is not an identifier")),
    }
    if chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Ok(())
    } else {
        Err(format!("`{name}` is not an identifier"))
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.instance {
            Some(i) => write!(f, "{}:{}.{}", self.class, i, self.field),
            None => write!(f, "{}.{}", self.class, self.field),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyAttribute {
    pub name: String,
    pub selector: Selector,
    pub tag: ValueTag,
}

impl KeyAttribute {
    pub fn new(name: impl Into<String>, selector: &str, tag: ValueTag) -> Result<Self, String> {
        let name = name.into();
        check_ident(&name)?;
        Ok(KeyAttribute {
            name,
            selector: selector.parse()?,
            tag,
        })
    }
}

/// The user's key attributes, indexed for matching.
#[derive(Debug, Clone, Default)]
pub struct KeyAttributeSet {
    attrs: Vec<KeyAttribute>,
    specific: HashMap<(String, u64, String), usize>,
    agnostic: HashMap<(String, String), usize>,
}

impl KeyAttributeSet {
    pub fn new(attrs: Vec<KeyAttribute>) -> Result<Self, String> {
        let mut set = KeyAttributeSet::default();
        for a in attrs {
            set.push(a)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, attr: KeyAttribute) -> Result<(), String> {
        if self.attrs.iter().any(|a| a.name == attr.name) {
            return Err(format!("duplicate key attribute `{}`", attr.name));
        }
        let idx = self.attrs.len();
        let sel = &attr.selector;
        let clash = match sel.instance {
            Some(i) => self
                .specific
                .insert((sel.class.clone(), i, sel.field.clone()), idx)
                .is_some(),
            None => self
                .agnostic
                .insert((sel.class.clone(), sel.field.clone()), idx)
                .is_some(),
        };
        if clash {
            return Err(format!("selector `{sel}` is declared twice"));
        }
        self.attrs.push(attr);
        Ok(())
    }

    pub fn attributes(&self) -> &[KeyAttribute] {
        &self.attrs
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&KeyAttribute> {
        self.attrs.iter().find(|a| a.name == name)
    }

    /// Index of the attribute a write to (class, instance, field) feeds.
    /// Instance-specific selectors shadow instance-agnostic ones.
    pub fn lookup(&self, class: &str, instance: Option<u64>, field: &str) -> Option<usize> {
        if let Some(i) = instance {
            if let Some(&idx) = self
                .specific
                .get(&(class.to_owned(), i, field.to_owned()))
            {
                return Some(idx);
            }
        }
        self.agnostic
            .get(&(class.to_owned(), field.to_owned()))
            .copied()
    }

    /// Match a field write against the key attributes.
    pub fn match_key<'e>(&self, event: &'e Event) -> Result<Option<(&str, &'e Value)>, TraceError> {
        match self.match_index(event)? {
            Some((idx, v)) => Ok(Some((self.attrs[idx].name.as_str(), v))),
            None => Ok(None),
        }
    }

    pub(crate) fn match_index<'e>(
        &self,
        event: &'e Event,
    ) -> Result<Option<(usize, &'e Value)>, TraceError> {
        let EventKind::FieldWrite {
            class,
            instance,
            field,
            value,
        } = &event.kind
        else {
            return Ok(None);
        };
        let Some(idx) = self.lookup(class, *instance, field) else {
            return Ok(None);
        };
        let attr = &self.attrs[idx];
        if value.tag() != attr.tag {
            return Err(TraceError::TypeMismatch {
                attribute: attr.name.clone(),
                seq: event.seq,
                expected: attr.tag,
                found: value.tag(),
            });
        }
        Ok(Some((idx, value)))
    }
}

/// Free-function form of [`KeyAttributeSet::match_key`].
pub fn match_key<'e>(
    event: &'e Event,
    keys: &KeyAttributeSet,
) -> Result<Option<(String, Value)>, TraceError> {
    Ok(keys
        .match_key(event)?
        .map(|(n, v)| (n.to_owned(), v.clone())))
}
