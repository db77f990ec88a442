//! Invariants over random write sequences and random properties.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use fsm_rv::checker::{check_lsm, CheckOptions, VerdictValue};
use fsm_rv::export::{from_json, to_dot, to_json, Color, RenderOptions};
use fsm_rv::model::{build_dsm, build_lsm, collapse_lsm, state_key, GraphModel, Model, Schema};
use fsm_rv::propspec::{normalize, parse_property, pretty_print};
use fsm_rv::trace::KeyWrite;
use fsm_rv::value::{Value, ValueTag};

fn schema() -> Schema {
    Schema::new(vec![("k".into(), ValueTag::Int), ("s".into(), ValueTag::Str), ("b".into(), ValueTag::Bool)])
}

fn writes() -> impl Strategy<Value = Vec<KeyWrite>> {
    let one = prop_oneof![
        (0i64..4).prop_map(|v| (0, Value::Int(v))),
        prop::sample::select(vec!["a", "b", "c \"q\""]).prop_map(|v| (1, Value::Str(v.into()))),
        any::<bool>().prop_map(|v| (2, Value::Bool(v))),
    ];
    prop::collection::vec(one, 0..60).prop_map(|ws| {
        ws.into_iter()
            .enumerate()
            .map(|(i, (attr, value))| KeyWrite { seq: i as u64 + 1, attr, value })
            .collect()
    })
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        (prop::sample::select(vec!["<", "<=", "==", "!=", ">"]), 0i64..4).prop_map(|(op, c)| format!("k {op} {c}")),
        prop::sample::select(vec!["s == \"a\"", "s != \"b\"", "b", "!b", "k' > k", "k' == k"]).prop_map(str::to_owned),
    ]
}

/// State formulas built from `&&`, `||`, `->` and `!`.
fn formula() -> impl Strategy<Value = String> {
    atom().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} && {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} || {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} -> {b})")),
            inner.prop_map(|a| format!("!({a})")),
        ]
    })
}

fn edge_set(m: &GraphModel) -> BTreeMap<(String, String), u64> {
    let key = |i: usize| state_key(m.schema(), m.state(i));
    m.edges().iter().map(|e| ((key(e.from), key(e.to)), e.count)).collect()
}

/// A minimal structural check of the DOT emitted for graph models.
fn dot_well_formed(dot: &str, m: &GraphModel) -> Result<(), String> {
    let lines: Vec<&str> = dot.lines().collect();
    if !lines.first().is_some_and(|l| l.starts_with("digraph ") && l.ends_with('{')) || lines.last() != Some(&"}") {
        return Err("not a digraph block".into());
    }
    let mut nodes = BTreeSet::new();
    let mut edges = 0;
    for l in &lines[1..lines.len() - 1] {
        let l = l.trim();
        let body = l.strip_suffix(';').ok_or_else(|| format!("unterminated statement `{l}`"))?;
        let (head, attrs) = match body.find('[') {
            Some(i) if body.ends_with(']') => (body[..i].trim(), &body[i..]),
            Some(_) => return Err(format!("unclosed attribute list in `{l}`")),
            None => (body, ""),
        };
        // Quotes inside labels must be escaped.
        let unescaped = attrs.match_indices('"').filter(|(i, _)| !attrs[..*i].ends_with('\\')).count();
        if unescaped % 2 != 0 {
            return Err(format!("unbalanced quotes in `{l}`"));
        }
        if let Some((a, b)) = head.split_once(" -> ") {
            if !nodes.contains(a) || !nodes.contains(b) {
                return Err(format!("edge to undeclared node in `{l}`"));
            }
            edges += 1;
        } else if head != "node" && !nodes.insert(head.to_owned()) {
            return Err(format!("node `{head}` declared twice"));
        }
    }
    if nodes.len() != m.state_count() || edges != m.edges().len() {
        return Err(format!("{} nodes and {edges} edges for {} states", nodes.len(), m.state_count()));
    }
    Ok(())
}

proptest! {
    #[test]
    fn dsm_is_the_collapsed_lsm(ws in writes()) {
        let s = schema();
        let dsm = build_dsm(&s, ws.iter().cloned());
        let lsm = build_lsm(&s, ws.iter().cloned());
        let collapsed = collapse_lsm(&lsm);
        prop_assert_eq!(dsm.states(), collapsed.states());
        prop_assert_eq!(edge_set(&dsm), edge_set(&collapsed));
        prop_assert_eq!(dsm.total_transitions(), ws.len() as u64);
        let distinct: BTreeSet<_> = lsm.states().iter().map(|v| state_key(&s, v)).collect();
        prop_assert_eq!(distinct.len(), dsm.state_count());
    }

    #[test]
    fn exported_models_reload_unchanged(ws in writes()) {
        let m = Model::Graph(build_dsm(&schema(), ws));
        let text = to_json(&m);
        let back = from_json(&text).unwrap();
        prop_assert_eq!(to_json(&back), text);
        prop_assert_eq!(back.state_count(), m.state_count());
    }

    #[test]
    fn dot_output_is_well_formed(ws in writes(), pick in any::<prop::sample::Index>(), counts in any::<bool>()) {
        let m = build_dsm(&schema(), ws);
        let mut opts = RenderOptions { show_counts: counts, ..Default::default() };
        opts.highlight.insert(state_key(m.schema(), m.state(pick.index(m.state_count()))), Color::Red);
        let model = Model::Graph(m);
        let dot = to_dot(&model, &opts);
        let Model::Graph(m) = &model else { unreachable!() };
        prop_assert!(dot_well_formed(&dot, m).is_ok(), "{:?}\n{}", dot_well_formed(&dot, m), dot);
        prop_assert!(dot.contains("fillcolor=red"));
        prop_assert_eq!(to_dot(&model, &opts), dot);
    }

    #[test]
    fn normalized_conjuncts_decide_like_the_whole(ws in writes(), f in formula()) {
        let lsm = build_lsm(&schema(), ws);
        let whole = parse_property(&format!("G[{f}]")).unwrap();
        let parts = normalize(&whole);
        prop_assert!(!parts.is_empty());
        let opts = CheckOptions::default();
        let expected = check_lsm(&lsm, &whole, &opts).unwrap().value;
        let mut got = VerdictValue::True;
        for p in &parts {
            // Every part reparses to itself.
            prop_assert_eq!(&parse_property(&pretty_print(p)).unwrap(), p);
            if check_lsm(&lsm, p, &opts).unwrap().value == VerdictValue::False {
                got = VerdictValue::False;
            }
        }
        prop_assert_eq!(got, expected, "{} into {:?}", f, parts.iter().map(pretty_print).collect::<Vec<_>>());
        prop_assert_eq!(normalize(&parts[0]), vec![parts[0].clone()]);
    }
}
