//! Parse, print and normalize properties, then decide a state formula
//! against abstract constraints without looking at any trace.

use std::error::Error;

use fsm_rv::abstraction::Constraint;
use fsm_rv::checker::{decide_validity, Truth};
use fsm_rv::model::Schema;
use fsm_rv::propspec::{normalize, parse_property, pretty_print, print_parenthesized, BinOp};
use fsm_rv::value::{Value, ValueTag};

const CORPUS: [&str; 5] = [
    "G[(r > 0 -> w == 0) && r >= 0 && (w == 0 || w == 1)]",
    "G[ww > 0 -> r' <= r]",
    "G[all(i, up, F[f == i])]",
    "G[up == up' && down == down' -> (d == \"up\" && f >= up#max && f >= down#max -> d' == \"down\")]",
    "P[(s == \"req\" || s == \"retry\") ~~> s == \"granted\" ~~> s == \"sent\"]",
];

pub fn run() -> Result<Vec<Truth>, Box<dyn Error>> {
    for text in CORPUS {
        let p = parse_property(text)?;
        println!("{}", pretty_print(&p));
        println!("  fully parenthesized: {}", print_parenthesized(&p));
        let parts = normalize(&p);
        if parts.len() > 1 {
            for q in &parts {
                println!("  conjunct: {}", pretty_print(q));
            }
        }
    }
    if let Err(e) = parse_property("G[r > ]") {
        println!("rejected: {e}");
    }

    // r known to be positive, w somewhere in [0, 1].
    let schema = Schema::new(vec![("r".into(), ValueTag::Int), ("w".into(), ValueTag::Int)]);
    let r_pos = Constraint::atom(ValueTag::Int, BinOp::Gt, &Value::Int(0))?;
    let w_low = Constraint::atom(ValueTag::Int, BinOp::Ge, &Value::Int(0))?
        .intersect(&Constraint::atom(ValueTag::Int, BinOp::Le, &Value::Int(1))?)?;
    let state = [r_pos, w_low];
    let mut out = Vec::new();
    for body in ["r >= 1", "w == 0", "r < 0 && w == 1"] {
        let t = decide_validity(&schema, &state, &parse_property(body)?)?;
        println!("r > 0, 0 <= w <= 1 |= {body}: {t:?}");
        out.push(t);
    }
    Ok(out)
}

fn main() -> Result<(), Box<dyn Error>> {
    run().map(|_| ())
}
