use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Emitter;
use crate::value::Value;

const READERS: usize = 3;
const WRITERS: usize = 2;

pub fn spec(priority: bool) -> String {
    let mut s = String::from(
        r#"# r active readers, w active writers, ww waiting writers
key r = db.Database:1.r : int
key w = db.Database:1.w : int
key ww = db.Database:1.ww : int
filter db.*
abs r = range[0:1]
abs w = range[0:1:2]
prop safe = G[(r > 0 -> w == 0) && r >= 0 && (w == 0 || w == 1)]
"#,
    );
    if priority {
        s.push_str("prop priority = G[ww > 0 -> r' <= r]\n");
    }
    s
}

#[derive(Clone, Copy, PartialEq)]
enum Act {
    ReaderIn(usize),
    ReaderOut(usize),
    WriterWait(usize),
    WriterIn(usize),
    WriterOut(usize),
}

pub fn run(rng: &mut ChaCha8Rng, target: usize, bug: Option<&str>, priority: bool) -> Emitter {
    let overlap = bug == Some("rw_overlap");
    let barging = bug == Some("reader_barging");
    let mut out = Emitter::default();
    let (mut r, mut w, mut ww) = (0i64, 0i64, 0i64);
    let mut reading = [false; READERS];
    // 0 idle, 1 waiting, 2 writing
    let mut writer = [0u8; WRITERS];
    let set = |out: &mut Emitter, thread: &str, field: &str, v: i64| {
        out.field(thread, "db.Database", 1, field, Value::Int(v), 1);
    };
    for f in ["r", "w", "ww"] {
        set(&mut out, "main", f, 0);
    }
    let mut injected = false;
    while out.writes < target {
        let mut acts = Vec::new();
        for (k, &on) in reading.iter().enumerate() {
            if on {
                acts.push(Act::ReaderOut(k));
            } else if w == 0 && (!priority || ww == 0) {
                acts.push(Act::ReaderIn(k));
            } else if (barging && ww > 0 && w == 0) || (overlap && w > 0 && rng.gen_bool(0.1)) {
                acts.push(Act::ReaderIn(k));
            }
        }
        for (k, &s) in writer.iter().enumerate() {
            match s {
                0 => acts.push(Act::WriterWait(k)),
                1 if w == 0 && r == 0 => acts.push(Act::WriterIn(k)),
                1 if overlap && w == 0 && r > 0 && (!injected || rng.gen_bool(0.1)) => acts.push(Act::WriterIn(k)),
                2 => acts.push(Act::WriterOut(k)),
                _ => {}
            }
        }
        let act = *acts.choose(rng).expect("some thread can always move");
        match act {
            Act::ReaderIn(k) => {
                if priority && overlap && ww > 0 {
                    continue;
                }
                injected |= w > 0 || (priority && ww > 0);
                reading[k] = true;
                r += 1;
                set(&mut out, &format!("reader-{}", k + 1), "r", r);
            }
            Act::ReaderOut(k) => {
                reading[k] = false;
                r -= 1;
                set(&mut out, &format!("reader-{}", k + 1), "r", r);
            }
            Act::WriterWait(k) => {
                writer[k] = 1;
                ww += 1;
                set(&mut out, &format!("writer-{}", k + 1), "ww", ww);
            }
            Act::WriterIn(k) => {
                injected |= r > 0;
                writer[k] = 2;
                ww -= 1;
                w += 1;
                let t = format!("writer-{}", k + 1);
                set(&mut out, &t, "ww", ww);
                set(&mut out, &t, "w", w);
            }
            Act::WriterOut(k) => {
                writer[k] = 0;
                w -= 1;
                set(&mut out, &format!("writer-{}", k + 1), "w", w);
            }
        }
    }
    out
}
