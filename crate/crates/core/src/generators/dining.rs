use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Emitter;
use crate::value::Value;

const N: usize = 5;

pub fn spec() -> &'static str {
    r#"# five philosophers cycling T -> H -> E -> T
key p1 = dining.Philosopher:1.state : str
key p2 = dining.Philosopher:2.state : str
key p3 = dining.Philosopher:3.state : str
key p4 = dining.Philosopher:4.state : str
key p5 = dining.Philosopher:5.state : str
filter dining.*
abs p1 = bool(p1 == "E")
abs p2 = bool(p2 == "E")
abs p3 = bool(p3 == "E")
abs p4 = bool(p4 == "E")
abs p5 = bool(p5 == "E")
prop safety = G[(p1 == "E" -> p2 != "E") && (p2 == "E" -> p3 != "E") && (p3 == "E" -> p4 != "E") && (p4 == "E" -> p5 != "E") && (p5 == "E" -> p1 != "E")]
"#
}

#[derive(Clone, Copy, PartialEq)]
enum St {
    T,
    H,
    E,
}

impl St {
    fn text(self) -> &'static str {
        match self {
            St::T => "T",
            St::H => "H",
            St::E => "E",
        }
    }
}

/// Philosopher `i` sits between forks `i` and `i + 1`. Hungry means one
/// fork in hand, eating both. The last philosopher reaches for the right
/// fork first, which rules out the circular wait.
fn forks(i: usize) -> (usize, usize) {
    let (l, r) = (i, (i + 1) % N);
    if i == N - 1 {
        (r, l)
    } else {
        (l, r)
    }
}

pub fn run(rng: &mut ChaCha8Rng, target: usize, bug: Option<&str>) -> Emitter {
    let adjacent = bug == Some("adjacent_eating");
    let mut out = Emitter::default();
    let mut st = [St::T; N];
    let mut held: [Option<usize>; N] = [None; N];
    let write = |out: &mut Emitter, i: usize, s: St| {
        out.field(&format!("philosopher-{}", i + 1), "dining.Philosopher", i as u64 + 1, "state", Value::Str(s.text().into()), 1);
    };
    for i in 0..N.min(target) {
        write(&mut out, i, St::T);
    }
    // With the fault, one neighbor pair is made to overlap early in the run
    // so short traces still show it.
    let mut forced = false;
    while out.writes < target {
        let mut moves: Vec<(usize, St)> = Vec::new();
        for i in 0..N {
            let (first, second) = forks(i);
            match st[i] {
                St::T if held[first].is_none() => moves.push((i, St::H)),
                St::H if held[second].is_none() => moves.push((i, St::E)),
                St::H if adjacent && rng.gen_bool(0.3) => moves.push((i, St::E)),
                St::E => moves.push((i, St::T)),
                _ => {}
            }
        }
        if adjacent && !forced && out.writes > N + 10 {
            if let Some(&(i, _)) = moves
                .iter()
                .find(|(i, s)| *s == St::E && held[forks(*i).1].is_some_and(|j| st[j] == St::E)) {
                moves = vec![(i, St::E)];
                forced = true;
            }
        }
        let &(i, next) = moves.choose(rng).expect("fork order leaves a philosopher able to move");
        let (first, second) = forks(i);
        match next {
            St::H => held[first] = Some(i),
            St::E => {
                if held[second].is_none() {
                    held[second] = Some(i);
                }
            }
            St::T => {
                for f in [first, second] {
                    if held[f] == Some(i) {
                        held[f] = None;
                    }
                }
            }
        }
        st[i] = next;
        write(&mut out, i, next);
    }
    out
}
