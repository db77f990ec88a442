use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Emitter;
use crate::value::Value;

const FLOORS: i64 = 10;

pub fn spec() -> &'static str {
    r#"# f floor, d direction, up/down outstanding requests
key f = el.Elevator:1.floor : int
key d = el.Elevator:1.dir : str
key up = el.Elevator:1.up : intList
key down = el.Elevator:1.down : intList
filter el.*
prop served = G[all(i, up, F[f == i])] && G[all(i, down, F[f == i])]
prop motion = G[up == up' && down == down' -> (d == "down" && d' == "down" -> f > f') && (d == "up" && d' == "up" -> f < f') && (d != d' -> f == f')]
prop turn_up = G[up == up' && down == down' -> (d == "down" && f <= up#min && f <= down#min -> d' == "up")]
prop turn_down = G[up == up' && down == down' -> (d == "up" && f >= up#max && f >= down#max -> d' == "down")]
"#
}

#[derive(Clone)]
struct Car {
    f: i64,
    d: &'static str,
    up: Vec<i64>,
    down: Vec<i64>,
    /// A request the faulty controller never serves.
    ignored: Option<i64>,
}

enum Step {
    Floor(i64),
    Dir(&'static str),
    Up(Vec<i64>),
    Down(Vec<i64>),
}

impl Car {
    fn pending(&self) -> impl Iterator<Item = i64> + '_ {
        self.up
            .iter()
            .chain(&self.down)
            .copied()
            .filter(move |x| Some(*x) != self.ignored)
    }

    /// The controller's next move, or `None` when idle. Requests ahead are
    /// served before turning around.
    fn step(&self) -> Option<Step> {
        let remove = |l: &[i64]| l.iter().copied().filter(|x| *x != self.f).collect::<Vec<_>>();
        if self.up.contains(&self.f) && Some(self.f) != self.ignored {
            return Some(Step::Up(remove(&self.up)));
        }
        if self.down.contains(&self.f) && Some(self.f) != self.ignored {
            return Some(Step::Down(remove(&self.down)));
        }
        let above = self.pending().any(|x| x > self.f);
        let below = self.pending().any(|x| x < self.f);
        match self.d {
            "up" if above => Some(Step::Floor(self.f + 1)),
            "down" if below => Some(Step::Floor(self.f - 1)),
            "up" if below => Some(Step::Dir("down")),
            "down" if above => Some(Step::Dir("up")),
            _ => None,
        }
    }

    fn apply(&mut self, s: &Step) {
        match s {
            Step::Floor(f) => self.f = *f,
            Step::Dir(d) => self.d = d,
            Step::Up(l) => self.up = l.clone(),
            Step::Down(l) => self.down = l.clone(),
        }
    }

    /// Writes needed to serve everything outstanding.
    fn drain_cost(&self) -> usize {
        let mut c = self.clone();
        let mut n = 0;
        while let Some(s) = c.step() {
            c.apply(&s);
            n += 1;
        }
        n
    }
}

fn emit(out: &mut Emitter, thread: &str, s: &Step) {
    let (field, v) = match s {
        Step::Floor(f) => ("floor", Value::Int(*f)),
        Step::Dir(d) => ("dir", Value::Str((*d).into())),
        Step::Up(l) => ("up", Value::IntList(l.clone())),
        Step::Down(l) => ("down", Value::IntList(l.clone())),
    };
    out.field(thread, "el.Elevator", 1, field, v, 1);
}

pub fn run(rng: &mut ChaCha8Rng, target: usize, bug: Option<&str>) -> Emitter {
    let skip = bug == Some("skip_request");
    let mut out = Emitter::default();
    let mut car = Car {
        f: 0,
        d: "up",
        up: Vec::new(),
        down: Vec::new(),
        ignored: None,
    };
    for s in [Step::Floor(0), Step::Dir("up"), Step::Up(Vec::new()), Step::Down(Vec::new())] {
        emit(&mut out, "controller", &s);
    }
    loop {
        let budget = target.saturating_sub(out.writes);
        // Stop taking requests once serving the backlog fills the target.
        let accepting = car.drain_cost() + FLOORS as usize + 2 < budget;
        let idle = car.step().is_none();
        if accepting && (idle || rng.gen_bool(0.25)) {
            let floor = rng.gen_range(0..FLOORS);
            let going_up = rng.gen_bool(0.5);
            let list = if going_up { &car.up } else { &car.down };
            let reserved = car.ignored == Some(floor);
            if floor != car.f && !list.contains(&floor) && !reserved {
                let mut l = list.clone();
                l.push(floor);
                let s = if going_up { Step::Up(l) } else { Step::Down(l) };
                car.apply(&s);
                emit(&mut out, "button", &s);
                if skip && car.ignored.is_none() && out.writes > 20 {
                    car.ignored = Some(floor);
                }
            }
            continue;
        }
        match car.step() {
            Some(s) => {
                car.apply(&s);
                emit(&mut out, "controller", &s);
            }
            None if !accepting => break,
            None => {}
        }
    }
    out
}
