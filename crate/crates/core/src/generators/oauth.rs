use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Emitter;
use crate::value::Value;

pub fn spec() -> &'static str {
    r#"# s is the scheduler's protocol state; party is the class being run
key s = oauth.Scheduler:1.scheduled : str
control party = class
filter oauth.*
path authorized on s = (s == "Service_Requested") ~~> (s == "Authorization_Granted") ~~> (s == "Protected_Resource_Sent")
"#
}

/// Protocol steps as (state, party method) pairs.
const REQUEST: (&str, &str) = ("Service_Requested", "oauth.Client.requestService");
const ASK_AUTH: (&str, &str) = ("Authorization_Requested", "oauth.Client.requestAuthorization");
const LOGIN: (&str, &str) = ("Owner_Authenticated", "oauth.ResourceOwner.authenticate");
const LOGIN_FAILED: (&str, &str) = ("Authentication_Failed", "oauth.AuthServer.reject");
const GRANT: (&str, &str) = ("Authorization_Granted", "oauth.AuthServer.grant");
const ASK_TOKEN: (&str, &str) = ("Access_Token_Requested", "oauth.Client.requestToken");
const TOKEN: (&str, &str) = ("Access_Token_Issued", "oauth.AuthServer.issueToken");
const TOKEN_REJECTED: (&str, &str) = ("Token_Rejected", "oauth.AuthServer.rejectToken");
const ASK_RESOURCE: (&str, &str) = ("Protected_Resource_Requested", "oauth.Client.requestResource");
const UNAVAILABLE: (&str, &str) = ("Resource_Unavailable", "oauth.ResourceServer.fail");
const SENT: (&str, &str) = ("Protected_Resource_Sent", "oauth.ResourceServer.send");
const DONE: (&str, &str) = ("Idle", "oauth.Scheduler.reset");

fn session(rng: &mut ChaCha8Rng, skip_auth: bool, may_fail: bool) -> Vec<(&'static str, &'static str)> {
    let mut fail = |p: f64| may_fail && rng.gen_bool(p);
    let mut steps = vec![REQUEST];
    if skip_auth {
        steps.extend([ASK_RESOURCE, SENT, DONE]);
        return steps;
    }
    steps.push(ASK_AUTH);
    if fail(0.15) {
        steps.extend([LOGIN_FAILED, DONE]);
        return steps;
    }
    steps.extend([LOGIN, GRANT, ASK_TOKEN]);
    if fail(0.1) {
        steps.extend([TOKEN_REJECTED, DONE]);
        return steps;
    }
    steps.extend([TOKEN, ASK_RESOURCE]);
    if fail(0.1) {
        steps.extend([UNAVAILABLE, DONE]);
        return steps;
    }
    steps.extend([SENT, DONE]);
    steps
}

/// Each step is a method entry on the acting party followed by the
/// scheduler's state write: two writes on the state vector. The first
/// session always completes; with the fault, the second skips
/// authorization and later ones occasionally do.
pub fn run(rng: &mut ChaCha8Rng, target: usize, bug: Option<&str>) -> Emitter {
    let skip = bug == Some("skip_auth");
    let mut out = Emitter::default();
    let mut n = 0;
    loop {
        let skip_now = skip && (n == 1 || (n > 1 && rng.gen_bool(0.05)));
        let steps = session(rng, skip_now, n > 0);
        let cost = 2 * steps.len();
        let owed = skip && n < 2;
        if n > 0 && !owed && out.writes + cost / 2 > target {
            break;
        }
        let thread = format!("session-{}", n % 4 + 1);
        for (state, method) in steps {
            out.method(&thread, method, 1);
            out.field(&thread, "oauth.Scheduler", 1, "scheduled", Value::Str(state.into()), 1);
        }
        n += 1;
    }
    out
}
