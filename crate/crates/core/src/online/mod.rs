//! Online verification: a session consumes trace records as they arrive
//! and notifies the program of violations without waiting for the end of
//! the stream.

mod server;
mod session;

pub use server::{serve, start_session, Outcome, ServeError, SessionHandle};
pub use session::{Notification, Report, Session, SessionOptions};
