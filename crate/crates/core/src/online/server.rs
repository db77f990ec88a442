use std::io::{self, BufRead, BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::sync_channel;
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use serde_json::json;
use thiserror::Error;

use super::session::{Notification, Report, Session};
use crate::model::GraphModel;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("connection failed: {0}")]
    Io(#[from] io::Error),
    #[error("session thread panicked")]
    Panicked,
}

/// What a finished session leaves behind.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub model: GraphModel,
}

/// A session waiting for, or serving, its one client.
pub struct SessionHandle {
    addr: SocketAddr,
    join: JoinHandle<Result<Outcome, ServeError>>,
}

impl SessionHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Block until the client disconnects or the session terminates.
    pub fn wait(self) -> Result<Outcome, ServeError> {
        self.join.join().map_err(|_| ServeError::Panicked)?
    }
}

/// Bind `listen` and serve one client in the background. Further clients
/// are refused with an error record while the session runs.
pub fn start_session(listen: impl ToSocketAddrs + ToString, session: Session) -> Result<SessionHandle, ServeError> {
    let listener = TcpListener::bind(&listen).map_err(|source| ServeError::Bind {
        addr: listen.to_string(),
        source,
    })?;
    let addr = listener.local_addr()?;
    let join = thread::spawn(move || {
        let (stream, peer) = listener.accept()?;
        log::info!("client connected from {peer}");
        let stop = Arc::new(AtomicBool::new(false));
        let refuser = spawn_refuser(listener, Arc::clone(&stop));
        let out = run(stream, session);
        stop.store(true, Ordering::Relaxed);
        let _ = refuser.join();
        out
    });
    Ok(SessionHandle { addr, join })
}

/// Bind, serve one client, and return when it is done.
pub fn serve(listen: impl ToSocketAddrs + ToString, session: Session) -> Result<Outcome, ServeError> {
    start_session(listen, session)?.wait()
}

fn spawn_refuser(listener: TcpListener, stop: Arc<AtomicBool>) -> JoinHandle<()> {
    thread::spawn(move || {
        if listener.set_nonblocking(true).is_err() {
            return;
        }
        while !stop.load(Ordering::Relaxed) {
            match listener.accept() {
                Ok((mut s, peer)) => {
                    log::warn!("refusing second client {peer}");
                    let msg = json!({"type": "error", "seq": null, "message": "a session is already in progress"});
                    let _ = writeln!(s, "{msg}");
                    let _ = s.shutdown(Shutdown::Both);
                }
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(20)),
                Err(_) => return,
            }
        }
    })
}

fn run(stream: TcpStream, mut session: Session) -> Result<Outcome, ServeError> {
    let (tx, rx) = sync_channel::<String>(session.spec().buffer().max(1));
    let reader_stream = stream.try_clone()?;
    let reader = thread::spawn(move || {
        for line in BufReader::new(reader_stream).lines() {
            let Ok(line) = line else { break };
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    let mut out = io::BufWriter::new(stream.try_clone()?);
    let mut send = |n: &Notification| -> io::Result<()> {
        writeln!(out, "{}", n.to_json())?;
        out.flush()
    };
    // A client that stops reading must not stop the analysis.
    let mut connected = true;
    for line in rx.iter() {
        for n in session.ingest_line(&line) {
            if connected && send(&n).is_err() {
                connected = false;
            }
        }
        if session.is_terminated() {
            break;
        }
    }
    // Unblocks a reader waiting on a full channel after termination.
    drop(rx);
    let report = session.finalize();
    log::info!(
        "session ended after {} events, {} writes, {} states",
        report.events,
        report.writes,
        report.states
    );
    if connected {
        let _ = send(&Notification::Report(report.clone()));
    }
    let _ = stream.shutdown(Shutdown::Both);
    let _ = reader.join();
    Ok(Outcome {
        model: session.model().clone(),
        report,
    })
}
