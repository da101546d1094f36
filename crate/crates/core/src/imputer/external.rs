//! Client for an external model server.
//!
//! The server speaks newline-delimited UTF-8 JSON over TCP, a Unix socket or
//! a child process's stdin/stdout. Each request line
//! `{"id": ..., "description": ...}` gets exactly one response line, in
//! request order:
//! `{"id": ..., "labels": {"AV": ..., ...}, "confidences": {"AV": ..., ...}}`,
//! or `{"id": ..., "error": ...}` when the server rejects the request.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{ImputeError, Imputer, MetricPrediction, Prediction, PredictionSource, LOW_CONFIDENCE_MIN_TOKENS};
use crate::cve::CveId;
use crate::cvss::{CvssError, Metric};
use crate::text::{preprocess, StopWords, DEFAULT_MAX_TOKENS};

const RETRY_INTERVAL: Duration = Duration::from_millis(50);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// `tcp://host:port`
    Tcp(String),
    /// `unix:///path/to/socket`
    Unix(PathBuf),
    /// `stdio:<shell command>`; the command is run with `sh -c`.
    Stdio(String),
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(addr) = s.strip_prefix("tcp://") {
            if addr.rsplit_once(':').is_none_or(|(_, port)| port.parse::<u16>().is_err()) {
                return Err(format!("tcp endpoint {s:?} needs host:port"));
            }
            Ok(Endpoint::Tcp(addr.to_string()))
        } else if let Some(path) = s.strip_prefix("unix://") {
            if path.is_empty() {
                return Err("unix endpoint needs a socket path".into());
            }
            Ok(Endpoint::Unix(PathBuf::from(path)))
        } else if let Some(cmd) = s.strip_prefix("stdio:") {
            if cmd.trim().is_empty() {
                return Err("stdio endpoint needs a command".into());
            }
            Ok(Endpoint::Stdio(cmd.to_string()))
        } else {
            Err(format!("unknown endpoint {s:?}; expected tcp://, unix:// or stdio:"))
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Tcp(addr) => write!(f, "tcp://{addr}"),
            Endpoint::Unix(path) => write!(f, "unix://{}", path.display()),
            Endpoint::Stdio(cmd) => write!(f, "stdio:{cmd}"),
        }
    }
}

#[derive(Serialize)]
struct Request<'a> {
    id: &'a str,
    description: &'a str,
}

#[derive(Deserialize)]
struct Response {
    id: String,
    labels: Option<BTreeMap<String, String>>,
    confidences: Option<BTreeMap<String, f64>>,
    error: Option<serde_json::Value>,
}

struct Connection {
    writer: Box<dyn Write + Send>,
    responses: Receiver<std::io::Result<String>>,
    child: Option<Child>,
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Some(child) = &mut self.child {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

fn spawn_reader(reader: impl std::io::Read + Send + 'static) -> Receiver<std::io::Result<String>> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(reader).lines() {
            let stop = line.is_err();
            if tx.send(line).is_err() || stop {
                break;
            }
        }
    });
    rx
}

enum OpenError {
    /// Worth retrying until the deadline (server not up yet).
    Retry,
    Fatal(String),
}

impl Connection {
    fn open(endpoint: &Endpoint, remaining: Duration) -> Result<Self, OpenError> {
        match endpoint {
            Endpoint::Tcp(addr) => {
                let addrs: Vec<_> = addr.to_socket_addrs().map_err(|_| OpenError::Retry)?.collect();
                for a in addrs {
                    match TcpStream::connect_timeout(&a, remaining.max(Duration::from_millis(1))) {
                        Ok(stream) => {
                            let _ = stream.set_nodelay(true);
                            let read = stream.try_clone().map_err(|e| OpenError::Fatal(e.to_string()))?;
                            return Ok(Self { writer: Box::new(stream), responses: spawn_reader(read), child: None });
                        }
                        Err(_) => continue,
                    }
                }
                Err(OpenError::Retry)
            }
            #[cfg(unix)]
            Endpoint::Unix(path) => {
                let stream =
                    std::os::unix::net::UnixStream::connect(path).map_err(|_| OpenError::Retry)?;
                let read = stream.try_clone().map_err(|e| OpenError::Fatal(e.to_string()))?;
                Ok(Self { writer: Box::new(stream), responses: spawn_reader(read), child: None })
            }
            #[cfg(not(unix))]
            Endpoint::Unix(_) => Err(OpenError::Fatal("unix sockets are not supported on this platform".into())),
            Endpoint::Stdio(cmd) => {
                let mut child = Command::new("sh")
                    .arg("-c")
                    .arg(cmd)
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(|e| OpenError::Fatal(format!("cannot start {cmd:?}: {e}")))?;
                let stdin = child.stdin.take().expect("piped stdin");
                let stdout = child.stdout.take().expect("piped stdout");
                Ok(Self { writer: Box::new(stdin), responses: spawn_reader(stdout), child: Some(child) })
            }
        }
    }
}

/// Client for a model server. Requests are serialized over one connection,
/// opened lazily and reopened after any failure that may have left the
/// stream out of step.
pub struct ExternalModel {
    endpoint: Endpoint,
    timeout: Duration,
    max_tokens: usize,
    stop_words: StopWords,
    conn: Mutex<Option<Connection>>,
    next_id: AtomicU64,
}

impl fmt::Debug for ExternalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExternalModel").field("endpoint", &self.endpoint).field("timeout", &self.timeout).finish()
    }
}

impl ExternalModel {
    /// `timeout` bounds both connecting and waiting for each response.
    pub fn new(endpoint: Endpoint, timeout: Duration) -> Self {
        Self {
            endpoint,
            timeout,
            max_tokens: DEFAULT_MAX_TOKENS,
            stop_words: StopWords::english_v1(),
            conn: Mutex::new(None),
            next_id: AtomicU64::new(0),
        }
    }

    /// Preprocessing used only to reject empty descriptions and set the
    /// low-confidence flag; the server does its own tokenization.
    pub fn with_preprocessing(mut self, max_tokens: usize, stop_words: StopWords) -> Self {
        self.max_tokens = max_tokens;
        self.stop_words = stop_words;
        self
    }

    pub fn endpoint(&self) -> &Endpoint {
        &self.endpoint
    }

    fn connect(&self) -> Result<Connection, ImputeError> {
        let deadline = Instant::now() + self.timeout;
        loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            match Connection::open(&self.endpoint, remaining) {
                Ok(c) => return Ok(c),
                Err(OpenError::Fatal(msg)) => return Err(ImputeError::Unreachable(msg)),
                Err(OpenError::Retry) if Instant::now() + RETRY_INTERVAL < deadline => thread::sleep(RETRY_INTERVAL),
                Err(OpenError::Retry) => return Err(ImputeError::Timeout(self.timeout)),
            }
        }
    }

    fn exchange(
        &self,
        conn: &mut Connection,
        batch: &[(String, &CveId, &str, bool)],
    ) -> Vec<Result<Prediction, ImputeError>> {
        let mut out = Vec::with_capacity(batch.len());
        let mut payload = String::new();
        for (id, _, description, _) in batch {
            payload.push_str(&serde_json::to_string(&Request { id, description }).expect("string fields"));
            payload.push('\n');
        }
        if let Err(e) = conn.writer.write_all(payload.as_bytes()).and_then(|_| conn.writer.flush()) {
            let msg = format!("write failed: {e}");
            return batch.iter().map(|_| Err(ImputeError::Protocol(msg.clone()))).collect();
        }
        for (i, (id, cve_id, _, low_confidence)) in batch.iter().enumerate() {
            let line = match conn.responses.recv_timeout(self.timeout) {
                Ok(Ok(line)) => line,
                Err(RecvTimeoutError::Timeout) => {
                    out.extend((i..batch.len()).map(|_| Err(ImputeError::Timeout(self.timeout))));
                    return out;
                }
                Ok(Err(e)) => {
                    let msg = format!("read failed: {e}");
                    out.extend((i..batch.len()).map(|_| Err(ImputeError::Protocol(msg.clone()))));
                    return out;
                }
                Err(RecvTimeoutError::Disconnected) => {
                    let msg = "server closed the connection".to_string();
                    out.extend((i..batch.len()).map(|_| Err(ImputeError::Protocol(msg.clone()))));
                    return out;
                }
            };
            match parse_response(&line, id, cve_id, *low_confidence) {
                Ok(p) => out.push(Ok(p)),
                Err(ResponseError::OutOfStep(msg)) => {
                    out.push(Err(ImputeError::Protocol(msg.clone())));
                    out.extend((i + 1..batch.len()).map(|_| Err(ImputeError::Protocol(msg.clone()))));
                    return out;
                }
                Err(ResponseError::Rejected(e)) => out.push(Err(e)),
            }
        }
        out
    }
}

enum ResponseError {
    /// The response cannot be matched to its request; later responses are
    /// unreliable too.
    OutOfStep(String),
    Rejected(ImputeError),
}

fn parse_response(line: &str, id: &str, cve_id: &CveId, low_confidence: bool) -> Result<Prediction, ResponseError> {
    let response: Response = serde_json::from_str(line)
        .map_err(|e| ResponseError::OutOfStep(format!("unparseable response {line:?}: {e}")))?;
    if response.id != id {
        return Err(ResponseError::OutOfStep(format!("expected response id {id:?}, got {:?}", response.id)));
    }
    let protocol = |msg: String| ResponseError::Rejected(ImputeError::Protocol(msg));
    if let Some(err) = response.error {
        return Err(protocol(format!("server rejected request {id:?}: {err}")));
    }
    let labels = response.labels.ok_or_else(|| protocol(format!("response {id:?} has no labels")))?;
    let confidences = response.confidences.ok_or_else(|| protocol(format!("response {id:?} has no confidences")))?;
    let mut metrics = Vec::with_capacity(6);
    for metric in Metric::ALL {
        let key = metric.key();
        let text = labels.get(key).ok_or_else(|| protocol(format!("response {id:?} lacks label {key}")))?;
        let label = metric.parse_label(text).map_err(|e| match e {
            CvssError::IllegalLabel { metric, label } => {
                ResponseError::Rejected(ImputeError::IllegalLabel { metric, label })
            }
            other => protocol(other.to_string()),
        })?;
        let confidence =
            *confidences.get(key).ok_or_else(|| protocol(format!("response {id:?} lacks confidence {key}")))?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(protocol(format!("confidence {confidence} for {key} outside [0, 1]")));
        }
        metrics.push(MetricPrediction { label, confidence });
    }
    let metrics: [MetricPrediction; 6] = metrics.try_into().expect("six metrics");
    Prediction::new(cve_id.clone(), metrics, PredictionSource::ExternalModel, low_confidence).map_err(protocol)
}

impl Imputer for ExternalModel {
    fn predict(&self, cve_id: &CveId, description: &str) -> Result<Prediction, ImputeError> {
        self.predict_many(&[(cve_id.clone(), description.to_string())]).pop().expect("one result per item")
    }

    /// Sends every request before reading responses.
    fn predict_many(&self, items: &[(CveId, String)]) -> Vec<Result<Prediction, ImputeError>> {
        let mut results: Vec<Option<Result<Prediction, ImputeError>>> = Vec::with_capacity(items.len());
        let mut batch = Vec::new();
        let mut slots = Vec::new();
        for (cve_id, description) in items {
            match preprocess(description, self.max_tokens, &self.stop_words) {
                Ok(tokens) => {
                    let n = self.next_id.fetch_add(1, Ordering::Relaxed);
                    let low = tokens.original_length < LOW_CONFIDENCE_MIN_TOKENS;
                    batch.push((format!("{n}:{cve_id}"), cve_id, description.as_str(), low));
                    slots.push(results.len());
                    results.push(None);
                }
                Err(e) => results.push(Some(Err(e.into()))),
            }
        }
        if !batch.is_empty() {
            let mut guard = self.conn.lock().unwrap_or_else(|p| p.into_inner());
            let answers = match guard.take().map_or_else(|| self.connect(), Ok) {
                Ok(mut conn) => {
                    let answers = self.exchange(&mut conn, &batch);
                    let healthy = answers
                        .iter()
                        .all(|a| !matches!(a, Err(ImputeError::Timeout(_)) | Err(ImputeError::Protocol(_))));
                    if healthy {
                        *guard = Some(conn);
                    }
                    answers
                }
                Err(e) => {
                    let msg = e.to_string();
                    let timeout = matches!(e, ImputeError::Timeout(_));
                    batch
                        .iter()
                        .map(|_| {
                            Err(if timeout { ImputeError::Timeout(self.timeout) } else { ImputeError::Unreachable(msg.clone()) })
                        })
                        .collect()
                }
            };
            for (slot, answer) in slots.into_iter().zip(answers) {
                results[slot] = Some(answer);
            }
        }
        results.into_iter().map(|r| r.expect("every slot filled")).collect()
    }

    fn source(&self) -> PredictionSource {
        PredictionSource::ExternalModel
    }
}
