use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::wire::{encode_request, parse_bit};
use super::{check_reads, SampleResult, Sampler};
use crate::error::{invalid, Result, TransportError};
use crate::weights::WeightAssignment;

pub const DEFAULT_BRIDGE_TIMEOUT: Duration = Duration::from_secs(60);

enum Line {
    Text(String),
    Eof,
    Failed(String),
}

/// Parent side of the stdio pipe protocol.
///
/// The endpoint is spawned once and serves one request per `sample` call;
/// the read count is fixed at launch (passed as the endpoint's argument by
/// convention), so the `reads` argument here is only validated. Responses
/// are read on a helper thread so a silent endpoint hits the timeout
/// instead of blocking forever.
pub struct BridgeSampler {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<Line>,
    timeout: Duration,
    label: String,
}

impl BridgeSampler {
    /// Spawns `program` with `args`, speaking the protocol over its
    /// standard streams. Standard error is inherited.
    pub fn spawn<S: AsRef<str>>(program: &str, args: &[S]) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args.iter().map(|a| a.as_ref()))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| TransportError::new(format!("cannot spawn {program:?}: {e}"), 0, 0))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut buf = String::new();
                let msg = match reader.read_line(&mut buf) {
                    Ok(0) => Line::Eof,
                    Ok(_) => Line::Text(buf),
                    Err(e) => Line::Failed(e.to_string()),
                };
                let done = !matches!(msg, Line::Text(_));
                if tx.send(msg).is_err() || done {
                    break;
                }
            }
        });
        let label = std::iter::once(program)
            .chain(args.iter().map(|a| a.as_ref()))
            .collect::<Vec<_>>()
            .join(" ");
        Ok(Self {
            child,
            stdin,
            lines: rx,
            timeout: DEFAULT_BRIDGE_TIMEOUT,
            label,
        })
    }

    /// Spawns from a whitespace-separated command line.
    pub fn from_command_line(command: &str) -> Result<Self> {
        let mut parts = command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| invalid("empty bridge command"))?;
        let args: Vec<&str> = parts.collect();
        Self::spawn(program, &args)
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn command(&self) -> &str {
        &self.label
    }

    fn send(&mut self, weights: &WeightAssignment, expected: usize) -> Result<(), TransportError> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| TransportError::new("pipe already closed", 0, expected))?;
        stdin
            .write_all(encode_request(weights).as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| TransportError::new(format!("write failed: {e}"), 0, expected))
    }

    fn receive(&mut self, expected: usize) -> Result<Vec<u8>, TransportError> {
        let deadline = Instant::now() + self.timeout;
        let mut bits = Vec::with_capacity(expected);
        while bits.len() < expected {
            let remaining = deadline.saturating_duration_since(Instant::now());
            let line = match self.lines.recv_timeout(remaining) {
                Ok(line) => line,
                Err(RecvTimeoutError::Timeout) => {
                    let _ = self.child.kill();
                    return Err(TransportError::new(
                        format!("no response within {:?}", self.timeout),
                        bits.len(),
                        expected,
                    ));
                }
                Err(RecvTimeoutError::Disconnected) => Line::Eof,
            };
            match line {
                Line::Text(text) => match parse_bit(&text) {
                    Some(b) => bits.push(b),
                    None => {
                        return Err(TransportError::new(
                            format!("non-binary response value {:?}", text.trim_end()),
                            bits.len(),
                            expected,
                        ))
                    }
                },
                Line::Eof => {
                    return Err(TransportError::new(
                        "endpoint closed its output",
                        bits.len(),
                        expected,
                    ))
                }
                Line::Failed(e) => {
                    return Err(TransportError::new(
                        format!("read failed: {e}"),
                        bits.len(),
                        expected,
                    ))
                }
            }
        }
        Ok(bits)
    }
}

impl Sampler for BridgeSampler {
    fn sample(&mut self, weights: &WeightAssignment, reads: usize) -> Result<SampleResult> {
        check_reads(reads)?;
        let expected = weights.len();
        self.send(weights, expected)?;
        let bits = self.receive(expected)?;
        Ok(SampleResult::from_bits(weights, bits))
    }

    fn name(&self) -> &str {
        "bridge"
    }
}

impl Drop for BridgeSampler {
    fn drop(&mut self) {
        // closing stdin ends the endpoint's read loop
        drop(self.stdin.take());
        let deadline = Instant::now() + Duration::from_secs(2);
        while Instant::now() < deadline {
            match self.child.try_wait() {
                Ok(Some(_)) | Err(_) => return,
                Ok(None) => thread::sleep(Duration::from_millis(10)),
            }
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
