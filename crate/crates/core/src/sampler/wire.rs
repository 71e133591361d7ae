//! Text codec for the sampler pipe protocol.
//!
//! Request (parent to child): for every weight three lines `row`, `col`,
//! `value`, then a terminator line `#`. Node weights are sent as `row ==
//! col` for every node, zeros included, so the child learns the full node
//! set; couplers are sent only when nonzero. Values use Rust's shortest
//! round-trip float formatting.
//!
//! Response (child to parent): one line `0` or `1` per distinct node of
//! the request, in ascending node order.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::weights::WeightAssignment;

pub const TERMINATOR: &str = "#";

pub fn encode_request(weights: &WeightAssignment) -> String {
    let mut out = String::new();
    for (u, v, w) in weights.triplets() {
        let _ = write!(out, "{u}\n{v}\n{w:?}\n");
    }
    out.push_str(TERMINATOR);
    out.push('\n');
    out
}

pub fn encode_response(bits: &[u8]) -> String {
    let mut out = String::with_capacity(bits.len() * 2);
    for b in bits {
        out.push(if *b == 0 { '0' } else { '1' });
        out.push('\n');
    }
    out
}

/// Incremental request parser over a line stream.
pub struct RequestReader<R> {
    inner: R,
    line_no: usize,
}

impl<R: BufRead> RequestReader<R> {
    pub fn new(inner: R) -> Self {
        Self { inner, line_no: 0 }
    }

    fn next_line(&mut self) -> Result<Option<String>> {
        let mut buf = String::new();
        if self.inner.read_line(&mut buf)? == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        Ok(Some(buf.trim_end_matches(['\n', '\r']).to_string()))
    }

    /// Reads one `#`-terminated request. Returns `None` at a clean end of
    /// stream; a stream that ends mid-request is an error.
    pub fn read_request(&mut self) -> Result<Option<WeightAssignment>> {
        let mut entries = Vec::new();
        let mut started = false;
        loop {
            let Some(row) = self.next_line()? else {
                if started {
                    return Err(self.err("stream ended before the terminator"));
                }
                return Ok(None);
            };
            started = true;
            if row == TERMINATOR {
                return WeightAssignment::from_node_entries(entries).map(Some);
            }
            let row: usize = row
                .trim()
                .parse()
                .map_err(|_| self.err(format!("bad row index {row:?}")))?;
            let col = self
                .next_line()?
                .ok_or_else(|| self.err("stream ended inside a triplet"))?;
            let col: usize = col
                .trim()
                .parse()
                .map_err(|_| self.err(format!("bad column index {col:?}")))?;
            let value = self
                .next_line()?
                .ok_or_else(|| self.err("stream ended inside a triplet"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| self.err(format!("bad value {value:?}")))?;
            entries.push((row, col, value));
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line_no,
            message: message.into(),
        }
    }
}

/// Parses exactly `n` response lines.
pub fn decode_response(text: &str, n: usize) -> Result<Vec<u8>> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: lines.len(),
        });
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            parse_bit(l).ok_or(Error::Parse {
                line: i + 1,
                message: format!("expected 0 or 1, got {l:?}"),
            })
        })
        .collect()
}

pub(crate) fn parse_bit(line: &str) -> Option<u8> {
    match line.trim() {
        "0" => Some(0),
        "1" => Some(1),
        _ => None,
    }
}
