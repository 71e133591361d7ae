//! Test endpoint for the sampler pipe protocol.
//!
//! Usage: `qals-loopback <mode> [k]` where mode is one of
//! `exhaustive` (minimize each request), `zeros` (answer all zeros),
//! `hang` (never answer), `die` (exit after reading a request),
//! `garbage` (answer non-binary values) or `short` (answer one line too
//! few, then exit).

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Duration;

use qals_core::sampler::wire::{encode_response, RequestReader};
use qals_core::sampler::{ExhaustiveSampler, Sampler};

fn main() -> ExitCode {
    let mode = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "exhaustive".into());
    let stdin = io::stdin().lock();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut reader = RequestReader::new(stdin);
    let mut exhaustive = ExhaustiveSampler::default();
    loop {
        let weights = match reader.read_request() {
            Ok(Some(w)) => w,
            Ok(None) => return ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("qals-loopback: {e}");
                return ExitCode::from(2);
            }
        };
        let n = weights.len();
        let reply = match mode.as_str() {
            "exhaustive" => match exhaustive.sample(&weights, 1) {
                Ok(r) => encode_response(&r.bits),
                Err(e) => {
                    eprintln!("qals-loopback: {e}");
                    return ExitCode::from(3);
                }
            },
            "zeros" => encode_response(&vec![0; n]),
            "garbage" => "2\n".repeat(n),
            "short" => {
                let _ = out.write_all(encode_response(&vec![0; n.saturating_sub(1)]).as_bytes());
                let _ = out.flush();
                return ExitCode::SUCCESS;
            }
            "die" => return ExitCode::from(1),
            "hang" => loop {
                std::thread::sleep(Duration::from_secs(3600));
            },
            other => {
                eprintln!("qals-loopback: unknown mode {other:?}");
                return ExitCode::from(2);
            }
        };
        if out
            .write_all(reply.as_bytes())
            .and_then(|_| out.flush())
            .is_err()
        {
            return ExitCode::from(1);
        }
    }
}
