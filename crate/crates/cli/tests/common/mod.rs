#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use n3logic::{isomorphic, parse_document, Formula};

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    /// Parses stdout as N3.
    pub fn formula(&self) -> Result<Formula, String> {
        parse_document(&self.stdout, "http://example.org/output")
            .map_err(|e| format!("{e}\n{}", self.stdout))
    }
}

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn n3r(args: &[&str]) -> Output {
    n3r_in(&fixtures(), args, None)
}

pub fn n3r_stdin(args: &[&str], input: &str) -> Output {
    n3r_in(&fixtures(), args, Some(input))
}

/// Runs the binary, killing it if it takes longer than a minute.
pub fn n3r_in(dir: &std::path::Path, args: &[&str], input: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_n3r"))
        .args(args)
        .current_dir(dir)
        .stdin(if input.is_some() {
            Stdio::piped()
        } else {
            Stdio::null()
        })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn n3r");
    if let Some(text) = input {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    let started = Instant::now();
    loop {
        if child.try_wait().unwrap().is_some() {
            break;
        }
        if started.elapsed() > Duration::from_secs(60) {
            child.kill().unwrap();
            break;
        }
        std::thread::sleep(Duration::from_millis(10));
    }
    let out = child.wait_with_output().unwrap();
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn n3(text: &str) -> Formula {
    parse_document(text, "http://example.org/expected").unwrap_or_else(|e| panic!("{e}\n{text}"))
}

/// Ok when `out` exited 0 and printed a formula isomorphic to `expected`.
pub fn expect_exactly(out: &Output, expected: &Formula) -> Result<(), String> {
    if out.code != 0 {
        return Err(format!("exit {}: {}", out.code, out.stderr));
    }
    let got = out.formula()?;
    if isomorphic(&got, expected) {
        Ok(())
    } else {
        Err(format!("unexpected output:\n{}", out.stdout))
    }
}
