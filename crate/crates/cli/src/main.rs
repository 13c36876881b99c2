//! `mflab`: JSON-in, JSON-out front end to the `mflab` library.
//!
//! Precedence for every flag: command line, then `MFLAB_<FIELD>`, then the
//! `--config` file, then the built-in default.

mod cli;
mod parse;
mod run;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, CommandFactory, FromArgMatches};
use serde_json::{json, Value};

use crate::cli::Cli;

pub const ENV_PREFIX: &str = "MFLAB_";

fn env_name(id: &str) -> String {
    format!("{ENV_PREFIX}{}", id.to_uppercase())
}

/// The clap tree with an environment variable attached to every long flag.
fn command() -> clap::Command {
    fn attach(cmd: clap::Command) -> clap::Command {
        let cmd = cmd.mut_args(|arg| {
            if arg.get_long().is_some() {
                let name: &'static str = Box::leak(env_name(arg.get_id().as_str()).into_boxed_str());
                arg.env(name)
            } else {
                arg
            }
        });
        cmd.mut_subcommands(attach)
    }
    attach(Cli::command())
}

struct Failure {
    kind: String,
    message: String,
    code: u8,
}

impl From<mflab::Error> for Failure {
    fn from(e: mflab::Error) -> Self {
        Failure { kind: e.kind().into(), message: e.to_string(), code: if e.is_budget() { 2 } else { 1 } }
    }
}

fn usage_failure(message: String) -> Failure {
    Failure { kind: "usage".into(), message, code: 1 }
}

/// `--config <path>` or `--config=<path>` from raw arguments, else `MFLAB_CONFIG`.
fn config_path(args: &[String]) -> Option<PathBuf> {
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.into());
        }
        if a == "--config" {
            return args.get(i + 1).map(PathBuf::from);
        }
    }
    std::env::var_os(env_name("config")).map(PathBuf::from)
}

/// Flat `key = value` lines; `#` starts a comment.
fn read_config(path: &PathBuf) -> Result<Vec<(String, String)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { kind: "io".into(), message: format!("{}: {e}", path.display()), code: 1 })?;
    let mut out = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage_failure(format!("config line {}: expected key = value", line_no + 1)))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// The subcommand chain named on the command line.
fn leaf<'a>(root: &'a clap::Command, args: &[String]) -> &'a clap::Command {
    let mut cmd = root;
    for a in args.iter().skip(1) {
        if a.starts_with('-') {
            continue;
        }
        if let Some(sub) = cmd.find_subcommand(a) {
            cmd = sub;
        }
    }
    cmd
}

/// Appends config entries not already given on the command line or in the
/// environment. Unknown keys are rejected.
fn apply_config(root: &clap::Command, mut args: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let entries = read_config(&path)?;
    let cmd = leaf(root, &args);
    let mut extra = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let arg = cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| usage_failure(format!("unknown config key {key:?} for `{}`", cmd.get_name())))?;
        let flag = format!("--{key}");
        let on_command_line = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if on_command_line || std::env::var_os(env_name(arg.get_id().as_str())).is_some() {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => extra.push(flag),
                "false" => {}
                _ => return Err(usage_failure(format!("config key {key:?} expects true or false"))),
            }
        } else {
            extra.push(format!("{flag}={value}"));
        }
    }
    args.extend(extra);
    Ok(args)
}

/// Every flag of every subcommand with its default (null when it has none).
pub fn defaults() -> Value {
    fn walk(cmd: &clap::Command, prefix: &str, out: &mut BTreeMap<String, Value>) {
        for sub in cmd.get_subcommands() {
            let name = if prefix.is_empty() { sub.get_name().to_string() } else { format!("{prefix} {}", sub.get_name()) };
            if sub.has_subcommands() {
                walk(sub, &name, out);
                continue;
            }
            let flags: BTreeMap<String, Value> = sub
                .get_arguments()
                .filter_map(|a| {
                    let long = a.get_long()?;
                    if matches!(long, "help" | "version") {
                        return None;
                    }
                    let d = a.get_default_values();
                    let value = match (a.get_action(), d.first()) {
                        (ArgAction::SetTrue, _) => json!(false),
                        (_, Some(v)) => json!(v.to_string_lossy()),
                        (_, None) => Value::Null,
                    };
                    Some((long.to_string(), value))
                })
                .collect();
            out.insert(name, json!(flags));
        }
    }
    let mut out = BTreeMap::new();
    walk(&command(), "", &mut out);
    json!({ "env_prefix": ENV_PREFIX, "subcommands": out })
}

fn execute(args: Vec<String>) -> Result<Value, Failure> {
    let root = command();
    let args = apply_config(&root, args)?;
    let matches = match root.try_get_matches_from(&args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            return Err(usage_failure(first));
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| usage_failure(e.to_string()))?;
    Ok(run::run(cli.command)?)
}

fn main() -> ExitCode {
    match execute(std::env::args().collect()) {
        Ok(value) => {
            use std::io::Write;
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{value}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
