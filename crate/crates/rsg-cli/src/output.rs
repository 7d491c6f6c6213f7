use std::fs;
use std::process::ExitCode;

use serde_json::{json, Value};

use crate::error::CliError;
use crate::Cli;

/// Result of one command: summary lines for the terminal, a JSON body, and
/// derived DOT/CSV views.
#[derive(Debug, Default)]
pub struct Outcome {
    pub name: String,
    pub summary: Vec<String>,
    pub body: Value,
    pub artifacts: Vec<(String, String)>,
    pub negative: bool,
}

impl Outcome {
    pub fn new(name: &str, body: Value) -> Outcome {
        Outcome { name: name.into(), body, ..Default::default() }
    }

    pub fn line(mut self, s: impl Into<String>) -> Outcome {
        self.summary.push(s.into());
        self
    }

    pub fn artifact(mut self, file: &str, text: String) -> Outcome {
        self.artifacts.push((file.into(), text));
        self
    }

    pub fn negative(mut self, yes: bool) -> Outcome {
        self.negative = yes;
        self
    }
}

/// The JSON document of a run: schema, config and the command body.
pub fn document(cli: &Cli, o: &Outcome) -> Value {
    let c = &cli.common;
    json!({
        "schema": "v1",
        "command": o.name,
        "config": {
            "depth": c.depth,
            "horizon": c.horizon,
            "budget_states": c.budget_states,
            "jobs": c.jobs,
            "seed": c.seed,
        },
        "negative": o.negative,
        "result": o.body,
    })
}

pub fn emit(cli: &Cli, o: Outcome) -> Result<ExitCode, CliError> {
    let doc = document(cli, &o);
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    if cli.common.json {
        print!("{text}");
    } else {
        for l in &o.summary {
            println!("{l}");
        }
    }
    if let Some(dir) = &cli.common.out {
        fs::create_dir_all(dir)?;
        let stem = o.name.replace(' ', "-");
        fs::write(dir.join(format!("{stem}.json")), &text)?;
        for (file, body) in &o.artifacts {
            fs::write(dir.join(file), body)?;
        }
    }
    Ok(if o.negative { ExitCode::from(1) } else { ExitCode::SUCCESS })
}
