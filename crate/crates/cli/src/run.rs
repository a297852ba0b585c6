use std::path::{Path, PathBuf};

use boostlab_core::engine::{
    check_regret_bound, misclassified_reference, potential_diagnostics, projection_diagnostics, run_boosting,
    DenseTrace, RunRecord,
};
use boostlab_core::SmoothDistribution;
use clap::Args;
use serde_json::json;

use crate::config::{RunArgs, RunConfig};
use crate::failure::{CmdResult, Failure};
use crate::output::{write_atomic, write_json};

#[derive(Args, Debug)]
pub struct RunCmd {
    #[command(flatten)]
    pub args: RunArgs,
    /// Directory for run.jsonl, summary.json and diagnostics.json
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

pub fn write_record(dir: &Path, record: &RunRecord) -> anyhow::Result<()> {
    write_atomic(&dir.join("run.jsonl"), |w| Ok(record.write_jsonl(w)?))?;
    write_json(&dir.join("summary.json"), &record.summary_json())
}

/// Potential, regret and projection checks against the uniform distribution
/// and, when it is smooth enough, the uniform distribution on the mistakes.
fn dense_diagnostics(trace: &DenseTrace, wrong: &[usize]) -> CmdResult<(serde_json::Value, Option<String>)> {
    let m = trace.m();
    let mut refs = vec![("uniform", SmoothDistribution::uniform(m))];
    if !wrong.is_empty() {
        let d = misclassified_reference(m, wrong)?;
        if d.is_smooth(trace.epsilon) {
            refs.push(("misclassified", d));
        }
    }
    let mut checks = Vec::new();
    let mut violation = None;
    for (name, d) in &refs {
        let potential = potential_diagnostics(trace, d)?;
        let regret = check_regret_bound(trace, d)?;
        if let Err(e) = potential.check().and(regret.check()) {
            violation.get_or_insert(format!("reference {name}: {e}"));
        }
        checks.push(json!({
            "reference": name,
            "worst_update_slack": potential.worst_update_slack,
            "worst_proj_slack": potential.worst_proj_slack,
            "regret": regret,
        }));
    }
    let only: Vec<SmoothDistribution> = refs.into_iter().map(|(_, d)| d).collect();
    let projections = projection_diagnostics(trace, &only)?;
    if let Err(e) = projections.check() {
        violation.get_or_insert(format!("projection: {e}"));
    }
    let value = json!({
        "references": checks,
        "projection_steps": projections.steps.len(),
        "projection_worst_slack": if projections.steps.is_empty() { None } else { Some(projections.worst_slack()) },
    });
    Ok((value, violation))
}

pub fn execute(cmd: &RunCmd) -> CmdResult {
    let cfg: RunConfig = cmd.args.resolve()?;
    let data = cfg.load_data()?;
    let mut learner = cfg.make_learner(data.len());
    let output = match run_boosting(&data, &mut *learner, &cfg.boost) {
        Ok(o) => o,
        Err(aborted) => {
            if let Some(dir) = &cmd.out {
                write_record(dir, &aborted.record)?;
            }
            return Err(Failure::from(aborted.error.clone()));
        }
    };
    if let Some(dir) = &cmd.out {
        write_record(dir, &output.record)?;
    }
    println!("{}", serde_json::to_string_pretty(&output.record.summary_json()).map_err(anyhow::Error::from)?);

    if let Some(trace) = &output.trace {
        let wrong: Vec<usize> = (0..data.len())
            .filter(|&i| output.hypothesis.predict(&data, i) != data.label(i))
            .collect();
        let (diag, violation) = dense_diagnostics(trace, &wrong)?;
        if let Some(dir) = &cmd.out {
            write_json(&dir.join("diagnostics.json"), &diag)?;
        }
        eprintln!("diagnostics: {diag}");
        if let Some(v) = violation {
            return Err(Failure::Violation(v));
        }
    }
    if output.record.summary.contract_violations > 0 {
        eprintln!(
            "warning: weak learner missed its advantage on {} iterations",
            output.record.summary.contract_violations
        );
    }
    Ok(())
}
