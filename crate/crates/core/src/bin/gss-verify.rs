use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gss_core::harness::{
    emit_report, load_config, run_sections, ConfigError, OutputFormat, Report, RunConfig, Sections,
    EXIT_CONFIG, EXIT_FAILURE, EXIT_OK,
};
use gss_core::model::ConnectionKind;
use gss_core::symbolic::{fuzz_normalize, rule_soundness};

#[derive(Parser)]
#[command(name = "gss-verify", version, about = "Curvature and submanifold checks on generalized Sasakian-space-forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure identities on standard and seeded frame structures.
    Validate(Common),
    /// Run the submanifold suites and the characterization checks.
    Lemmas(Common),
    /// Derive each modified curvature from its difference tensor and compare.
    Derive(Common),
    /// Check rewrite-rule soundness and normalization on random expressions.
    Fuzz {
        #[command(flatten)]
        common: Common,
        /// Number of random expressions.
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        /// Maximum terms per expression.
        #[arg(long, default_value_t = 50)]
        max_terms: usize,
    },
    /// Run everything and emit a full report.
    Report(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated half-dimensions n (ambient dimension 2n+1).
    #[arg(long)]
    dims: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// Use seeds 1..=N.
    #[arg(long, value_name = "N")]
    seed_battery: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Relative tolerance.
    #[arg(long)]
    tol: Option<String>,
    /// Comma-separated connection names, or `all`.
    #[arg(long)]
    kinds: Option<String>,
    /// Coefficient sets `f1,f2,f3;f1,f2,f3`.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        let overrides: [(&str, Option<String>); 7] = [
            ("dims", self.dims.clone()),
            ("seeds", self.seeds.clone()),
            ("seed_battery", self.seed_battery.map(|n| n.to_string())),
            ("samples", self.samples.map(|n| n.to_string())),
            ("tol", self.tol.clone()),
            ("kinds", self.kinds.clone()),
            ("coeffs", self.coeffs.clone()),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if let Some(f) = &self.format {
            cfg.set("format", f)?;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_run(common: &Common, sections: Sections) -> Result<i32, String> {
    let cfg = common.resolve().map_err(|e| e.to_string())?;
    let mut report: Report = run_sections(&cfg, sections).map_err(|e| e.to_string())?;
    report.stamp();
    output(&cfg, &emit_report(&report, cfg.format))?;
    let s = &report.summary;
    eprintln!(
        "{} suites: {} passed, {} failed, {} skipped, {} expected failures, {} errata, {} inconclusive",
        s.total, s.passed, s.failed, s.skipped, s.expected_failures, s.errata, s.inconclusive
    );
    Ok(report.exit_code())
}

fn fuzz(common: &Common, count: usize, max_terms: usize) -> Result<i32, String> {
    let cfg = common.resolve().map_err(|e| e.to_string())?;
    let seed = cfg.seeds[0];
    let rules = rule_soundness(100, seed, 1e-12);
    let norm = fuzz_normalize(count, max_terms, seed, 10);
    let ok = rules.iter().all(|r| r.passed) && norm.passed();
    let text = match cfg.format {
        OutputFormat::Json => {
            let v = serde_json::json!({ "rules": rules, "normalization": norm });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializes"))
        }
        OutputFormat::Markdown => {
            let mut s = String::from("| rule | max residual | verdict |\n|---|---|---|\n");
            for r in &rules {
                s += &format!(
                    "| {} | {:.3e} | {} |\n",
                    r.rule,
                    r.max_residual,
                    if r.passed { "PASS" } else { "FAIL" }
                );
            }
            s += &format!(
                "\n{} expressions, {} idempotence failures, {} soundness failures ({} checked)\n",
                norm.expressions, norm.idempotence_failures, norm.soundness_failures, norm.soundness_checked
            );
            s
        }
    };
    output(&cfg, &text)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let none = Sections {
        structures: false,
        submanifolds: false,
        theorems: false,
        derivations: false,
    };
    let result = match &cli.command {
        Command::Validate(c) => report_run(c, Sections { structures: true, ..none }),
        Command::Lemmas(c) => report_run(
            c,
            Sections {
                submanifolds: true,
                theorems: true,
                ..none
            },
        ),
        Command::Derive(c) => {
            let mut c = c.clone();
            if c.kinds.is_none() {
                let names: Vec<&str> = ConnectionKind::MODIFIED.iter().map(|k| k.name()).collect();
                c.kinds = Some(names.join(","));
            }
            report_run(&c, Sections { derivations: true, ..none })
        }
        Command::Fuzz {
            common,
            count,
            max_terms,
        } => fuzz(common, *count, *max_terms),
        Command::Report(c) => report_run(c, Sections::ALL),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
