mod args;
mod check;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cyclo_core::constructions::{
    explore_m, jump_probe, jump_sequence, lemma1_triple, lemma2_range, lemma4_triple, prime_chain,
    theorem1_scan, theorem1_witness, SearchCaps,
};
use cyclo_core::cyclo::{height, inclusion_exclusion_coeffs, phi_coeffs, reduce_to_core};
use cyclo_core::oracle::oracle_record;
use cyclo_core::sparse::{check_p_properties, select_from_set, SparseConfig, SparseSet};
use cyclo_core::{Budget, Error, Subject, TernaryTriple};

use args::{Cli, Command, Format, GlobalOpts, SparseArgs, SparseCommand, SubjectArgs};
use check::OracleReport;

enum Failure {
    Core(Error),
    Io(String),
    Config(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::InvalidArgument(_)) | Failure::Config(_) => 2,
            Failure::Core(
                Error::Resource { .. }
                | Error::NotFound { .. }
                | Error::Overflow { .. }
                | Error::ArithmeticOverflow(_),
            ) => 3,
            Failure::Io(_) => 4,
            Failure::Core(Error::Internal(_)) | Failure::Mismatch(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Config(m) => write!(f, "bad configuration: {m}"),
            Failure::Mismatch(m) => write!(f, "oracle disagreement: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    budget: Budget,
}

fn resolve_budget(g: &GlobalOpts) -> Outcome<Budget> {
    let mut budget = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            toml::from_str::<ConfigFile>(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
                .budget
        }
        None => Budget::default(),
    };
    if let Some(m) = g.budget {
        budget.max_coeffs = m;
    }
    if let Some(s) = g.ap_steps {
        budget.ap_steps = s;
    }
    if let Some(c) = g.stream_degree_cap {
        budget.stream_degree_cap = c;
    }
    Ok(budget)
}

#[derive(Serialize)]
struct BudgetReport<'a> {
    #[serde(flatten)]
    budget: Budget,
    config: Option<&'a Path>,
    oracle: Option<OracleReport>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    params: Value,
    result: Value,
    budget_report: BudgetReport<'a>,
    version: &'static str,
}

struct Ctx<'a> {
    global: &'a GlobalOpts,
    budget: Budget,
}

impl Ctx<'_> {
    fn oracle(&self, subjects: impl IntoIterator<Item = Subject>) -> Outcome<Option<OracleReport>> {
        if !self.global.verify_oracle {
            return Ok(None);
        }
        let mut report = OracleReport::default();
        for s in subjects {
            report.check(s, &self.budget)?;
        }
        Ok(Some(report))
    }

    fn emit(
        &self,
        command: &str,
        params: impl Serialize,
        result: impl Serialize,
        oracle: Option<OracleReport>,
    ) -> Outcome<()> {
        let mismatch = oracle.as_ref().and_then(|o| o.mismatches.first().cloned());
        let env = Envelope {
            command,
            params: to_value(params)?,
            result: to_value(result)?,
            budget_report: BudgetReport {
                budget: self.budget,
                config: self.global.config.as_deref(),
                oracle,
            },
            version: env!("CARGO_PKG_VERSION"),
        };
        let text = if self.global.pretty {
            serde_json::to_string_pretty(&env)
        } else {
            serde_json::to_string(&env)
        }
        .map_err(|e| Failure::Core(Error::Internal(e.to_string())))?;
        write_stdout(&format!("{text}\n"))?;
        match mismatch {
            Some(m) => Err(Failure::Mismatch(m)),
            None => Ok(()),
        }
    }
}

fn to_value(v: impl Serialize) -> Outcome<Value> {
    serde_json::to_value(v).map_err(|e| Failure::Core(Error::Internal(e.to_string())))
}

fn write_stdout(text: &str) -> Outcome<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn subject_of(a: &SubjectArgs) -> Outcome<Subject> {
    match (&a.n, &a.triple) {
        (Some(n), None) => Ok(Subject::N(*n)),
        (None, Some(t)) if t.len() == 3 => Ok(Subject::Triple([t[0], t[1], t[2]])),
        _ => Err(Error::InvalidArgument("give either n or --triple P Q R".into()).into()),
    }
}

fn triple(p: u64, q: u64, r: u64) -> Subject {
    Subject::Triple([p, q, r])
}

fn coeffs_of(subject: Subject, ctx: &Ctx) -> Outcome<Vec<i64>> {
    if ctx.global.use_oracle {
        return Ok(oracle_record(subject)?.1.coeffs().to_vec());
    }
    Ok(match subject {
        Subject::N(n) => phi_coeffs(n, &ctx.budget)?.into_coeffs(),
        Subject::Triple([p, q, r]) => {
            inclusion_exclusion_coeffs(&TernaryTriple::new(p, q, r)?, &ctx.budget)?.into_coeffs()
        }
    })
}

fn render(coeffs: &[i64], format: Format, header: bool) -> String {
    match format {
        Format::Json => {
            let body: Vec<String> = coeffs.iter().map(i64::to_string).collect();
            format!("[{}]\n", body.join(","))
        }
        Format::Csv => {
            let mut s = String::with_capacity(coeffs.len() * 4);
            if header {
                s.push_str("index,value\n");
            }
            for (i, c) in coeffs.iter().enumerate() {
                s.push_str(&format!("{i},{c}\n"));
            }
            s
        }
    }
}

fn write_file(path: &PathBuf, data: &str) -> Outcome<()> {
    fs::write(path, data).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Outcome<()> {
    let ctx = Ctx {
        global: &cli.global,
        budget: resolve_budget(&cli.global)?,
    };
    let b = &ctx.budget;
    match &cli.command {
        Command::Height(a) => {
            let subject = subject_of(a)?;
            let rec = if ctx.global.use_oracle {
                oracle_record(subject)?.0
            } else {
                height(subject, b)?
            };
            ctx.emit("height", a, rec, ctx.oracle([subject])?)
        }
        Command::Coeffs(a) => {
            let subject = subject_of(&a.subject)?;
            let coeffs = coeffs_of(subject, &ctx)?;
            let text = render(&coeffs, a.format, a.header);
            match &a.out {
                None => {
                    write_stdout(&text)?;
                    match ctx
                        .oracle([subject])?
                        .and_then(|o| o.mismatches.first().cloned())
                    {
                        Some(m) => Err(Failure::Mismatch(m)),
                        None => Ok(()),
                    }
                }
                Some(path) => {
                    write_file(path, &text)?;
                    let height = coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
                    let result = json!({ "path": path, "length": coeffs.len(), "height": height });
                    ctx.emit("coeffs", a, result, ctx.oracle([subject])?)
                }
            }
        }
        Command::Witness(a) => {
            if let Some(count) = a.scan {
                let hits = theorem1_scan(a.h, count, b)?;
                let subjects: Vec<Subject> = hits.iter().map(|h| triple(h.q, h.r, h.p)).collect();
                return ctx.emit("witness", a, hits, ctx.oracle(subjects)?);
            }
            let caps = SearchCaps {
                q_cap: a.q_cap,
                r_cap: a.r_cap,
                p_cap: a.p_cap,
            };
            let cert = theorem1_witness(a.h, a.strict_larger_p, &caps, b)?;
            if ctx.global.verify_oracle {
                cert.verify(b)?;
            }
            ctx.emit(
                "witness",
                a,
                cert,
                ctx.oracle([triple(cert.q, cert.r, cert.p)])?,
            )
        }
        Command::Jumpseq(a) => {
            let seq = jump_sequence(TernaryTriple::new(a.p, a.q, a.r)?, a.steps, b)?;
            let subjects: Vec<Subject> = std::iter::once(seq.start)
                .chain(seq.steps.iter().map(|s| s.after))
                .map(|[p, q, r]| triple(p, q, r))
                .collect();
            ctx.emit("jumpseq", a, &seq, ctx.oracle(subjects)?)
        }
        Command::Probe(a) => {
            let probe = jump_probe(a.q, a.r, a.s, b)?;
            let subjects = [triple(a.q, a.r, a.s), triple(a.q, a.r, probe.shifted)];
            ctx.emit("probe", a, probe, ctx.oracle(subjects)?)
        }
        Command::Chain(a) => {
            let chain = prime_chain(TernaryTriple::new(a.p, a.q, a.r)?, a.steps, a.cap, b)?;
            let subjects: Vec<Subject> = chain
                .elements
                .iter()
                .map(|e| Subject::Triple(e.triple))
                .collect();
            ctx.emit("chain", a, &chain, ctx.oracle(subjects)?)
        }
        Command::ExploreM(a) => {
            let report = explore_m(a.p, a.q_max, a.r_max, b)?;
            let subjects: Vec<Subject> = report
                .witnesses
                .values()
                .map(|&[q, r]| triple(a.p, q, r))
                .collect();
            ctx.emit("explore-m", a, &report, ctx.oracle(subjects)?)
        }
        Command::Lemma1(a) => {
            let t = lemma1_triple(a.p, a.q_cap, a.r_cap, b)?;
            let rec = height(Subject::Triple(t.triple.as_array()), b)?;
            let result = json!({ "construction": t, "computed": rec });
            ctx.emit(
                "lemma1",
                a,
                result,
                ctx.oracle([Subject::Triple(t.triple.as_array())])?,
            )
        }
        Command::Lemma2(a) => ctx.emit("lemma2", a, lemma2_range(a.p)?, ctx.oracle([])?),
        Command::Lemma4(a) => {
            let t = lemma4_triple(a.p, a.k, a.l)?;
            let rec = height(Subject::Triple(t.triple.as_array()), b)?;
            let result = json!({ "construction": t, "computed": rec });
            ctx.emit(
                "lemma4",
                a,
                result,
                ctx.oracle([Subject::Triple(t.triple.as_array())])?,
            )
        }
        Command::Reduce(a) => {
            let red = reduce_to_core(a.n, b)?;
            ctx.emit(
                "reduce",
                a,
                red,
                ctx.oracle([Subject::N(a.n), Subject::N(red.core)])?,
            )
        }
        Command::Sparse(a) => run_sparse(a, &ctx),
    }
}

fn run_sparse(a: &SparseArgs, ctx: &Ctx) -> Outcome<()> {
    let config = SparseConfig {
        q_depth: a.depth.q_depth,
        r_depth: a.depth.r_depth,
        a_max: a.depth.a_max,
        p_depth: a.depth.p_depth,
    };
    let set = SparseSet::generate(config, &ctx.budget)?;
    let params = json!({ "depth": a.depth, "command": a.command });
    match &a.command {
        SparseCommand::Dump { xmax } => {
            let mut text = String::new();
            for line in set.dump(*xmax) {
                text.push_str(
                    &serde_json::to_string(&line)
                        .map_err(|e| Failure::Core(Error::Internal(e.to_string())))?,
                );
                text.push('\n');
            }
            write_stdout(&text)
        }
        SparseCommand::Count { x, trim } => {
            let set = if *trim { set.trim_small() } else { set };
            let count = set.count_p(*x)?;
            let result =
                json!({ "count": count, "removed": set.removed, "frontier": set.frontier });
            ctx.emit("sparse count", params, result, ctx.oracle([])?)
        }
        SparseCommand::Check { m, a } => ctx.emit(
            "sparse check",
            params,
            check_p_properties(*m, *a, &set)?,
            ctx.oracle([])?,
        ),
        SparseCommand::Trim => {
            let trimmed = set.trim_small();
            let result = json!({
                "removed": trimmed.removed,
                "frontier": trimmed.frontier,
                "qr_half_log_x0": set.half_log_threshold(false),
                "p_half_log_x0": set.half_log_threshold(true),
                "families": set
                    .families()
                    .map(|f| json!({ "family": f.family, "generated": f.elements.len(), "saturated": f.saturated }))
                    .collect::<Vec<_>>(),
            });
            ctx.emit("sparse trim", params, result, ctx.oracle([])?)
        }
        SparseCommand::Select { h } => {
            let found = select_from_set(*h, &set)?;
            let result = match found {
                Some([p, q, r]) => json!({ "found": true, "triple": [p, q, r] }),
                None => json!({
                    "found": false,
                    "reason": "no q, r, p among the generated 64-bit elements satisfy the three congruences",
                }),
            };
            ctx.emit("sparse select", params, result, ctx.oracle([])?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cyclo: {f}");
            ExitCode::from(f.code())
        }
    }
}
