//! Command-line front end.
//!
//! Exit codes: 0 success, 1 semantic false (not regular, not isomorphic,
//! commutation failure), 2 usage error, 3 refused precondition.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::crystal::{apply_word, CrystalError, Letter};
use crate::graph::{generate, parallel_iso_check, CrystalGraph, IsoOutcome};
use crate::monomial::{constants_from_slope, monomial_closure, psi, verify_psi_commutes, MonomialError, PsiOutcome};
use crate::partition::{ColoredMultiPartition, Residue};
use crate::regularity::{attracting_dimension, hook_triples, illegal_triples, HookTriple};
use crate::slope::{SlopeDatum, SlopeError, SlopeMode};
use crate::verify::{exhaustive, operator_consistency, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "slope-crystal", version, about = "Slope-ordered crystals on colored multi-partitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the crystal graph from the empty multi-partition.
    Generate(Common),
    /// Check regularity of a multi-partition and cross-check the tangent oracle.
    CheckRegular {
        #[command(flatten)]
        common: Common,
        /// File holding the multi-partition JSON.
        #[arg(long)]
        mp: PathBuf,
    },
    /// Apply an operator word such as "f0 f1 e0".
    Apply {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
        /// Start from this multi-partition file instead of the empty one.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Compare the graphs of two slope data.
    Iso {
        #[command(flatten)]
        common: Common,
        /// Second slope datum JSON.
        #[arg(long)]
        slope2: String,
    },
    /// Check that the monomial map intertwines the crystal operators.
    Psi(Common),
    /// Exhaustive checks over all multi-partitions up to a size.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        size: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub n: Option<u32>,
    /// Component residues, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub coloring: Option<Vec<Residue>>,
    /// Slope datum JSON, e.g. {"mode":"row","omega":"1","omega_bar":"1","xi":["1"]}.
    #[arg(long)]
    pub slope: Option<String>,
    #[arg(long)]
    pub max_boxes: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON config file; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub allow_nonaligned: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: Option<u32>,
    coloring: Option<Vec<Residue>>,
    slope: Option<Value>,
    max_boxes: Option<usize>,
    format: Option<Format>,
    output: Option<PathBuf>,
    allow_nonaligned: Option<bool>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: Option<u32>,
    pub coloring: Option<Vec<Residue>>,
    pub slope: Option<String>,
    pub max_boxes: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub allow_nonaligned: bool,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Refused(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Refused(_) => EXIT_REFUSED,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Refused(m) => m,
        }
    }
}

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

impl From<SlopeError> for CliError {
    fn from(e: SlopeError) -> Self {
        match e {
            SlopeError::NotStrictlyAligned { .. } => {
                CliError::Refused(format!("{e}; pass --allow-nonaligned to override"))
            }
            _ => usage(e),
        }
    }
}

impl From<CrystalError> for CliError {
    fn from(e: CrystalError) -> Self {
        match e {
            CrystalError::NotAligned => CliError::Refused(e.to_string()),
            CrystalError::Slope(s) => s.into(),
            _ => usage(e),
        }
    }
}

impl From<MonomialError> for CliError {
    fn from(e: MonomialError) -> Self {
        match e {
            MonomialError::NotIntegral => CliError::Refused(e.to_string()),
            MonomialError::Crystal(c) => c.into(),
            MonomialError::Slope(s) => s.into(),
            _ => usage(e),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Crystal(c) => c.into(),
            _ => usage(e),
        }
    }
}

impl RunConfig {
    pub fn resolve(common: &Common) -> Result<RunConfig, CliError> {
        let file = match &common.config {
            Some(path) => {
                let text = read(path)?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let slope = match (&common.slope, file.slope) {
            (Some(s), _) => Some(s.clone()),
            (None, Some(Value::String(s))) => Some(s),
            (None, Some(v)) => Some(v.to_string()),
            (None, None) => None,
        };
        Ok(RunConfig {
            n: common.n.or(file.n),
            coloring: common.coloring.clone().or(file.coloring),
            slope,
            max_boxes: common.max_boxes.or(file.max_boxes).unwrap_or(0),
            format: common.format.or(file.format).unwrap_or(Format::Json),
            output: common.output.clone().or(file.output),
            allow_nonaligned: common.allow_nonaligned || file.allow_nonaligned.unwrap_or(false),
        })
    }

    fn n(&self) -> Result<u32, CliError> {
        self.n.ok_or_else(|| usage("missing --n"))
    }

    fn coloring(&self) -> Result<&[Residue], CliError> {
        self.coloring.as_deref().ok_or_else(|| usage("missing --coloring"))
    }

    fn slope(&self) -> Result<SlopeDatum, CliError> {
        let text = self.slope.as_deref().ok_or_else(|| usage("missing --slope"))?;
        self.parse_slope(text)
    }

    fn parse_slope(&self, text: &str) -> Result<SlopeDatum, CliError> {
        let xi = if self.allow_nonaligned {
            SlopeDatum::from_json_unaligned(text)?
        } else {
            SlopeDatum::from_json(text)?
        };
        if let Some(c) = &self.coloring {
            if c.len() != xi.components() {
                return Err(usage(format!(
                    "coloring has {} entries but the slope datum has {} components",
                    c.len(),
                    xi.components()
                )));
            }
        }
        Ok(xi)
    }
}

/// Output of one command: exit code plus the text for standard output.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn report(command: &str, status: &str, witness: Value, counts: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({
        "command": command,
        "status": status,
        "witness": witness,
        "counts": counts,
    }))
    .expect("json values serialize");
    s.push('\n');
    s
}

fn text_report(command: &str, status: &str, witness: &Value, counts: &Value) -> String {
    let mut s = format!("{command}: {status}\n");
    if let Value::Object(map) = counts {
        for (k, v) in map {
            s.push_str(&format!("  {k}: {v}\n"));
        }
    }
    if !witness.is_null() {
        s.push_str(&format!("  witness: {witness}\n"));
    }
    s
}

fn render(cfg: &RunConfig, command: &str, status: &str, witness: Value, counts: Value) -> String {
    match cfg.format {
        Format::Text => text_report(command, status, &witness, &counts),
        _ => report(command, status, witness, counts),
    }
}

/// Runs a parsed command, writing to `--output` when given.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let (common, outcome) = match &cli.command {
        Command::Generate(c) => (c, cmd_generate(&RunConfig::resolve(c)?)?),
        Command::CheckRegular { common, mp } => (common, cmd_check_regular(&RunConfig::resolve(common)?, mp)?),
        Command::Apply { common, word, from } => {
            (common, cmd_apply(&RunConfig::resolve(common)?, word, from.as_deref())?)
        }
        Command::Iso { common, slope2 } => (common, cmd_iso(&RunConfig::resolve(common)?, slope2)?),
        Command::Psi(c) => (c, cmd_psi(&RunConfig::resolve(c)?)?),
        Command::Verify { common, size } => (common, cmd_verify(&RunConfig::resolve(common)?, *size)?),
    };
    let cfg = RunConfig::resolve(common)?;
    match cfg.output {
        Some(path) => {
            fs::write(&path, &outcome.stdout).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok(Outcome { code: outcome.code, stdout: String::new() })
        }
        None => Ok(outcome),
    }
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let xi = cfg.slope()?;
    let g = generate(&xi, cfg.n()?, cfg.coloring()?, cfg.max_boxes, cfg.allow_nonaligned)?;
    let stdout = match cfg.format {
        Format::Json => g.export_json() + "\n",
        Format::Dot => g.export_dot(),
        Format::Text => graph_text(&g),
    };
    Ok(Outcome { code: EXIT_OK, stdout })
}

fn graph_text(g: &CrystalGraph) -> String {
    let mut s = format!("vertices {}\nedges {}\n", g.vertices().len(), g.edges().len());
    for (idx, v) in g.vertices().iter().enumerate() {
        s.push_str(&format!("{idx} {}\n", v.to_json()));
    }
    for e in g.edges() {
        s.push_str(&format!("{} -f{}-> {}\n", e.source, e.residue, e.target));
    }
    s
}

fn triple_string(t: &HookTriple) -> String {
    format!("({},{},{})", t.cell, t.source, t.target)
}

pub fn cmd_check_regular(cfg: &RunConfig, mp_path: &Path) -> Result<Outcome, CliError> {
    let xi = cfg.slope()?;
    let mp = ColoredMultiPartition::from_json(&read(mp_path)?).map_err(|e| usage(format!("multi-partition: {e}")))?;
    if let Some(n) = cfg.n {
        if n != mp.n() {
            return Err(usage(format!("--n {n} disagrees with the multi-partition's n = {}", mp.n())));
        }
    }
    if let Some(c) = &cfg.coloring {
        if c.as_slice() != mp.coloring() {
            return Err(usage("--coloring disagrees with the multi-partition"));
        }
    }
    if xi.components() != mp.components() {
        return Err(usage("slope datum and multi-partition have different component counts"));
    }
    let hooks = hook_triples(&mp).len();
    let illegal = illegal_triples(&xi, &mp).map_err(usage)?;
    let attracting = if xi.mode().is_perturbed() { attracting_dimension(&xi, &mp).ok() } else { None };
    let regular = illegal.is_empty();
    let oracle_agrees = attracting.map(|a| (a == hooks) == regular && a + illegal.len() == hooks);
    let witness = Value::from(illegal.iter().map(triple_string).collect::<Vec<_>>());
    let counts = json!({
        "hook_triples": hooks,
        "illegal_triples": illegal.len(),
        "attracting_dimension": attracting,
        "oracle_agrees": oracle_agrees,
    });
    let status = if regular { "regular" } else { "not_regular" };
    Ok(Outcome {
        code: if regular { EXIT_OK } else { EXIT_FALSE },
        stdout: render(cfg, "check-regular", status, witness, counts),
    })
}

/// Parses whitespace-separated tokens `f<r>` / `e<r>`.
pub fn parse_word(word: &str, n: u32) -> Result<Vec<Letter>, CliError> {
    word.split_whitespace()
        .map(|tok| {
            let (kind, rest) = tok.split_at(tok.chars().next().map_or(0, char::len_utf8));
            let r: Residue = rest.parse().map_err(|_| usage(format!("bad operator token {tok:?}")))?;
            if r >= n {
                return Err(usage(format!("residue {r} out of range in {tok:?}")));
            }
            match kind {
                "f" => Ok(Letter::F(r)),
                "e" => Ok(Letter::E(r)),
                _ => Err(usage(format!("bad operator token {tok:?}"))),
            }
        })
        .collect()
}

pub fn cmd_apply(cfg: &RunConfig, word: &str, from: Option<&Path>) -> Result<Outcome, CliError> {
    let xi = cfg.slope()?;
    let start = match from {
        Some(path) => ColoredMultiPartition::from_json(&read(path)?).map_err(|e| usage(format!("multi-partition: {e}")))?,
        None => ColoredMultiPartition::empty(cfg.n()?, cfg.coloring()?.to_vec()).map_err(usage)?,
    };
    if !xi.mode().is_perturbed() {
        return Err(usage(CrystalError::NotPerturbed));
    }
    let letters = parse_word(word, start.n())?;
    let result = apply_word(&xi, &start, &letters)?;
    let stdout = match result {
        Some(mp) => mp.to_json() + "\n",
        None => "0\n".to_string(),
    };
    Ok(Outcome { code: EXIT_OK, stdout })
}

pub fn cmd_iso(cfg: &RunConfig, slope2: &str) -> Result<Outcome, CliError> {
    let a = cfg.slope()?;
    let b = cfg.parse_slope(slope2)?;
    let (n, coloring) = (cfg.n()?, cfg.coloring()?);
    let ga = generate(&a, n, coloring, cfg.max_boxes, cfg.allow_nonaligned)?;
    let gb = generate(&b, n, coloring, cfg.max_boxes, cfg.allow_nonaligned)?;
    let outcome = parallel_iso_check(&ga, &gb);
    let weights_equal = ga.weight_multiplicities() == gb.weight_multiplicities();
    let (status, witness, matched) = match &outcome {
        IsoOutcome::Isomorphic { matched } if weights_equal => ("isomorphic", Value::Null, *matched),
        IsoOutcome::Isomorphic { matched } => ("weights_differ", Value::Null, *matched),
        IsoOutcome::Mismatch(w) => ("mismatch", json!({"word": w.word_string(), "reason": w.reason}), 0),
    };
    let counts = json!({
        "vertices_first": ga.vertices().len(),
        "vertices_second": gb.vertices().len(),
        "matched": matched,
        "weights_equal": weights_equal,
    });
    let code = if outcome.is_ok() && weights_equal { EXIT_OK } else { EXIT_FALSE };
    Ok(Outcome { code, stdout: render(cfg, "iso", status, witness, counts) })
}

pub fn cmd_psi(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let xi = cfg.slope()?;
    if !xi.is_integral() {
        return Err(MonomialError::NotIntegral.into());
    }
    if !xi.is_aligned() {
        return Err(CliError::Refused("psi needs an aligned slope datum".into()));
    }
    let row = xi.with_mode(SlopeMode::Row)?;
    let (n, coloring) = (cfg.n()?, cfg.coloring()?);
    let g = generate(&row, n, coloring, cfg.max_boxes, false)?;
    let c = constants_from_slope(&row, n)?;
    let outcome = verify_psi_commutes(&row, &c, &g)?;
    let root = psi(&row, g.root())?;
    let closure = monomial_closure(&c, &root, cfg.max_boxes);
    let iso = parallel_iso_check(&g, &closure);
    let (status, witness) = match (&outcome, &iso) {
        (PsiOutcome::Counterexample(w), _) => (
            "counterexample",
            json!({"vertex": w.vertex.to_json(), "residue": w.residue, "check": w.check}),
        ),
        (_, IsoOutcome::Mismatch(w)) => ("closure_mismatch", json!({"word": w.word_string(), "reason": w.reason})),
        _ => ("commutes", Value::Null),
    };
    let counts = json!({
        "vertices": g.vertices().len(),
        "edges": g.edges().len(),
        "closure_vertices": closure.vertices().len(),
        "root": root.to_string(),
        "K": c.k(),
    });
    let code = if status == "commutes" { EXIT_OK } else { EXIT_FALSE };
    Ok(Outcome { code, stdout: render(cfg, "psi", status, witness, counts) })
}

pub fn cmd_verify(cfg: &RunConfig, size: Option<usize>) -> Result<Outcome, CliError> {
    let xi = cfg.slope()?;
    let size = size.unwrap_or(cfg.max_boxes);
    let (n, coloring) = (cfg.n()?, cfg.coloring()?);
    if !xi.mode().is_perturbed() {
        return Err(usage(CrystalError::NotPerturbed));
    }
    let mut rep = exhaustive(&xi, n, coloring, size)?;
    let g = generate(&xi, n, coloring, size, false)?;
    if let Some(f) = operator_consistency(&xi, &g)? {
        rep.failures.push(f);
    }
    let witness = if rep.is_ok() {
        Value::Null
    } else {
        Value::from(
            rep.failures
                .iter()
                .map(|f| json!({"check": f.check, "vertex": f.vertex.to_json(), "detail": f.detail}))
                .collect::<Vec<_>>(),
        )
    };
    let counts = serde_json::to_value(&rep.counts).expect("counts serialize");
    let status = if rep.is_ok() { "ok" } else { "failed" };
    Ok(Outcome {
        code: if rep.is_ok() { EXIT_OK } else { EXIT_FALSE },
        stdout: render(cfg, "verify", status, witness, counts),
    })
}
