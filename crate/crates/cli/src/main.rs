mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tensorkit_core::mech::ConstraintPreset;
use tensorkit_core::reproduce::{self, TableReport};
use tensorkit_core::solve::{
    invariant_basis, spans_equal, sparsify_single, span::max_span_residual, Algorithm, NullspaceOptions, SolveOptions,
};
use tensorkit_core::spaces::predict_dimension;
use tensorkit_core::{Convention, DenseTensor, Error, GroupSpec, SpaceSpec};

use output::*;

const EXIT_CONFIG: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "tensorkit", version, about = "Invariant tensor bases for symmetry groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an invariant basis.
    Basis(BasisArgs),
    /// Predicted and computed invariant dimensions.
    Dims(DimsArgs),
    /// Regenerate a published table and report discrepancies.
    Reproduce(ReproduceArgs),
    /// Sparsest single tensor in the span of an invariant basis.
    Sparsify(BasisArgs),
    /// Close a group under multiplication and list its elements.
    Closure(ClosureArgs),
    /// Compare the spans of two basis files written with `--format json`.
    CheckSpan(CheckSpanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct GroupArgs {
    /// Catalog group name.
    #[arg(long, conflicts_with = "group_file")]
    group: Option<String>,
    #[arg(long, default_value = "so3_kb")]
    convention: String,
    /// JSON file with `name`, `generators` and optional `finite`.
    #[arg(long)]
    group_file: Option<PathBuf>,
}

impl GroupArgs {
    fn resolve(&self) -> tensorkit_core::Result<GroupSpec> {
        match (&self.group, &self.group_file) {
            (Some(name), None) => GroupSpec::catalog(name, self.convention.parse()?),
            (None, Some(path)) => GroupSpec::from_file(path),
            _ => Err(Error::InvalidArgument("give exactly one of --group or --group-file".into())),
        }
    }
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn emit(&self, text: &str) -> tensorkit_core::Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Args)]
struct BasisArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    space: Option<String>,
    /// none, modulus or yield.
    #[arg(long, default_value = "none")]
    preset: String,
    /// svd, truncated or randomized.
    #[arg(long, default_value = "svd")]
    algorithm: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 5)]
    oversample: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long, conflicts_with_all = ["group", "group_file"])]
    all_groups: Option<String>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long, default_value = "so3_kb")]
    convention: String,
    #[arg(long)]
    group_file: Option<PathBuf>,
    #[arg(long)]
    space: Option<String>,
    #[arg(long, default_value = "none")]
    preset: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ReproduceArgs {
    /// karafillis, manufactured, crystal_groups, 2nd_order, single4, appendixA or appendixB.
    table: String,
    #[arg(long)]
    group: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ClosureArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CheckSpanArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

/// A failure with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoSpectralGap { .. }
            | Error::NotConverged { .. }
            | Error::Svd
            | Error::NotInvariant(_)
            | Error::NonIntegral { .. }
            | Error::Lp(_) => EXIT_FAILED,
            _ => EXIT_CONFIG,
        };
        Failure(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Basis(a) => cmd_basis(&a),
        Command::Dims(a) => cmd_dims(&a),
        Command::Reproduce(a) => cmd_reproduce(&a),
        Command::Sparsify(a) => cmd_sparsify(&a),
        Command::Closure(a) => cmd_closure(&a),
        Command::CheckSpan(a) => cmd_check_span(&a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

/// Space and trace conditions from `--space` and `--preset`.
fn resolve_space(space: Option<&str>, preset: &str) -> tensorkit_core::Result<(SpaceSpec, Vec<(usize, usize)>)> {
    let preset: ConstraintPreset = preset.parse()?;
    let given = space.map(SpaceSpec::parse).transpose()?;
    match (preset.space(), given) {
        (None, Some(s)) => Ok((s, vec![])),
        (None, None) => Err(Error::InvalidArgument("--space is required without a preset".into())),
        (Some(p), given) => {
            if let Some(g) = given {
                let compatible = g == p || g == SpaceSpec::tensor_power(4, 3);
                if !compatible {
                    return Err(Error::InvalidArgument(format!(
                        "preset needs an order-4 space over R3, got {g}"
                    )));
                }
            }
            Ok((p, preset.traces()))
        }
    }
}

fn solve(a: &BasisArgs) -> tensorkit_core::Result<(GroupSpec, tensorkit_core::solve::BasisSet)> {
    let group = a.group.resolve()?;
    let (space, traces) = resolve_space(a.space.as_deref(), &a.preset)?;
    let algorithm: Algorithm = a.algorithm.parse()?;
    if algorithm == Algorithm::Randomized && !group.finite_hint {
        return Err(Error::InfiniteGroup(group.name.clone()));
    }
    let opts = SolveOptions {
        algorithm,
        nullspace: NullspaceOptions::from_env()?,
        rank: a.rank,
        seed: a.seed,
        samples: a.samples,
        oversample: a.oversample,
    };
    let basis = invariant_basis(&group, &space, &traces, &opts)?;
    Ok((group, basis))
}

fn cmd_basis(a: &BasisArgs) -> CmdResult {
    let (group, basis) = solve(a)?;
    let elements = basis.display_elements();
    let residuals = invariance_residuals(&group, &elements)?;
    let text = match a.out.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&basis_json(&basis, &elements, &residuals)).unwrap()),
        Format::Csv => {
            let mut s = String::from("element,");
            s.push_str(&(1..=basis.order).map(|k| format!("i{k}")).collect::<Vec<_>>().join(","));
            s.push_str(",value\n");
            for (k, t) in elements.iter().enumerate() {
                tensor_csv(k, t, &mut s);
            }
            s
        }
        Format::Text => {
            let p = &basis.provenance;
            let mut s = format!(
                "{} ({}) on {}: {} bases [{}]\n",
                p.group,
                p.convention,
                p.space,
                elements.len(),
                p.algorithm
            );
            for (k, t) in elements.iter().enumerate() {
                s.push_str(&format!("basis {}\n", k + 1));
                s.push_str(&tensor_text(t));
            }
            s
        }
    };
    a.out.emit(&text)?;
    Ok(())
}

fn cmd_sparsify(a: &BasisArgs) -> CmdResult {
    let (_, basis) = solve(a)?;
    let s = sparsify_single(&basis)?;
    let text = match a.out.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "schema": 1,
                "order": basis.order,
                "dim": basis.dim,
                "group": basis.provenance.group,
                "convention": basis.provenance.convention,
                "space": basis.provenance.space,
                "nnz": s.nnz,
                "l1": s.l1,
                "elements": [tensor_json(&s.tensor)],
            }))
            .unwrap()
        ),
        Format::Csv => {
            let mut out = String::new();
            tensor_csv(0, &s.tensor, &mut out);
            out
        }
        Format::Text => format!("nnz {}  L1 {}\n{}", s.nnz, fmt4(s.l1), tensor_text(&s.tensor)),
    };
    a.out.emit(&text)?;
    Ok(())
}

fn cmd_dims(a: &DimsArgs) -> CmdResult {
    let (space, traces) = resolve_space(a.space.as_deref(), &a.preset)?;
    let groups: Vec<GroupSpec> = match &a.all_groups {
        Some(c) => {
            let c: Convention = c.parse()?;
            reproduce::fixtures::SUMMARY_GROUPS
                .iter()
                .map(|n| GroupSpec::catalog(n, c))
                .collect::<Result<_, _>>()?
        }
        None => vec![GroupArgs {
            group: a.group.clone(),
            convention: a.convention.clone(),
            group_file: a.group_file.clone(),
        }
        .resolve()?],
    };
    let nullspace = NullspaceOptions::from_env()?;
    let mut rows = Vec::new();
    let mut mismatch = false;
    for g in &groups {
        let computed = invariant_basis(
            g,
            &space,
            &traces,
            &SolveOptions {
                nullspace,
                ..Default::default()
            },
        )?
        .len() as u64;
        // The prediction covers the space alone; trace conditions only lower it.
        let predicted = if g.finite_hint {
            Some(predict_dimension(&space, &g.close()?)?)
        } else {
            None
        };
        let ok = match predicted {
            Some(p) if traces.is_empty() => p == computed,
            Some(p) => computed <= p,
            None => true,
        };
        mismatch |= !ok;
        rows.push((g.name.clone(), predicted, computed, ok));
    }
    let text = match a.out.format {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(n, p, c, ok)| json!({"group": n, "predicted": p, "computed": c, "match": ok}))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&json!({"schema": 1, "space": space.to_string(), "rows": v})).unwrap())
        }
        Format::Csv => {
            let mut s = String::from("group,predicted,computed,match\n");
            for (n, p, c, ok) in &rows {
                s.push_str(&format!("{n},{},{c},{ok}\n", p.map_or(String::new(), |p| p.to_string())));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:<12} {:>9} {:>9}  match\n", "group", "predicted", "computed");
            for (n, p, c, ok) in &rows {
                let p = p.map_or("-".to_string(), |p| p.to_string());
                s.push_str(&format!("{n:<12} {p:>9} {c:>9}  {}\n", if *ok { "yes" } else { "NO" }));
            }
            s
        }
    };
    a.out.emit(&text)?;
    if mismatch {
        return Err(Failure(EXIT_FAILED, "prediction and computation disagree".into()));
    }
    Ok(())
}

fn report_text(r: &TableReport) -> String {
    let widths: Vec<usize> = (0..r.header.len())
        .map(|c| {
            r.rows
                .iter()
                .map(|row| row[c].len())
                .chain([r.header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let mut s: String = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}  "))
            .collect();
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut s = format!("table {} ({} checks)\n", r.table, r.checks);
    s.push_str(&line(&r.header));
    for row in &r.rows {
        s.push_str(&line(row));
    }
    if r.discrepancies.rows.is_empty() {
        s.push_str("no discrepancies\n");
    } else {
        s.push_str("discrepancies:\n");
        for d in &r.discrepancies.rows {
            s.push_str(&format!(
                "  [{}] {}: published {} | computed {} | oracle {}\n",
                if d.confirmed { "confirmed" } else { "UNCONFIRMED" },
                d.cell,
                d.published,
                d.computed,
                d.oracle
            ));
        }
    }
    s
}

fn cmd_reproduce(a: &ReproduceArgs) -> CmdResult {
    let r = reproduce::reproduce(&a.table, a.group.as_deref())?;
    let text = match a.out.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&r).unwrap()),
        Format::Csv => {
            let mut s = format!("{}\n", r.header.join(","));
            for row in &r.rows {
                s.push_str(&format!("{}\n", row.join(",")));
            }
            s
        }
        Format::Text => report_text(&r),
    };
    a.out.emit(&text)?;
    let bad = r.discrepancies.unconfirmed();
    if bad > 0 {
        return Err(Failure(EXIT_FAILED, format!("{bad} discrepancies not confirmed by the oracle")));
    }
    Ok(())
}

fn cmd_closure(a: &ClosureArgs) -> CmdResult {
    let g = a.group.resolve()?;
    let f = g.close()?;
    let text = match a.out.format {
        Format::Json => {
            let elems: Vec<_> = f.elements().iter().map(|e| e.rows()).collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({"schema": 1, "group": g.name, "order": f.order(), "elements": elems}))
                    .unwrap()
            )
        }
        Format::Csv => {
            let mut s = String::new();
            for (k, e) in f.elements().iter().enumerate() {
                let flat: Vec<String> = e.rows().concat().iter().map(|v| fmt4(*v)).collect();
                s.push_str(&format!("{},{}\n", k + 1, flat.join(",")));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{}: order {}\n", g.name, f.order());
            for (k, e) in f.elements().iter().enumerate() {
                let rows: Vec<String> = e
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|v| fmt4(*v)).collect::<Vec<_>>().join(" "))
                    .collect();
                s.push_str(&format!("{:>3}  [{}]\n", k + 1, rows.join("; ")));
            }
            s
        }
    };
    a.out.emit(&text)?;
    Ok(())
}

fn load_basis(p: &PathBuf) -> tensorkit_core::Result<Vec<DenseTensor>> {
    read_basis_json(&fs::read_to_string(p)?)
}

fn cmd_check_span(a: &CheckSpanArgs) -> CmdResult {
    let x = load_basis(&a.a)?;
    let y = load_basis(&a.b)?;
    let ab = max_span_residual(&x, &y)?;
    let ba = max_span_residual(&y, &x)?;
    let equal = spans_equal(&x, &y, a.tol)?;
    println!("a in span(b): {ab:.3e}");
    println!("b in span(a): {ba:.3e}");
    println!("{}", if equal { "spans equal" } else { "spans differ" });
    if equal {
        Ok(())
    } else {
        Err(Failure(1, "spans differ".into()))
    }
}
