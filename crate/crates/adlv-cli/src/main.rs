//! Command-line front-end: group construction, element parsing, dimension
//! queries, table generation, and the formula-vs-oracle verification
//! sweeps.
//!
//! Exit codes: 0 ok, 1 disagreement or invariant violation, 2 usage
//! error, 3 budget exhausted.

use adlv::formulas::{
    cordial_certificate, main_criterion, reduction_target, target_element, virtual_dim,
    CordialCertificate,
};
use adlv::linalg::format_rat;
use adlv::parse::{group_string, parse_class, parse_element, parse_group, serialize_class, serialize_element};
use adlv::reduction_oracle::{Oracle, SplitPolicy, DEFAULT_BUDGET};
use adlv::sweep::{classes_for, run_sweep, SweepConfig};
use adlv::{AdlvError, RootDatum, Verdict};
use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Cmd {
    Dim,
    Sweep,
    Table,
    Cordial,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "adlv", version, about = "Exact dimension tables and closed-form verdicts for affine Deligne-Lusztig varieties over extended affine Weyl groups")]
struct Args {
    /// Group spec, e.g. "A2:adjoint:sigma=id" or "A3:adjoint:sigma=flip".
    #[arg(long)]
    group: String,

    #[arg(long, value_enum)]
    cmd: Cmd,

    /// Element, as a word `s0 s1 * tau1` or `x=[s1];lam=[2,1];y=[s2]` or
    /// `lam=[2,1];u=[s1 s2]`.
    #[arg(long)]
    w: Option<String>,

    /// Class "kappa:nu", e.g. "0:1,1" or "1:1/2,1/2".
    #[arg(long)]
    b: Option<String>,

    /// Length bound for sweep and table commands.
    #[arg(long)]
    max_len: Option<u32>,

    /// Oracle node budget; defaults to ADLV_BUDGET or 10^7.
    #[arg(long)]
    budget: Option<u64>,

    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,

    #[arg(long, value_enum, default_value = "json")]
    format: Format,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let args = Args::parse();
    std::process::exit(run(args));
}

fn exit_code(e: &AdlvError) -> i32 {
    match e {
        AdlvError::BudgetExhausted { .. } => 3,
        AdlvError::Parse { .. }
        | AdlvError::Unsupported(_)
        | AdlvError::DimensionMismatch { .. }
        | AdlvError::Io(_) => 2,
        _ => 1,
    }
}

fn run(args: Args) -> i32 {
    match try_run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn budget_of(args: &Args) -> u64 {
    args.budget
        .or_else(|| std::env::var("ADLV_BUDGET").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_BUDGET)
}

fn emit(args: &Args, content: &str) -> adlv::Result<()> {
    match &args.out {
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
        Some(path) => {
            std::fs::write(path, content)?;
        }
    }
    Ok(())
}

fn element_report(d: &RootDatum, oracle: &Oracle<'_>, w: &adlv::AffineElement) -> adlv::Result<Value> {
    let dec = d.coset_decompose(w)?;
    let eta = d.eta_sigma(w)?;
    let flat = adlv::formulas::double_flat(d, w)?;
    let cert = cordial_certificate(d, w)?;
    let supp = d.supp_sigma(&eta)?;
    Ok(json!({
        "w": serialize_element(d, w),
        "len": d.length(w)?,
        "kappa": d.kappa(w).0,
        "lambda_w": dec.lam.c[..d.rank],
        "lambda_flat2": flat.c[..d.rank],
        "eta": serialize_element(d, &adlv::AffineElement::from_finite(eta)),
        "supp_eta_full": supp == d.full_support(),
        "shrunken": d.is_shrunken(w)?,
        "cordial_certificate": format!("{cert:?}"),
        "cordial_oracle": oracle.is_cordial(w)?,
        "b_max": oracle.b_max(w)?.to_json(d),
    }))
}

fn cmd_dim(args: &Args, d: &RootDatum) -> adlv::Result<i32> {
    let w_str = args.w.as_deref().ok_or_else(|| AdlvError::Parse {
        token: "--w".into(),
        msg: "dim requires an element".into(),
    })?;
    let w = parse_element(d, w_str)?;
    let oracle = Oracle::with_budget(d, budget_of(args), SplitPolicy::LexFirst);
    let table = oracle.dim_table(&w)?;
    let mut report = element_report(d, &oracle, &w)?;
    match &args.b {
        None => {
            report["table"] = table.to_json(d, &w)["entries"].clone();
        }
        Some(bstr) => {
            let b = parse_class(d, bstr)?;
            let verdict = main_criterion(d, &w, &b)?;
            let oracle_dim = table.dim(&b);
            report["b"] = b.to_json(d);
            report["oracle"] = json!(oracle_dim);
            report["d_w"] = json!(format_rat(virtual_dim(d, &w, &b)?));
            report["theorem"] = json!(verdict.as_str());
            report["agree"] = json!(match verdict {
                Verdict::NotApplicable(_) => true,
                Verdict::Empty(_) => oracle_dim.is_none(),
                Verdict::Nonempty(dim) => oracle_dim == Some(dim),
            });
        }
    }
    emit(args, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    Ok(0)
}

fn cmd_sweep(args: &Args, d: &RootDatum) -> adlv::Result<i32> {
    let max_len = args.max_len.ok_or_else(|| AdlvError::Parse {
        token: "--max-len".into(),
        msg: "sweep requires a length bound".into(),
    })?;
    let cfg = SweepConfig { max_len, budget: budget_of(args), policy: SplitPolicy::LexFirst };
    let outcome = run_sweep(d, &cfg)?;
    emit(args, &outcome.to_json_lines(d))?;
    if outcome.ok() {
        Ok(0)
    } else {
        for v in outcome.summary.violations.iter().take(20) {
            eprintln!("violation: {v}");
        }
        Ok(1)
    }
}

fn cmd_table(args: &Args, d: &RootDatum) -> adlv::Result<i32> {
    let max_len = args.max_len.ok_or_else(|| AdlvError::Parse {
        token: "--max-len".into(),
        msg: "table requires a length bound".into(),
    })?;
    let oracle = Oracle::with_budget(d, budget_of(args), SplitPolicy::LexFirst);
    let mut rows: Vec<(u32, String, String, Value)> = Vec::new();
    for w in d.ball(max_len) {
        let table = oracle.dim_table(&w)?;
        let dec = d.coset_decompose(&w)?;
        let eta = d.eta_sigma(&w)?;
        let flat = adlv::formulas::double_flat(d, &w)?;
        let cert = cordial_certificate(d, &w)?;
        let shrunken = d.is_shrunken(&w)?;
        let supp_full = d.supp_sigma(&eta)? == d.full_support();
        for b in classes_for(d, &w, &oracle)? {
            let verdict = main_criterion(d, &w, &b)?;
            let oracle_dim = table.dim(&b);
            let agree = match verdict {
                Verdict::NotApplicable(_) => true,
                Verdict::Empty(_) => oracle_dim.is_none(),
                Verdict::Nonempty(dim) => oracle_dim == Some(dim),
            };
            let record = json!({
                "group": group_string(d),
                "len": d.length(&w)?,
                "w": serialize_element(d, &w),
                "shrunken": shrunken,
                "lambda_w": coords_str(d, &dec.lam),
                "lambda_flat2": coords_str(d, &flat),
                "eta": serialize_element(d, &adlv::AffineElement::from_finite(eta)),
                "supp_eta_full": supp_full,
                "cordial_certificate": cert_str(cert),
                "kappa": kappa_str(&b.kappa.0),
                "nu": nu_str(d, &b),
                "dim": oracle_dim,
                "d_w": format_rat(virtual_dim(d, &w, &b)?),
                "verdict": verdict.as_str(),
                "agree": agree,
            });
            rows.push((d.length(&w)?, serialize_element(d, &w), serialize_class(d, &b), record));
        }
    }
    rows.sort_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));
    let content = match args.format {
        Format::Json => {
            let mut out = String::new();
            for (_, _, _, rec) in &rows {
                out.push_str(&rec.to_string());
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = String::from(
                "group,len,w,shrunken,lambda_w,lambda_flat2,eta,supp_eta_full,cordial_certificate,kappa,nu,dim,d_w,verdict,agree\n",
            );
            for (_, _, _, rec) in &rows {
                let cols = [
                    "group", "len", "w", "shrunken", "lambda_w", "lambda_flat2", "eta",
                    "supp_eta_full", "cordial_certificate", "kappa", "nu", "dim", "d_w",
                    "verdict", "agree",
                ];
                let line: Vec<String> = cols
                    .iter()
                    .map(|c| csv_cell(&rec[*c]))
                    .collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
    };
    emit(args, &content)?;
    Ok(0)
}

fn coords_str(d: &RootDatum, v: &adlv::Coweight) -> String {
    let coords: Vec<String> = v.c[..d.rank].iter().map(|c| c.to_string()).collect();
    format!("[{}]", coords.join(" "))
}

fn cert_str(c: CordialCertificate) -> &'static str {
    match c {
        CordialCertificate::XTranslation => "x_translation",
        CordialCertificate::Antidominant => "antidominant",
        CordialCertificate::None => "none",
    }
}

fn kappa_str(k: &[i64]) -> String {
    format!("[{}]", k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
}

fn nu_str(d: &RootDatum, b: &adlv::ClassInvariant) -> String {
    let coords: Vec<String> = (0..d.rank).map(|i| format_rat(b.nu.c[i])).collect();
    format!("[{}]", coords.join(" "))
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        other => other.to_string(),
    }
}

fn cmd_cordial(args: &Args, d: &RootDatum) -> adlv::Result<i32> {
    let w_str = args.w.as_deref().ok_or_else(|| AdlvError::Parse {
        token: "--w".into(),
        msg: "cordial requires an element".into(),
    })?;
    let w = parse_element(d, w_str)?;
    let oracle = Oracle::with_budget(d, budget_of(args), SplitPolicy::LexFirst);
    let mut report = element_report(d, &oracle, &w)?;
    let cordial = oracle.is_cordial(&w)?;
    if cordial {
        report["saturation_ok"] =
            json!(adlv::formulas::cordial_saturation_check(&oracle, &w)?);
    }
    let table = oracle.dim_table(&w)?;
    let bmax = oracle.b_max(&w)?;
    report["dim_at_b_max"] = json!(table.dim(&bmax));
    report["d_w_at_b_max"] = json!(format_rat(virtual_dim(d, &w, &bmax)?));
    emit(args, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    Ok(0)
}

fn cmd_target(args: &Args, d: &RootDatum) -> adlv::Result<i32> {
    let w_str = args.w.as_deref().ok_or_else(|| AdlvError::Parse {
        token: "--w".into(),
        msg: "target requires an element".into(),
    })?;
    let w = parse_element(d, w_str)?;
    let oracle = Oracle::with_budget(d, budget_of(args), SplitPolicy::LexFirst);
    let t = reduction_target(d, &w)?;
    let at = target_element(d, &t)?;
    let tw = oracle.dim_table(&w)?;
    let ta = oracle.dim_table(&at)?;
    let eta_w = d.eta_sigma(&w)?;
    let eta_a = d.eta_sigma(&at)?;
    let gap_num = d.length(&w)? as i64 + d.w0_len(&eta_w)? as i64
        - d.length(&at)? as i64
        - d.w0_len(&eta_a)? as i64;
    let mut checked = Vec::new();
    let mut ok = true;
    for (b, &dim_a) in &ta.entries {
        let entry_ok = match tw.dim(b) {
            None => false,
            Some(dim_w) => 2 * (dim_w as i64 - dim_a as i64) >= gap_num,
        };
        ok &= entry_ok;
        checked.push(json!({
            "b": b.to_json(d),
            "dim_target": dim_a,
            "dim_w": tw.dim(b),
            "ok": entry_ok,
        }));
    }
    let report = json!({
        "w": serialize_element(d, &w),
        "a": serialize_element(d, &adlv::AffineElement::from_finite(t.a)),
        "gamma": t.gamma.c[..d.rank],
        "target": serialize_element(d, &at),
        "witnesses": {
            "j": t.j,
            "j_prime": t.j_prime,
            "x_prime": serialize_element(d, &adlv::AffineElement::from_finite(t.x_prime)),
            "z": serialize_element(d, &adlv::AffineElement::from_finite(t.z)),
            "y_prime": serialize_element(d, &adlv::AffineElement::from_finite(t.y_prime)),
        },
        "entries": checked,
        "inequality_ok": ok,
    });
    emit(args, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    Ok(if ok { 0 } else { 1 })
}

fn try_run(args: &Args) -> adlv::Result<i32> {
    let d = parse_group(&args.group)?;
    if let Some(jobs) = args.jobs {
        // first configuration wins; later ones are ignored
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match args.cmd {
        Cmd::Dim => cmd_dim(args, &d),
        Cmd::Sweep => cmd_sweep(args, &d),
        Cmd::Table => cmd_table(args, &d),
        Cmd::Cordial => cmd_cordial(args, &d),
        Cmd::Target => cmd_target(args, &d),
    }
}
