//! `sparsezeros`: Newton polygons, roots, disk trees and extremal polynomials
//! over `F_q((T))` from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde_json::{json, Value};

use sparsezeros::census::{
    bound_table, prime_power, run_campaign, verify_instance, CheckConfig, CorpusSpec,
};
use sparsezeros::extremal::{
    subspace_poly, verify_sharpness_thm1, verify_sharpness_thm2, verify_xe_variant, SubspaceSpec,
};
use sparsezeros::laurent::{rational_text, LaurentSeries, SeriesField};
use sparsezeros::newton::polygon;
use sparsezeros::parser::{parse_poly, parse_series, parse_series_list};
use sparsezeros::poly::{PolyJson, SparsePoly};
use sparsezeros::roots::{oracle_roots, roots_deg_le_d, roots_in, roots_report};
use sparsezeros::trees::{build_tree, phi_map};
use sparsezeros::Error;

#[derive(Parser)]
#[command(name = "sparsezeros", version, about = "Distinct zeros of sparse polynomials over F_q((T))")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FieldOpts {
    /// Characteristic.
    #[arg(long)]
    p: Option<u64>,
    /// Residue degree over F_p.
    #[arg(long)]
    m: Option<u32>,
    /// Residue field size, instead of --p/--m.
    #[arg(long)]
    q: Option<u64>,
    /// Ramification of the field searched for roots.
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Residue degree of the field searched, over F_q.
    #[arg(long, default_value_t = 1)]
    j: u32,
    /// Digits per root past its leading term.
    #[arg(long, default_value_t = 16)]
    prec: i64,
}

#[derive(Args, Clone)]
struct Input {
    /// Polynomial in x, e.g. "x^4 + (1+T+T^2)*x^2 + (T+T^2)*x".
    expr: Option<String>,
    /// Read the polynomial text from a file.
    #[arg(long, conflicts_with = "expr")]
    file: Option<PathBuf>,
    /// Read the polynomial from its JSON form.
    #[arg(long = "poly-json", conflicts_with_all = ["expr", "file"])]
    poly_json: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct Output {
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Newton polygon, dependence indices and proper order.
    Polygon {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        field: FieldOpts,
        #[command(flatten)]
        out: Output,
    },
    /// Roots in the chosen field, or of degree at most --deg over K.
    Roots {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        field: FieldOpts,
        #[arg(long)]
        deg: Option<u32>,
        #[command(flatten)]
        out: Output,
    },
    /// Brute-force root search over a window of valuations.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        field: FieldOpts,
        /// Valuation window lo:hi.
        #[arg(long, default_value = "-3:4", allow_hyphen_values = true)]
        window: String,
        #[command(flatten)]
        out: Output,
    },
    /// Subspace polynomial of a span, with the matching sharpness check.
    Extremal {
        #[command(flatten)]
        field: FieldOpts,
        /// Comma-separated basis, e.g. "1, T".
        #[arg(long)]
        basis: String,
        /// Scalar field, as q^a or its size.
        #[arg(long = "F")]
        label: Option<String>,
        /// Leading scale c.
        #[arg(long)]
        c: Option<String>,
        /// Count roots of degree at most d.
        #[arg(long)]
        d: Option<u32>,
        /// Check f(x^e) instead.
        #[arg(long)]
        xe: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Disk trees of the roots in K, labelled, with their Phi images.
    Tree {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        field: FieldOpts,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// The degree-d bound.
    Bound {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Random-corpus campaign from a JSON config.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory for report.jsonl, summary.json and summary.csv.
        #[arg(long, default_value = "campaign-out")]
        out: PathBuf,
    },
    /// Every campaign check on one polynomial.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        field: FieldOpts,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Oracle digits; 0 skips the oracle.
        #[arg(long, default_value_t = 6)]
        oracle_prec: i64,
        #[command(flatten)]
        out: Output,
    },
}

enum Failure {
    Usage(String),
    Check(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded(_) => Failure::Cap(e.to_string()),
            Error::CheckFailed(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn base_field(f: &FieldOpts) -> Res<SeriesField> {
    let (p, m) = match (f.p, f.m, f.q) {
        (None, None, None) => (2, 1),
        (None, None, Some(q)) => {
            prime_power(q).ok_or_else(|| Failure::Usage(format!("{q} is not a prime power")))?
        }
        (Some(p), m, None) => (p, m.unwrap_or(1)),
        (Some(p), m, Some(q)) => {
            let m = m.unwrap_or(1);
            if p.checked_pow(m) != Some(q) {
                return Err(Failure::Usage(format!("--q {q} is not {p}^{m}")));
            }
            (p, m)
        }
        (None, Some(_), _) => return Err(Failure::Usage("--m needs --p".into())),
    };
    Ok(SeriesField::base(p, m)?)
}

fn read_poly(input: &Input, sf: &SeriesField) -> Res<SparsePoly> {
    if let Some(path) = &input.poly_json {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let js: PolyJson =
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let f = SparsePoly::from_json(&js)?;
        if f.field() != sf {
            return Err(Failure::Usage("JSON polynomial lives over a different field".into()));
        }
        return Ok(f);
    }
    let text = match (&input.expr, &input.file) {
        (Some(e), None) => e.clone(),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| io_err(path, e))?,
        _ => return Err(Failure::Usage("give exactly one of EXPR, --file, --poly-json".into())),
    };
    Ok(parse_poly(&text, sf)?)
}

fn emit(out: Output, value: &Value, text: impl FnOnce() -> String) {
    if out.json {
        println!("{}", serde_json::to_string_pretty(value).unwrap());
    } else {
        print!("{}", text());
    }
}

fn cmd_polygon(input: &Input, field: &FieldOpts, out: Output) -> Res<()> {
    let sf = base_field(field)?;
    let f = read_poly(input, &sf)?;
    let np = polygon(&f)?;
    emit(out, &np.to_json(), || {
        let mut s = format!("f = {}\n", f.format());
        if np.zero_root_mult > 0 {
            s += &format!("root 0 with multiplicity {}\n", np.zero_root_mult);
        }
        for seg in &np.segments {
            s += &format!(
                "u={} slope {} (roots of valuation {}) exponents {:?} length {} N={}\n",
                seg.order_pos,
                rational_text(seg.slope),
                rational_text(seg.g),
                seg.exponents,
                seg.h_len,
                seg.n_index
            );
        }
        s
    });
    Ok(())
}

fn cmd_roots(input: &Input, field: &FieldOpts, deg: Option<u32>, out: Output) -> Res<()> {
    let sf = base_field(field)?;
    let f = read_poly(input, &sf)?;
    if let Some(d) = deg {
        let recs = roots_deg_le_d(&f, d, field.prec)?;
        let table = bound_table(sf.base_q(), f.k() as u32, d)?;
        let mut per: BTreeMap<u32, u64> = BTreeMap::new();
        for (_, r) in &recs {
            *per.entry(r.degree.value()).or_default() += 1;
        }
        let value = json!({
            "schema": "v1",
            "polynomial": f.format(),
            "d": d,
            "roots": recs.iter().map(|(t, r)| r.to_json(t)).collect::<Vec<_>>(),
            "count": recs.len(),
            "per_degree": per,
            "bound": table,
        });
        emit(out, &value, || {
            let mut s = String::new();
            for (t, r) in &recs {
                s += &format!(
                    "{}  degree {:?}  field (j={}, e={})\n",
                    t.format(&r.value),
                    r.degree,
                    r.field.0,
                    r.field.1
                );
            }
            s += &format!("count {} bound {}\n", recs.len(), table.total);
            s
        });
        return Ok(());
    }
    let target = if field.j == 1 && field.e == 1 {
        sf.clone()
    } else {
        sf.extension(field.j, field.e)?
    };
    let recs = roots_in(&f, &target, field.prec * target.e() as i64)?;
    let report = roots_report(&f, &target, &recs);
    emit(out, &report, || {
        let mut s = String::new();
        for r in &recs {
            let tag = if r.exact {
                "exact"
            } else if r.resolved {
                "simple"
            } else {
                "unresolved"
            };
            s += &format!("{}  multiplicity {}  {tag}\n", target.format(&r.value), r.multiplicity);
        }
        s += &format!(
            "count {} bound {} slack {}{}\n",
            report["count"],
            report["bound"],
            report["slack"],
            if report["equality"] == json!(true) { " (equality)" } else { "" }
        );
        s
    });
    Ok(())
}

fn parse_window(w: &str) -> Res<(i64, i64)> {
    let bad = || Failure::Usage(format!("window must be lo:hi, got {w:?}"));
    let (a, b) = w.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn cmd_oracle(input: &Input, field: &FieldOpts, window: &str, out: Output) -> Res<()> {
    let sf = base_field(field)?;
    let f = read_poly(input, &sf)?;
    let window = parse_window(window)?;
    let found = oracle_roots(&f, field.prec, window)?;
    let value = json!({
        "schema": "v1",
        "polynomial": f.format(),
        "prec": field.prec,
        "window": [window.0, window.1],
        "roots": found.iter().map(|x| sf.format(x)).collect::<Vec<_>>(),
        "count": found.len(),
    });
    emit(out, &value, || {
        let mut s: String = found.iter().map(|x| sf.format(x) + "\n").collect();
        s += &format!("count {}\n", found.len());
        s
    });
    Ok(())
}

fn label_degree(label: Option<&str>, q: u64) -> Res<u32> {
    let Some(l) = label else { return Ok(1) };
    let l = l.trim();
    if let Some(a) = l.strip_prefix("q^") {
        return a.parse().map_err(|_| Failure::Usage(format!("bad --F {l:?}")));
    }
    if l == "q" {
        return Ok(1);
    }
    let size: u64 = l.parse().map_err(|_| Failure::Usage(format!("bad --F {l:?}")))?;
    (1..=32)
        .find(|a| q.checked_pow(*a) == Some(size))
        .ok_or_else(|| Failure::Usage(format!("--F {size} is not a power of q = {q}")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_extremal(
    field: &FieldOpts,
    basis: &str,
    label: Option<&str>,
    c: Option<&str>,
    d: Option<u32>,
    xe: Option<u64>,
    out: Output,
) -> Res<()> {
    let sf = base_field(field)?;
    let a = label_degree(label, sf.base_q())?;
    let mut spec = SubspaceSpec::new(sf.clone(), a, parse_series_list(basis, &sf)?);
    if let Some(c) = c {
        spec.scale = parse_series(c, &sf)?;
    }
    let f = subspace_poly(&spec)?;
    let (value, passed) = if let Some(e) = xe {
        let r = verify_xe_variant(&spec, e, field.prec)?;
        let ok = r.equality || !r.applicable;
        (serde_json::to_value(r).unwrap(), ok)
    } else if let Some(d) = d {
        let (r, _) = verify_sharpness_thm2(&spec, d, field.prec)?;
        let ok = r.passed;
        (serde_json::to_value(r).unwrap(), ok)
    } else if a == 1 {
        let r = verify_sharpness_thm1(&spec, field.prec)?;
        let ok = r.passed;
        (serde_json::to_value(r).unwrap(), ok)
    } else {
        (json!({ "schema": "v1", "polynomial": f.format() }), true)
    };
    emit(out, &value, || {
        let mut s = format!("f = {}\n", f.format());
        if let Some(obj) = value.as_object() {
            for (k, v) in obj {
                if k != "schema" && k != "polynomial" {
                    s += &format!("{k}: {v}\n");
                }
            }
        }
        s
    });
    if passed {
        Ok(())
    } else {
        Err(Failure::Check("extremal polynomial misses the bound".into()))
    }
}

fn cmd_tree(input: &Input, field: &FieldOpts, dot: bool) -> Res<()> {
    let sf = base_field(field)?;
    let f = read_poly(input, &sf)?;
    let np = polygon(&f)?;
    let recs = roots_in(&f, &sf, field.prec)?;
    let values: Vec<LaurentSeries> = recs.iter().filter(|r| r.resolved).map(|r| r.value.clone()).collect();
    let images = phi_map(&sf, &values, &np, f.k())?;
    let mut trees = Vec::new();
    let mut dots = String::new();
    for seg in &np.segments {
        if !seg.g.is_integer() {
            continue;
        }
        let g = seg.g.to_integer();
        let mut cosets: BTreeMap<_, Vec<LaurentSeries>> = BTreeMap::new();
        for v in values.iter().filter(|v| v.ord() == Some(g)) {
            cosets.entry(v.coeff(g)).or_default().push(v.clone());
        }
        for pts in cosets.into_values() {
            let mut t = build_tree(&sf, &pts)?;
            t.label(g)?;
            dots += &t.to_dot(&sf);
            let mut js = t.to_json(&sf);
            js["u"] = json!(seg.order_pos);
            js["g"] = json!(g);
            trees.push(js);
        }
    }
    let phi: Vec<Value> = values
        .iter()
        .zip(&images)
        .map(|(v, img)| {
            json!({
                "root": sf.format(v),
                "phi": img.coeffs.iter().map(|c| sf.residue().format_vec(*c)).collect::<Vec<_>>(),
            })
        })
        .collect();
    if dot {
        print!("{dots}");
    } else {
        let value = json!({ "schema": "v1", "polynomial": f.format(), "trees": trees, "phi": phi });
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    }
    Ok(())
}

fn cmd_bound(q: u64, k: u32, d: u32, out: Output) -> Res<()> {
    let t = bound_table(q, k, d)?;
    emit(out, &json!({ "schema": "v1", "table": t }), || {
        let per: Vec<String> = t.per_degree.iter().map(|c| c.to_string()).collect();
        format!("{}\nper degree: {}\n", t.total, per.join(" "))
    });
    Ok(())
}

fn cmd_campaign(config: &Path, jobs: Option<usize>, out: &Path) -> Res<()> {
    let text = std::fs::read_to_string(config).map_err(|e| io_err(config, e))?;
    let spec: CorpusSpec =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
    let run = || run_campaign(&spec);
    let report = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let write = |name: &str, body: String| -> Res<PathBuf> {
        let path = out.join(name);
        std::fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        Ok(path)
    };
    write("report.jsonl", report.jsonl())?;
    let summary = report.summary_json();
    write("summary.json", serde_json::to_string_pretty(&summary).unwrap())?;
    write("summary.csv", report.csv())?;
    print!("{}", report.csv());
    if report.passed() {
        return Ok(());
    }
    let mut body = String::new();
    for r in &report.reproducers {
        body += &format!("# q={} k={} seed={} index={}\n", r.q, r.k, r.seed, r.index);
        for f in &r.failures {
            body += &format!("# {f}\n");
        }
        body += &format!("{}\n", r.polynomial);
    }
    for e in &report.errors {
        body += &format!("# error: {e}\n");
    }
    let path = write("reproducers.txt", body)?;
    Err(Failure::Check(format!("campaign failed; reproducers in {}", path.display())))
}

fn cmd_verify(input: &Input, field: &FieldOpts, seed: u64, oracle_prec: i64, out: Output) -> Res<()> {
    let sf = base_field(field)?;
    let f = read_poly(input, &sf)?;
    let cfg = CheckConfig {
        prec: field.prec,
        oracle: (oracle_prec > 0).then_some((oracle_prec, (-3, 4))),
        transforms: true,
        ..CheckConfig::default()
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rep = match verify_instance(&f, &cfg, 0, &mut rng) {
        Err(Error::CapExceeded(_)) if cfg.oracle.is_some() => {
            let cfg = CheckConfig { oracle: None, ..cfg };
            verify_instance(&f, &cfg, 0, &mut rng)?
        }
        r => r?,
    };
    let value = serde_json::to_value(&rep).unwrap();
    emit(out, &value, || {
        let mut s = format!(
            "{}: {} roots, bound {}, {} distance checks, oracle {:?}, Phi {:?}\n",
            rep.polynomial, rep.count, rep.bound, rep.distance_checks, rep.oracle_ok, rep.phi_ok
        );
        for f in &rep.failures {
            s += &format!("FAILED: {f}\n");
        }
        s
    });
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("reproducer: {}", rep.polynomial)))
    }
}

fn run(cli: Cli) -> Res<()> {
    match &cli.cmd {
        Cmd::Polygon { input, field, out } => cmd_polygon(input, field, *out),
        Cmd::Roots { input, field, deg, out } => cmd_roots(input, field, *deg, *out),
        Cmd::Oracle { input, field, window, out } => cmd_oracle(input, field, window, *out),
        Cmd::Extremal { field, basis, label, c, d, xe, out } => {
            cmd_extremal(field, basis, label.as_deref(), c.as_deref(), *d, *xe, *out)
        }
        Cmd::Tree { input, field, dot, json: _ } => cmd_tree(input, field, *dot),
        Cmd::Bound { q, k, d, out } => cmd_bound(*q, *k, *d, *out),
        Cmd::Campaign { config, jobs, out } => cmd_campaign(config, *jobs, out),
        Cmd::Verify { input, field, seed, oracle_prec, out } => {
            cmd_verify(input, field, *seed, *oracle_prec, *out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("{m}");
            ExitCode::from(3)
        }
    }
}
