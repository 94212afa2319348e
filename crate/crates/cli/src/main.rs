//! Command-line front end: homology tables, induced maps, tower limits and
//! certificate checks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use endkh::cobordism::induced_homology_map_with;
use endkh::complex::{is_cycle, HomologyOptions, DEFAULT_BOUND};
use endkh::formats::{dims_to_json, parse_chain, parse_diagram, parse_movie};
use endkh::tower::{
    coend_dims, end_dims, parse_certificate, parse_tower, prove_nonzero_via_capoff,
    verify_survival, SurvivalOptions,
};
use endkh::{homology_dims, is_cycle_local, BigradedDims, Bigrading, ChainVector, Error};

#[derive(Parser, Debug)]
#[command(
    name = "endkh",
    version,
    about = "Khovanov homology over GF(2) of links, movies and towers"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Largest crossing count for which full homology is attempted.
    #[arg(long, default_value_t = DEFAULT_BOUND, global = true)]
    bound: usize,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Single-threaded execution.
    #[arg(long, global = true)]
    serial: bool,
    /// Where bare file names are looked up when they do not exist as given.
    #[arg(long, env = "ENDKH_DATA_DIR", global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct WindowArg {
    /// Bigrading window as `h0:h1,q0:q1`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Khovanov homology of a diagram as a Poincare table.
    Kh { diagram: PathBuf },
    /// Matrices of the map a movie induces on homology, block by block.
    Map {
        movie: PathBuf,
        #[command(flatten)]
        window: WindowArg,
    },
    /// End and co-end homology of an eventually periodic tower.
    Tower {
        tower: PathBuf,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Checks that a chain is a cycle and reports its bigrading.
    VerifyCycle { diagram: PathBuf, chain: PathBuf },
    /// Verifies a survival certificate against a tower.
    Survival {
        tower: PathBuf,
        certificate: PathBuf,
        /// Number of stages to check; defaults to the tower's own depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Accept transfers that agree up to a boundary on small stages.
        #[arg(long)]
        homology_fallback: bool,
    },
    /// Certifies a cycle is not a boundary by pushing it through a movie.
    /// The cycle is a chain file or the first cycle of a certificate.
    Capoff { movie: PathBuf, cycle: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Window {
    h: (i64, i64),
    q: (i64, i64),
}

impl Default for Window {
    fn default() -> Self {
        Window {
            h: (-3, 3),
            q: (-5, 5),
        }
    }
}

fn parse_window(s: &str) -> Result<Window, String> {
    let range = |p: &str| -> Result<(i64, i64), String> {
        let (a, b) = p
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {p:?}"))?;
        let lo = a.trim().parse().map_err(|_| format!("bad bound {a:?}"))?;
        let hi = b.trim().parse().map_err(|_| format!("bad bound {b:?}"))?;
        if lo > hi {
            return Err(format!("empty range {p:?}"));
        }
        Ok((lo, hi))
    };
    let (h, q) = s
        .split_once(',')
        .ok_or_else(|| "expected h0:h1,q0:q1".to_string())?;
    Ok(Window {
        h: range(h)?,
        q: range(q)?,
    })
}

/// A finished command: what to print and how it ended.
struct Report {
    text: String,
    json: Value,
    passed: bool,
}

/// Failures before a verdict is reached.
#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
    exit: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, exit) = match &e {
            Error::Infeasible(_) => ("infeasible", 3),
            Error::Format(_) | Error::Json(_) => ("schema", 2),
            Error::Version { .. } => ("version", 2),
            Error::InvalidDiagram(_) => ("invalid-diagram", 2),
            Error::InvalidSite { .. } => ("invalid-site", 2),
            Error::Dimension(_) => ("dimension", 2),
            Error::NotHomogeneous(_) => ("not-homogeneous", 2),
            Error::NotACycle => ("not-a-cycle", 2),
            Error::ForeignGenerator(_) => ("foreign-generator", 2),
            Error::NotPeriodic(_) => ("not-periodic", 2),
            Error::InconsistentTower(_) => ("inconsistent-tower", 2),
            Error::BadCertificate(_) => ("bad-certificate", 2),
            Error::Io(_) => ("io", 2),
        };
        Failure {
            code,
            message: e.to_string(),
            exit,
        }
    }
}

struct Ctx {
    bound: usize,
    parallel: bool,
    data_dir: PathBuf,
}

impl Ctx {
    fn read(&self, p: &Path) -> Result<String, Failure> {
        let path = if p.exists() || p.is_absolute() {
            p.to_path_buf()
        } else {
            self.data_dir.join(p)
        };
        std::fs::read_to_string(&path).map_err(|e| Failure {
            code: "io",
            message: format!("{}: {e}", path.display()),
            exit: 2,
        })
    }
}

fn default_data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Rows q (descending), columns h, `.` for zero.
fn poincare_table(dims: &BigradedDims, w: Option<Window>) -> String {
    let keys: Vec<Bigrading> = dims.0.keys().copied().collect();
    let (h, q) = match w {
        Some(w) => (w.h, w.q),
        None if keys.is_empty() => return "(zero)\n".into(),
        None => (
            (
                keys.iter().map(|b| b.h).min().unwrap(),
                keys.iter().map(|b| b.h).max().unwrap(),
            ),
            (
                keys.iter().map(|b| b.q).min().unwrap(),
                keys.iter().map(|b| b.q).max().unwrap(),
            ),
        ),
    };
    let mut out = format!("{:>5} |", "q\\h");
    for hh in h.0..=h.1 {
        out += &format!("{hh:>4}");
    }
    out.push('\n');
    out += &format!("{}\n", "-".repeat(7 + 4 * (h.1 - h.0 + 1) as usize));
    for qq in (q.0..=q.1).rev() {
        let row: Vec<usize> = (h.0..=h.1)
            .map(|hh| dims.get(Bigrading::new(hh, qq)))
            .collect();
        if w.is_none() && row.iter().all(|&v| v == 0) {
            continue;
        }
        out += &format!("{qq:>5} |");
        for v in row {
            if v == 0 {
                out += &format!("{:>4}", ".");
            } else {
                out += &format!("{v:>4}");
            }
        }
        out.push('\n');
    }
    out
}

fn entries(dims: &BigradedDims) -> String {
    dims.triples()
        .iter()
        .map(|(h, q, v)| format!("({h},{q}):{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn kh(ctx: &Ctx, path: &Path) -> Result<Report, Failure> {
    let d = parse_diagram(&ctx.read(path)?)?;
    let dims = endkh::complex::homology_dims_with(
        &d,
        &HomologyOptions {
            bound: ctx.bound,
            parallel: ctx.parallel,
        },
    )?;
    Ok(Report {
        text: format!(
            "{} crossings, total rank {}\n{}entries: {}\n",
            d.n_crossings(),
            dims.total(),
            poincare_table(&dims, None),
            entries(&dims)
        ),
        json: json!({
            "command": "kh",
            "crossings": d.n_crossings(),
            "dims": dims_to_json(&dims),
        }),
        passed: true,
    })
}

fn map(ctx: &Ctx, path: &Path, w: Option<Window>) -> Result<Report, Failure> {
    let m = parse_movie(&ctx.read(path)?)?;
    let blocks: Vec<Bigrading> = match w {
        Some(w) => (w.h.0..=w.h.1)
            .flat_map(|h| (w.q.0..=w.q.1).map(move |q| Bigrading::new(h, q)))
            .collect(),
        None => homology_dims(&m.source)?.0.into_keys().collect(),
    };
    let chi = m.chi();
    let mut text = format!("movie with {} events, chi {chi}\n", m.events.len());
    let mut out = Vec::new();
    for b in blocks {
        let f = induced_homology_map_with(&m, b, ctx.bound)?;
        if f.cols() == 0 {
            continue;
        }
        let t = b.shift_q(chi);
        let rows: Vec<Vec<u8>> = (0..f.rows())
            .map(|i| (0..f.cols()).map(|j| u8::from(f.get(i, j))).collect())
            .collect();
        text += &format!(
            "{b} -> {t}: {}x{} rank {}\n",
            f.rows(),
            f.cols(),
            endkh::rank(&f)
        );
        for r in &rows {
            text += &format!(
                "  {}\n",
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        out.push(json!({
            "source": [b.h, b.q],
            "target": [t.h, t.q],
            "rows": f.rows(),
            "cols": f.cols(),
            "rank": endkh::rank(&f),
            "matrix": rows,
        }));
    }
    Ok(Report {
        text,
        json: json!({"command": "map", "chi": chi, "blocks": out}),
        passed: true,
    })
}

fn tower(ctx: &Ctx, path: &Path, w: Option<Window>) -> Result<Report, Failure> {
    let t = parse_tower(&ctx.read(path)?)?;
    let w = w.unwrap_or_default();
    let mut coend = BigradedDims::default();
    let mut end = BigradedDims::default();
    for h in w.h.0..=w.h.1 {
        for q in w.q.0..=w.q.1 {
            let b = Bigrading::new(h, q);
            let c = coend_dims(&t, b, ctx.bound)?;
            let e = end_dims(&t, b, ctx.bound)?;
            if c > 0 {
                coend.0.insert(b, c);
            }
            if e > 0 {
                end.0.insert(b, e);
            }
        }
    }
    Ok(Report {
        text: format!(
            "co-end homology\n{}entries: {}\n\nend homology\n{}entries: {}\n",
            poincare_table(&coend, Some(w)),
            entries(&coend),
            poincare_table(&end, Some(w)),
            entries(&end)
        ),
        json: json!({
            "command": "tower",
            "window": {"h": [w.h.0, w.h.1], "q": [w.q.0, w.q.1]},
            "coend": dims_to_json(&coend),
            "end": dims_to_json(&end),
        }),
        passed: true,
    })
}

fn verify_cycle(ctx: &Ctx, dpath: &Path, cpath: &Path) -> Result<Report, Failure> {
    let d = parse_diagram(&ctx.read(dpath)?)?;
    let c = parse_chain(&ctx.read(cpath)?)?;
    let local: Vec<bool> = c
        .terms()
        .map(|g| is_cycle_local(&d, g))
        .collect::<endkh::Result<_>>()?;
    let cycle = is_cycle(&d, &c)?;
    let grading = c.bigrading(&d)?;
    let g = grading.map(|b| vec![b.h, b.q]);
    let n_local = local.iter().filter(|&&b| b).count();
    Ok(Report {
        text: format!(
            "{} terms, {n_local} pass the local test\ncycle: {}\nbigrading: {}\n",
            c.len(),
            if cycle { "yes" } else { "no" },
            grading.map_or("none (zero chain)".into(), |b| b.to_string())
        ),
        json: json!({
            "command": "verify-cycle",
            "terms": c.len(),
            "local": local,
            "cycle": cycle,
            "bigrading": g,
        }),
        passed: cycle,
    })
}

fn survival(
    ctx: &Ctx,
    tpath: &Path,
    cpath: &Path,
    depth: Option<usize>,
    fallback: bool,
) -> Result<Report, Failure> {
    let t = parse_tower(&ctx.read(tpath)?)?;
    let cert = parse_certificate(&ctx.read(cpath)?)?;
    let opts = SurvivalOptions {
        depth: depth.unwrap_or(t.depth_default),
        homology_fallback: fallback,
        bound: ctx.bound,
    };
    let r = verify_survival(&t, &cert, &opts)?;
    let mut text = format!(
        "claimed end class ({},{}), depth {}\n",
        r.claimed.0, r.claimed.1, r.depth
    );
    for s in &r.stages {
        let at = s
            .bigrading
            .map_or("-".to_string(), |(h, q)| format!("({h},{q})"));
        text += &format!(
            "stage {}: {} crossings, {} terms, at {at}, cycle {}, transfer {}, {}\n",
            s.stage,
            s.crossings,
            s.terms,
            if s.cycle { "yes" } else { "no" },
            s.transfer.as_deref().unwrap_or("-"),
            if s.passed { "pass" } else { "FAIL" }
        );
        if let Some(w) = &s.witness {
            text += &format!("  witness: {w}\n");
        }
    }
    let end = r.end_class();
    text += &match end {
        Some(b) => format!("pass: end class {b}\n"),
        None => "fail\n".to_string(),
    };
    let mut json = serde_json::to_value(&r).expect("reports serialize");
    json["command"] = json!("survival");
    json["end_class"] = json!(end.map(|b| [b.h, b.q]));
    Ok(Report {
        text,
        json,
        passed: r.passed,
    })
}

fn capoff(ctx: &Ctx, mpath: &Path, cpath: &Path) -> Result<Report, Failure> {
    let m = parse_movie(&ctx.read(mpath)?)?;
    let raw = ctx.read(cpath)?;
    let c: ChainVector = match parse_chain(&raw) {
        Ok(c) => c,
        Err(Error::Version { .. }) => parse_certificate(&raw)?
            .cycles
            .into_iter()
            .next()
            .ok_or_else(|| Error::BadCertificate("no cycles".into()))?,
        Err(e) => return Err(e.into()),
    };
    let r = prove_nonzero_via_capoff(&m.source, &c, &m, ctx.bound)?;
    let mut json = serde_json::to_value(&r).expect("reports serialize");
    json["command"] = json!("capoff");
    Ok(Report {
        text: format!(
            "{}: {} (method {}, {} image terms{})\n",
            if r.passed { "pass" } else { "fail" },
            r.reason,
            r.method,
            r.image_terms,
            r.image_bigrading
                .map_or(String::new(), |(h, q)| format!(" at ({h},{q})"))
        ),
        json,
        passed: r.passed,
    })
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let ctx = Ctx {
        bound: cli.bound,
        parallel: !cli.serial,
        data_dir: cli.data_dir.clone().unwrap_or_else(default_data_dir),
    };
    match &cli.command {
        Command::Kh { diagram } => kh(&ctx, diagram),
        Command::Map { movie, window } => map(&ctx, movie, window.window),
        Command::Tower { tower: t, window } => tower(&ctx, t, window.window),
        Command::VerifyCycle { diagram, chain } => verify_cycle(&ctx, diagram, chain),
        Command::Survival {
            tower: t,
            certificate,
            depth,
            homology_fallback,
        } => survival(&ctx, t, certificate, *depth, *homology_fallback),
        Command::Capoff { movie, cycle } => capoff(&ctx, movie, cycle),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = if cli.serial { Some(1) } else { cli.jobs };
    if let Some(n) = threads {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(&cli) {
        Ok(r) => {
            match cli.format {
                Format::Text => print!("{}", r.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&r.json).unwrap()),
            }
            ExitCode::from(if r.passed { 0 } else { 1 })
        }
        Err(f) => {
            match cli.format {
                Format::Text => eprintln!("error [{}]: {}", f.code, f.message),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "error": {"code": f.code, "message": f.message, "exit": f.exit}
                    }))
                    .unwrap()
                ),
            }
            ExitCode::from(f.exit)
        }
    }
}
