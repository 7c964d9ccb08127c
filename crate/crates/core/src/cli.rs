//! Command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::decomp::{
    builtin_catalog, canonical_name, load_catalog, mult_from_dimh, validate_catalog, BUILTIN_NAMES,
};
use crate::error::{Error, Result};
use crate::invariants::{
    dim_invariant, dimh_inv, family_mult, mult_inv, rank_invariant, EmbeddingFamily,
    InvariantVector,
};
use crate::io::{module_to_json, parse_module, parse_poset, read_json, render_grid};
use crate::kan::{coinduce, induce, intermediate_extension};
use crate::linalg::Field;
use crate::pmod::PModule;
use crate::poset::{enumerate_embeddings, OrderEmbedding, Poset};
use crate::relexact::relative_projectives;
use crate::signed::{
    hook_basis, interval_family_basis, rectangle_basis, signed_barcode, theta_basis, InvariantBasis,
};
use crate::suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;
pub const EXIT_SUITE: i32 = 4;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Grid,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KanKind {
    Induce,
    Coinduce,
    ThetaImage,
}

#[derive(Debug, Parser)]
#[command(
    name = "posetinv",
    version,
    about = "Embedding-based invariants of poset modules"
)]
pub struct Cli {
    /// Q, gf (p = 2147483629) or gf:<p>
    #[arg(long, global = true, default_value = "q")]
    pub field: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; POSETINV_THREADS takes precedence
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the order-embeddings X -> P
    Embeddings {
        /// Template poset file or builtin name
        x: String,
        /// Target poset file, builtin name, or gridNxM
        p: String,
    },
    /// Evaluate an invariant: dim, rank, mult:<T>, dimh:<T>, family:x1x2|intervals|chain
    Invariant { kind: String, module: PathBuf },
    /// Multiplicities of the catalog members in a template module
    Decompose {
        #[arg(long)]
        template: String,
        module: PathBuf,
    },
    /// f_!, f_* or the image of theta for a template module
    Kan {
        #[arg(long)]
        template: String,
        #[arg(long)]
        poset: String,
        /// Embedding as `x=p;y=q;...`; defaults to --index
        #[arg(long)]
        map: Option<String>,
        /// Position in the enumerated embedding list
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, value_enum, default_value = "induce")]
        which: KanKind,
        module: PathBuf,
    },
    /// Signed decomposition over rectangles|hooks|theta:<T>|intervals:<F.json>|intervals:chain
    SignedBarcode {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        basis: String,
    },
    /// Validate builtin catalogs (or `all`, or a catalog JSON file)
    Validate {
        #[arg(default_value = "all")]
        catalog: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Replay the worked examples and acceptance criteria
    PaperSuite {
        /// Run only this criterion
        #[arg(long)]
        criterion: Option<usize>,
    },
    /// The deduplicated relative projectives f_!U
    Relproj {
        #[arg(long)]
        template: String,
        #[arg(long)]
        poset: String,
        /// Write one JSON file per module into this directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Plumbing shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub field: Field,
    pub seed: u64,
    pub format: Format,
    pub threads: Option<usize>,
}

pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn threads_from_env() -> Option<usize> {
    std::env::var("POSETINV_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Parses and runs a command line; errors become exit codes.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FORMAT } else { EXIT_OK };
            return Outcome {
                stdout: e.to_string(),
                code,
            };
        }
    };
    let field = match cli.field.parse::<Field>() {
        Ok(f) => f,
        Err(e) => return failure(&e),
    };
    let cfg = RunConfig {
        field,
        seed: cli.seed,
        format: cli.format,
        threads: threads_from_env().or(cli.threads),
    };
    let work = || run(&cfg, &cli.command);
    let res = match cfg.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(Error::Format(format!("thread pool: {e}"))),
        },
        None => work(),
    };
    match res {
        Ok(o) => o,
        Err(e) => failure(&e),
    }
}

fn failure(e: &Error) -> Outcome {
    Outcome {
        stdout: format!("error [{}]: {e}\n", e.code()),
        code: if e.is_format() {
            EXIT_FORMAT
        } else {
            EXIT_DOMAIN
        },
    }
}

fn done(stdout: String) -> Result<Outcome> {
    Ok(Outcome {
        stdout,
        code: EXIT_OK,
    })
}

/// A poset argument: a file, a builtin template name, or `gridNxM`.
fn poset_arg(s: &str) -> Result<Arc<Poset>> {
    let lower = s.to_ascii_lowercase();
    if let Some(rest) = lower
        .strip_prefix("grid")
        .or_else(|| lower.strip_prefix("staircase"))
    {
        if let Some((n, m)) = rest
            .trim_start_matches(['(', ' '])
            .trim_end_matches(')')
            .split_once(['x', ','])
        {
            if let (Ok(n), Ok(m)) = (n.trim().parse::<usize>(), m.trim().parse::<usize>()) {
                if n > 0 && m > 0 {
                    return Ok(Arc::new(if lower.starts_with("grid") {
                        Poset::grid(n, m)
                    } else {
                        Poset::staircase_grid(n, m)
                    }));
                }
            }
        }
    }
    let path = Path::new(s);
    if path.exists() {
        return Ok(Arc::new(parse_poset(&read_json(path)?)?));
    }
    if canonical_name(s).is_ok() {
        return Ok(builtin_catalog(s, Field::Rational)?.template().clone());
    }
    Err(Error::Format(format!(
        "`{s}` is neither a file, a builtin template nor gridNxM"
    )))
}

fn module_arg(cfg: &RunConfig, path: &Path, poset: Option<&Arc<Poset>>) -> Result<PModule> {
    parse_module(cfg.field, &read_json(path)?, poset)
}

fn catalog_arg(cfg: &RunConfig, s: &str) -> Result<Arc<crate::decomp::IndCatalog>> {
    let path = Path::new(s);
    if path.exists() {
        return Ok(Arc::new(load_catalog(&read_json(path)?, cfg.field)?));
    }
    builtin_catalog(s, cfg.field)
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn render_vector(cfg: &RunConfig, v: &InvariantVector) -> String {
    // keys are already in canonical order
    let pairs: Vec<(&String, i64)> = v.keys().iter().zip(v.values().iter().copied()).collect();
    match cfg.format {
        Format::Json => {
            let mut m = Map::new();
            for (k, x) in pairs {
                m.insert(k.clone(), json!(x));
            }
            json_text(&Value::Object(m))
        }
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (k, x) in pairs {
                if k.contains([',', '"']) {
                    let _ = writeln!(s, "\"{}\",{x}", k.replace('"', "\"\""));
                } else {
                    let _ = writeln!(s, "{k},{x}");
                }
            }
            s
        }
        Format::Table | Format::Grid => {
            let w = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut s = String::new();
            for (k, x) in pairs {
                let _ = writeln!(s, "{k:<w$}  {x}");
            }
            s
        }
    }
}

fn render_module(cfg: &RunConfig, m: &PModule) -> String {
    match cfg.format {
        Format::Json => json_text(&module_to_json(m)),
        Format::Grid => render_grid(m).unwrap_or_else(|| json_text(&module_to_json(m))),
        Format::Table | Format::Csv => {
            let mut s = json_text(&module_to_json(m));
            if let Some(g) = render_grid(m) {
                s.push_str(&g);
            }
            s
        }
    }
}

fn parse_map(x: &Arc<Poset>, p: &Arc<Poset>, spec: &str) -> Result<OrderEmbedding> {
    let mut map = vec![usize::MAX; x.len()];
    for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = part
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("map entry `{part}` must look like x=p")))?;
        map[x.id(a.trim())?] = p.id(b.trim())?;
    }
    if let Some(i) = map.iter().position(|&v| v == usize::MAX) {
        return Err(Error::Format(format!(
            "map does not assign `{}`",
            x.name(i)
        )));
    }
    OrderEmbedding::new(x.clone(), p.clone(), map)
}

fn template_embeddings(
    cfg: &RunConfig,
    template: &str,
    p: &Arc<Poset>,
) -> Result<(Arc<crate::decomp::IndCatalog>, Vec<OrderEmbedding>)> {
    let c = catalog_arg(cfg, template)?;
    let e = enumerate_embeddings(c.template(), p);
    Ok((c, e))
}

fn family_arg(kind: &str, p: &Arc<Poset>, field: Field) -> Result<EmbeddingFamily> {
    match kind {
        "x1x2" => EmbeddingFamily::x1_x2(p, field),
        "intervals" => EmbeddingFamily::intervals(p),
        "chain" => EmbeddingFamily::chain_length_lt3(p),
        other => {
            let v = read_json(Path::new(other))?;
            let list = v
                .get("subsets")
                .unwrap_or(&v)
                .as_array()
                .ok_or_else(|| Error::Format("family file lists subsets".into()))?;
            let subsets = list
                .iter()
                .map(|s| {
                    s.as_array()
                        .ok_or_else(|| Error::Format("each subset is an array of elements".into()))?
                        .iter()
                        .map(|e| match e {
                            Value::String(n) => p.id(n),
                            Value::Number(n) => p.id(&n.to_string()),
                            _ => Err(Error::Format("elements are strings".into())),
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            EmbeddingFamily::from_subsets(p, &subsets)
        }
    }
}

fn basis_arg(cfg: &RunConfig, spec: &str, p: &Arc<Poset>) -> Result<InvariantBasis> {
    match spec.split_once(':') {
        None if spec == "rectangles" => rectangle_basis(p, cfg.field),
        None if spec == "hooks" => hook_basis(p, cfg.field),
        Some(("theta", t)) => {
            let (c, e) = template_embeddings(cfg, t, p)?;
            theta_basis(&e, &c, p)
        }
        Some(("intervals", f)) => {
            let fam = family_arg(f, p, cfg.field)?;
            interval_family_basis(&fam, p, cfg.field)
        }
        _ => Err(Error::Format(format!("unknown basis `{spec}`"))),
    }
}

pub fn run(cfg: &RunConfig, cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Embeddings { x, p } => {
            let (x, p) = (poset_arg(x)?, poset_arg(p)?);
            let e = enumerate_embeddings(&x, &p);
            let out = match cfg.format {
                Format::Json => json_text(&json!({
                    "count": e.len(),
                    "embeddings": e.iter().map(|f| {
                        let m: Map<String, Value> = (0..x.len())
                            .map(|i| (x.name(i).to_string(), json!(p.name(f.apply(i)))))
                            .collect();
                        Value::Object(m)
                    }).collect::<Vec<_>>(),
                })),
                _ => {
                    let mut s = format!("{} embeddings\n", e.len());
                    for (k, f) in e.iter().enumerate() {
                        let _ = writeln!(s, "f#{k}: {}", f.describe());
                    }
                    s
                }
            };
            done(out)
        }
        Command::Invariant { kind, module } => {
            let m = module_arg(cfg, module, None)?;
            let p = m.poset().clone();
            let v = match kind.split_once(':') {
                None if kind == "dim" => dim_invariant(&m),
                None if kind == "rank" || kind == "brk" => rank_invariant(&m),
                Some(("mult", t)) => {
                    let (c, e) = template_embeddings(cfg, t, &p)?;
                    mult_inv(&e, &c, &m)?
                }
                Some(("dimh", t)) => {
                    let (c, e) = template_embeddings(cfg, t, &p)?;
                    dimh_inv(&e, &c, &m)?
                }
                Some(("family", f)) => family_mult(
                    &family_arg(f, &p, cfg.field)?.with_builtin_catalogs(cfg.field)?,
                    &m,
                )?,
                _ => return Err(Error::Format(format!("unknown invariant `{kind}`"))),
            };
            done(render_vector(cfg, &v))
        }
        Command::Decompose { template, module } => {
            let c = catalog_arg(cfg, template)?;
            let m = module_arg(cfg, module, Some(c.template()))?;
            let mult = mult_from_dimh(&c, &m)?;
            let keys: Vec<String> = c.names().to_vec();
            let v = InvariantVector::new(keys, mult)?;
            done(render_vector(cfg, &v))
        }
        Command::Kan {
            template,
            poset,
            map,
            index,
            which,
            module,
        } => {
            let p = poset_arg(poset)?;
            let x = poset_arg(template)?;
            let f = match map {
                Some(s) => parse_map(&x, &p, s)?,
                None => {
                    let e = enumerate_embeddings(&x, &p);
                    let n = e.len();
                    e.into_iter().nth(*index).ok_or_else(|| {
                        Error::NotAnEmbedding(format!("index {index} out of {n} embeddings"))
                    })?
                }
            };
            let u = module_arg(cfg, module, Some(&x))?;
            let out = match which {
                KanKind::Induce => induce(&f, &u)?,
                KanKind::Coinduce => coinduce(&f, &u)?,
                KanKind::ThetaImage => intermediate_extension(&f, &u)?,
            };
            done(render_module(cfg, &out))
        }
        Command::SignedBarcode { module, basis } => {
            let m = module_arg(cfg, module, None)?;
            let b = basis_arg(cfg, basis, m.poset())?;
            let d = signed_barcode(&m, &b)?;
            done(match cfg.format {
                Format::Json => json_text(&d.to_json()),
                _ => d.to_string(),
            })
        }
        Command::Validate { catalog, trials } => {
            let names: Vec<String> = if catalog == "all" {
                BUILTIN_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                vec![catalog.clone()]
            };
            let mut s = format!("seed {}, {trials} trials, field {}\n", cfg.seed, cfg.field);
            let mut all = true;
            let mut reports = Vec::new();
            for n in &names {
                let c = catalog_arg(cfg, n)?;
                let r = validate_catalog(&c, *trials, cfg.seed);
                all &= r.passed();
                let _ = writeln!(
                    s,
                    "{} {}: bricks {} distinct {} directed {} spanning {} ({} failures)",
                    if r.passed() { "PASS" } else { "FAIL" },
                    c.name(),
                    r.bricks,
                    r.distinct,
                    r.directed,
                    r.spanning,
                    r.failures.len()
                );
                for f in &r.failures {
                    let _ = writeln!(s, "    {f}");
                }
                reports.push(json!({
                    "catalog": c.name(), "passed": r.passed(), "bricks": r.bricks, "distinct": r.distinct,
                    "directed": r.directed, "spanning": r.spanning, "failures": r.failures,
                }));
            }
            let out = if cfg.format == Format::Json {
                json_text(
                    &json!({"seed": cfg.seed, "trials": trials, "field": cfg.field.to_string(), "catalogs": reports}),
                )
            } else {
                s
            };
            Ok(Outcome {
                stdout: out,
                code: if all { EXIT_OK } else { EXIT_DOMAIN },
            })
        }
        Command::PaperSuite { criterion } => {
            let reports = match criterion {
                Some(i) => vec![suite::criterion(*i, cfg.seed)],
                None => {
                    let mut r = suite::run_suite(cfg.seed);
                    r.push(suite::criterion(13, cfg.seed));
                    r
                }
            };
            let passed = reports.iter().all(|r| r.passed());
            Ok(Outcome {
                stdout: suite::render(&reports, cfg.seed),
                code: if passed { EXIT_OK } else { EXIT_SUITE },
            })
        }
        Command::Relproj {
            template,
            poset,
            out,
        } => {
            let p = poset_arg(poset)?;
            let (c, e) = template_embeddings(cfg, template, &p)?;
            let rp = relative_projectives(&e, &c)?;
            let mut s = format!("{} relative projectives\n", rp.len());
            let mut all = Vec::new();
            for (k, r) in rp.iter().enumerate() {
                let v = json!({
                    "embedding": e[r.embedding].describe(),
                    "member": c.names()[r.member],
                    "module": module_to_json(&r.module),
                });
                if let Some(dir) = out {
                    std::fs::create_dir_all(dir)
                        .map_err(|e| Error::Format(format!("{}: {e}", dir.display())))?;
                    let path = dir.join(format!("relproj_{k:03}.json"));
                    std::fs::write(&path, json_text(&v))
                        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
                }
                let _ = writeln!(
                    s,
                    "#{k}: {} along {}",
                    c.names()[r.member],
                    e[r.embedding].describe()
                );
                if let Some(g) = render_grid(&r.module) {
                    s.push_str(&g);
                }
                all.push(v);
            }
            done(if cfg.format == Format::Json {
                json_text(&Value::Array(all))
            } else {
                s
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_arguments() {
        assert_eq!(poset_arg("grid3x2").unwrap().len(), 6);
        assert_eq!(poset_arg("X3fork").unwrap().len(), 3);
        assert!(poset_arg("nonsense").unwrap_err().is_format());
    }

    #[test]
    fn embeddings_command() {
        let o = run_args(["posetinv", "embeddings", "X3fork", "diamond"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("1 embeddings"));
    }

    #[test]
    fn bad_field_is_format_error() {
        let o = run_args(["posetinv", "--field", "gf:4", "embeddings", "X2", "X2"]);
        assert_eq!(o.code, EXIT_FORMAT);
    }

    #[test]
    fn map_parsing() {
        let x = poset_arg("X2").unwrap();
        let p = poset_arg("grid2x2").unwrap();
        let f = parse_map(&x, &p, "1=1,1; 2=2,2").unwrap();
        assert_eq!(f.apply(1), p.id("2,2").unwrap());
        assert!(parse_map(&x, &p, "1=1,1").is_err());
        assert!(parse_map(&x, &p, "1=2,2;2=1,1").is_err());
    }
}
