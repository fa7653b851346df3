//! Command-line front end: `robin <subcommand> …`.
//!
//! Exit codes: 0 success, 1 failed self-test, 2 invalid input, 3 solver
//! nonconvergence, 4 violated exact identity.

mod io;

pub use io::{emit, float, parse_rational};

use crate::geometry::{
    hodge_condition_residual, levi_big_k2, levi_k1, levi_k2, scalar_w, schema::Spec, DefiningFunction,
    Euclidean, GeometryError, MetricChart,
};
use crate::green::{robin_function, CField, GreenError, GreenSystem, GridDomain};
use crate::lie::{
    conjugated_tangent, extract_composition, flag_spanning_rank, flag_tangent, grassmann_spanning_rank,
    hopf_closure_report, parabolic_closure, random_upper_triangular, LieError, MatrixSubspace, SquareMatrix,
};
use crate::selftest;
use crate::torus::{
    classify_direction, foliation_data, parse_coeff_string, sigma_t_disjoint, to_coeff_string, DirectionCase,
    SixTuple, TorusError, DEFAULT_HEIGHT,
};
use crate::variation::{
    first_variation_check, lambda_of_t, second_variation_check, subharmonicity_scan, DomainFamily, VariationError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use io::{bigint_json, matrix_from_json, matrix_to_json, parse_complex, parse_points, parse_reals, qi_to_json};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Nonconvergent(String),
    #[error("{0}")]
    Contract(String),
    #[error("{0} acceptance criteria failed")]
    SelftestFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelftestFailed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Nonconvergent(_) => 3,
            CliError::Contract(_) => 4,
        }
    }
}

impl From<GreenError> for CliError {
    fn from(e: GreenError) -> Self {
        match e {
            GreenError::NonconvergentSolver { .. } => CliError::Nonconvergent(e.to_string()),
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<VariationError> for CliError {
    fn from(e: VariationError) -> Self {
        match e {
            VariationError::Green(g) => g.into(),
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<TorusError> for CliError {
    fn from(e: TorusError) -> Self {
        match e {
            TorusError::Contract(_) => CliError::Contract(e.to_string()),
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<LieError> for CliError {
    fn from(e: LieError) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "robin", version, about = "Robin constants, variation formulas, torus foliations and parabolic closures")]
pub struct Cli {
    /// Write the result to this file; `json` or `-` mean standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// c-Green function and Robin constant; Robin function over a pole lattice.
    Green(GreenArgs),
    /// First and second variation of the Robin constant along a family.
    Variation(VariationArgs),
    /// Levi curvatures and metric curvature at a point.
    Levi(LeviArgs),
    #[command(subcommand)]
    Torus(TorusCmd),
    #[command(subcommand)]
    Lie(LieCmd),
    /// Run the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct GreenArgs {
    /// Domain JSON (`ball`, `polynomial`, or any family kind at `t = 0`).
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Pole `x1,…,x2n`.
    #[arg(long, allow_hyphen_values = true)]
    pub pole: Option<String>,
    /// Pole lattice `x1,…;y1,…;…` for the Robin function.
    #[arg(long, allow_hyphen_values = true)]
    pub lattice: Option<String>,
    /// Lattice indices at which to compute the Hessian of −Λ.
    #[arg(long, value_delimiter = ',')]
    pub hessian_at: Vec<usize>,
    /// Constant nonnegative `c`.
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariationMode {
    Second,
    First,
    Lambda,
    Scan,
}

#[derive(Args, Debug)]
pub struct VariationArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub t0: String,
    /// t-step; defaults to `0.05 ρ`.
    #[arg(long)]
    pub ht: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Radius of the parameter disk.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub pole: Option<String>,
    #[arg(long, value_enum, default_value_t = VariationMode::Second)]
    pub mode: VariationMode,
    /// t-lattice `t1,t2;…` for `--mode scan`.
    #[arg(long, allow_hyphen_values = true)]
    pub lattice: Option<String>,
    /// Assert pseudoconvexity (checked by sampling k2 ≥ 0) before a scan.
    #[arg(long)]
    pub pseudoconvex: bool,
}

#[derive(Args, Debug)]
pub struct LeviArgs {
    /// Metric JSON; Euclidean when omitted.
    #[arg(long)]
    pub metric: Option<PathBuf>,
    /// Family JSON for the Levi curvatures.
    #[arg(long)]
    pub family: Option<PathBuf>,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub t: String,
    /// Point `x1,…,x2n`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Subcommand, Debug)]
pub enum TorusCmd {
    /// Foliation data of a six-tuple `m n m' n' p q`.
    FromTuple {
        #[arg(num_args = 6, allow_negative_numbers = true)]
        tuple: Vec<i64>,
    },
    /// Classify the direction `w = (a + ib) z`.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = DEFAULT_HEIGHT)]
        height: u32,
    },
    /// Leaf comparison of `Σ(t)` and `Σ(t')`.
    Foliation {
        #[arg(num_args = 6, allow_negative_numbers = true)]
        tuple: Vec<i64>,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        t2: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Base {
    Flag,
    Hopf,
}

#[derive(Subcommand, Debug)]
pub enum LieCmd {
    /// Subalgebra closure over the flag or Hopf base.
    Closure {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Base::Flag)]
        base: Base,
        /// JSON array of generator matrices.
        #[arg(long)]
        gens: Option<PathBuf>,
    },
    /// Flag tangent of `X`, or of `A exp(tX)(O)` when `--a` is given.
    Tangent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        a: Option<PathBuf>,
    },
    /// Spanning ranks on Grassmannians or flag spaces.
    Spanning {
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        grassmann: Option<Vec<usize>>,
        #[arg(long = "K", default_value = "1000")]
        k: String,
        #[arg(long)]
        flag: Option<usize>,
        /// Matrix `X`; defaults to `E_{p+1,1}` (Grassmann) or `E_21` (flag).
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closures over the Hopf base.
    Hopf {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn read_json(path: &PathBuf) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn family_from(path: &PathBuf) -> Result<Arc<dyn DefiningFunction>, CliError> {
    Ok(Arc::from(Spec::parse(&read(path)?)?.family()?))
}

fn c_field(c: f64) -> Result<CField, CliError> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(CliError::Validation("--c must be finite and nonnegative".into()));
    }
    Ok(if c == 0.0 { CField::Zero } else { CField::Constant(c) })
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Runs the CLI and returns the process exit code.
pub fn run<I: IntoIterator<Item = T>, T: Into<OsString> + Clone>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match execute(&cli) {
        Ok(text) => match cli.out.as_ref().filter(|p| !matches!(p.to_str(), Some("json" | "-"))) {
            Some(p) => match std::fs::write(p, text) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {}: {e}", p.display());
                    2
                }
            },
            None => {
                print!("{text}");
                0
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("ROBIN_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("ROBIN_THREADS must be a positive integer, got {v:?}")))?;
    // A second initialization (e.g. repeated calls in one process) is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.cmd {
        Cmd::Green(a) => green(a),
        Cmd::Variation(a) => variation(a),
        Cmd::Levi(a) => levi(a),
        Cmd::Torus(t) => torus(t),
        Cmd::Lie(l) => lie(l),
        Cmd::Selftest(s) => {
            let results = selftest::run(&s.only, &mut |r| eprintln!("{}", r.line()));
            let mut text = String::new();
            for r in &results {
                text.push_str(&r.line());
                text.push('\n');
            }
            let failed = results.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                print!("{text}");
                return Err(CliError::SelftestFailed(failed));
            }
            Ok(text)
        }
    }
}

fn grid_json(g: &crate::green::Grid, npa: usize) -> Value {
    json!({"nodes_per_axis": npa, "h": g.h, "counts": g.counts, "origin": g.origin})
}

fn green(a: &GreenArgs) -> Result<String, CliError> {
    let psi = family_from(&a.domain)?;
    let c = c_field(a.c)?;
    let d2 = 2 * psi.n();
    let poles = match (&a.pole, &a.lattice) {
        (Some(p), None) => vec![parse_reals(p, "--pole")?],
        (None, Some(l)) => parse_points(l, "--lattice")?,
        _ => return Err(CliError::Validation("give exactly one of --pole and --lattice".into())),
    };
    if poles.is_empty() || poles.iter().any(|p| p.len() != d2) {
        return Err(CliError::Validation(format!("poles need {d2} real coordinates")));
    }
    let domain = GridDomain::new(psi, C64::new(0.0, 0.0), a.grid, poles[0].clone());
    if a.pole.is_some() {
        let sys = GreenSystem::assemble(&domain, &c)?;
        let f = sys.solve(&poles[0], None)?;
        if a.format == Format::Csv {
            return Err(CliError::Validation("CSV output is for --lattice".into()));
        }
        return Ok(emit(&json!({
            "lambda": f.lambda,
            "residual": f.residual,
            "iterations": f.iterations,
            "min_g": f.min_g,
            "grid": grid_json(&f.grid, a.grid),
            "pole": f.pole,
        })));
    }
    let field = robin_function(&domain, &poles, &c, &a.hessian_at)?;
    if a.format == Format::Csv {
        let mut s = String::new();
        let header: Vec<String> = (1..=d2).map(|k| format!("x{k}")).collect();
        s.push_str(&header.join(","));
        s.push_str(",Lambda\n");
        for (p, l) in field.poles.iter().zip(&field.lambda) {
            let row: Vec<String> = p.iter().chain(std::iter::once(l)).map(|v| float(*v)).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        return Ok(s);
    }
    let samples: Vec<Value> = (0..poles.len())
        .map(|i| {
            let mut m = Map::new();
            m.insert("pole".into(), json!(field.poles[i]));
            m.insert("Lambda".into(), json!(field.lambda[i]));
            if let Some(h) = &field.hessian[i] {
                let rows: Vec<Value> =
                    (0..h.nrows()).map(|r| Value::Array((0..h.ncols()).map(|c| pair(h[(r, c)])).collect())).collect();
                m.insert("hessian".into(), Value::Array(rows));
                m.insert("eigen".into(), json!(field.eigen[i]));
                m.insert("step".into(), json!(field.step[i]));
            }
            Value::Object(m)
        })
        .collect();
    Ok(emit(&json!({"nodes_per_axis": a.grid, "samples": samples})))
}

fn variation(a: &VariationArgs) -> Result<String, CliError> {
    let psi = family_from(&a.family)?;
    let n = psi.n();
    let pole = match &a.pole {
        Some(p) => parse_reals(p, "--pole")?,
        None => vec![0.0; 2 * n],
    };
    if pole.len() != 2 * n {
        return Err(CliError::Validation(format!("--pole needs {} coordinates", 2 * n)));
    }
    if !(a.rho > 0.0) {
        return Err(CliError::Validation("--rho must be positive".into()));
    }
    let fam = DomainFamily::new(psi, a.rho, pole);
    let t0 = parse_complex(&a.t0, "--t0")?;
    let ht = a.ht.unwrap_or_else(|| fam.default_ht());
    let v = match a.mode {
        VariationMode::Second => serde_json::to_value(second_variation_check(&fam, t0, ht, a.grid)?)
            .map_err(|e| CliError::Validation(e.to_string()))?,
        VariationMode::First => {
            let (lhs, rhs, mis) = first_variation_check(&fam, t0, ht, a.grid)?;
            json!({"lhs": pair(lhs), "rhs": pair(rhs), "mismatch": mis, "t0": pair(t0), "h_t": ht})
        }
        VariationMode::Lambda => json!({"t": pair(t0), "lambda": lambda_of_t(&fam, t0, a.grid)?}),
        VariationMode::Scan => {
            let ts: Vec<C64> = match &a.lattice {
                Some(l) => parse_points(l, "--lattice")?
                    .into_iter()
                    .map(|p| match p.as_slice() {
                        [re, im] => Ok(C64::new(*re, *im)),
                        _ => Err(CliError::Validation("lattice points are t1,t2".into())),
                    })
                    .collect::<Result<_, _>>()?,
                None => vec![t0],
            };
            serde_json::to_value(subharmonicity_scan(&fam, &ts, ht, a.grid, a.pseudoconvex)?)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
    };
    Ok(emit(&v))
}

fn levi(a: &LeviArgs) -> Result<String, CliError> {
    let x = parse_reals(&a.point, "--point")?;
    let chart: Box<dyn MetricChart> = match &a.metric {
        Some(p) => Spec::parse(&read(p)?)?.metric()?,
        None => Box::new(Euclidean { n: x.len() / 2 }),
    };
    let n = chart.n();
    if x.len() != 2 * n {
        return Err(CliError::Validation(format!("--point needs {} coordinates", 2 * n)));
    }
    let z: Vec<C64> = x.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    let mut out = Map::new();
    out.insert("metric".into(), json!(chart.name()));
    out.insert("W".into(), json!(scalar_w(&*chart, &z)?));
    let hodge = hodge_condition_residual(&*chart, &z)?;
    out.insert("hodge_residual".into(), json!(hodge.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()));
    if let Some(f) = &a.family {
        let psi = family_from(f)?;
        if psi.n() != n {
            return Err(CliError::Validation("family and metric dimensions differ".into()));
        }
        let t = parse_complex(&a.t, "--t")?;
        out.insert("k1".into(), pair(levi_k1(&*chart, &*psi, t, &z)?));
        out.insert("k2".into(), json!(levi_k2(&*chart, &*psi, t, &z)?));
        out.insert("K2".into(), json!(levi_big_k2(&*chart, &*psi, t, &z)?));
    }
    Ok(emit(&Value::Object(out)))
}

fn tuple_of(v: &[i64]) -> Result<SixTuple, CliError> {
    match v {
        [m, n, mp, np, p, q] => Ok(SixTuple::new(*m, *n, *mp, *np, *p, *q)?),
        _ => Err(CliError::Validation("a six-tuple needs m n m' n' p q".into())),
    }
}

fn torus(cmd: &TorusCmd) -> Result<String, CliError> {
    let s = |x: &crate::torus::AlgebraicScalar| Value::String(to_coeff_string(x));
    match cmd {
        TorusCmd::FromTuple { tuple } => {
            let t = tuple_of(tuple)?;
            let fd = foliation_data(&t)?;
            let jac = &(-&(&fd.big_a * &fd.big_a)) - &(&fd.big_b * &fd.big_c);
            let pts = fd.marked_points();
            Ok(emit(&json!({
                "tuple": t.as_array().iter().map(bigint_json).collect::<Vec<_>>(),
                "a": s(&fd.a),
                "b": s(&fd.b),
                "A": s(&fd.big_a),
                "B": s(&fd.big_b),
                "C": s(&fd.big_c),
                "jacobian": s(&jac),
                "l1_dir": [bigint_json(&fd.l1_dir.0), bigint_json(&fd.l1_dir.1)],
                "l2_dir": [s(&fd.l2_dir.0), bigint_json(&fd.l2_dir.1)],
                "d": s(&fd.d),
                "eta": s(&fd.eta),
                "generators": fd.generators.iter().map(|g| g.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "marked_points": pts.iter().map(|p| p.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "marked_points_on_plane": pts.iter().all(|p| fd.on_plane(p)),
            })))
        }
        TorusCmd::Classify { a, b, height } => {
            let (a, b) = (parse_coeff_string(a)?, parse_coeff_string(b)?);
            let d = classify_direction(&a, &b, *height)?;
            let mut out = Map::new();
            out.insert("a".into(), s(&d.a));
            out.insert("b".into(), s(&d.b));
            out.insert("case".into(), json!(d.case.tag()));
            match &d.case {
                DirectionCase::RationalSlope { p, q } | DirectionCase::XiRationalSlope { p, q } => {
                    out.insert("p".into(), bigint_json(p));
                    out.insert("q".into(), bigint_json(q));
                }
                DirectionCase::BNonzero(t) => {
                    out.insert("tuple".into(), json!(t.as_array().iter().map(bigint_json).collect::<Vec<_>>()));
                }
                _ => {}
            }
            Ok(emit(&Value::Object(out)))
        }
        TorusCmd::Foliation { tuple, t, t2 } => {
            let fd = foliation_data(&tuple_of(tuple)?)?;
            let (t, t2) = (parse_rational(t)?, parse_rational(t2)?);
            let disjoint = sigma_t_disjoint(&fd, &t, &t2);
            Ok(emit(&json!({
                "t": t.to_string(),
                "t2": t2.to_string(),
                "same_leaf": !disjoint,
                "disjoint": disjoint,
                "d": s(&fd.d),
                "eta": s(&fd.eta),
            })))
        }
    }
}

fn lie(cmd: &LieCmd) -> Result<String, CliError> {
    match cmd {
        LieCmd::Closure { n, base, gens } => {
            if *n < 2 {
                return Err(CliError::Validation("--n must be at least 2".into()));
            }
            let gens: Vec<SquareMatrix> = match gens {
                Some(p) => read_json(p)?
                    .as_array()
                    .ok_or_else(|| CliError::Validation("--gens must be a JSON array of matrices".into()))?
                    .iter()
                    .map(|m| matrix_from_json(m, Some(*n)))
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            let b = match base {
                Base::Flag => MatrixSubspace::upper_triangular(*n),
                Base::Hopf => MatrixSubspace::hopf_base(*n),
            };
            let p = parabolic_closure(&gens, &b)?;
            let comp = match extract_composition(&p) {
                Ok(c) => json!(c.parts()),
                Err(LieError::NotParabolic) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            Ok(emit(&json!({"composition": comp, "dim": p.dim()})))
        }
        LieCmd::Tangent { n, matrix, a } => {
            let x = matrix_from_json(&read_json(matrix)?, Some(*n))?;
            let v = match a {
                Some(p) => conjugated_tangent(&matrix_from_json(&read_json(p)?, Some(*n))?, &x)?,
                None => flag_tangent(&x),
            };
            Ok(emit(&json!({"n": n, "tangent": v.iter().map(qi_to_json).collect::<Vec<_>>()})))
        }
        LieCmd::Spanning { grassmann, k, flag, matrix, samples, seed } => match (grassmann, flag) {
            (Some(pq), None) => {
                let (p, q) = (pq[0], pq[1]);
                if p == 0 || q == 0 {
                    return Err(CliError::Validation("p and q must be positive".into()));
                }
                let x = match matrix {
                    Some(m) => matrix_from_json(&read_json(m)?, Some(p + q))?,
                    None => SquareMatrix::unit(p + q, p, 0),
                };
                let k = parse_rational(k)?;
                let r = grassmann_spanning_rank(p, q, &x, &k)?;
                Ok(emit(&json!({
                    "p": p, "q": q, "K": k.to_string(),
                    "pivot": [r.pivot.0 + 1, r.pivot.1 + 1],
                    "rank_formal": r.rank_formal, "rank_at_K": r.rank_at_k, "pq": p * q,
                    "x": matrix_to_json(&x),
                })))
            }
            (None, Some(n)) => {
                if *n < 2 {
                    return Err(CliError::Validation("--flag needs n ≥ 2".into()));
                }
                let x = match matrix {
                    Some(m) => matrix_from_json(&read_json(m)?, Some(*n))?,
                    None => SquareMatrix::unit(*n, 1, 0),
                };
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let a: Vec<SquareMatrix> = (0..*samples).map(|_| random_upper_triangular(*n, 5, &mut rng)).collect();
                let r = flag_spanning_rank(&x, &a)?;
                Ok(emit(&json!({
                    "n": n, "samples": r.samples, "rank": r.rank,
                    "tangent_dim": n * (n - 1) / 2,
                    "first_block_only": r.first_block_only,
                })))
            }
            _ => Err(CliError::Validation("give exactly one of --grassmann P Q and --flag N".into())),
        },
        LieCmd::Hopf { n } => {
            let r = hopf_closure_report(*n)?;
            Ok(emit(&json!({
                "n": r.n,
                "dim_x0": r.x0.dim(),
                "expected_dim_x0": 1 + r.n * (r.n - 1),
                "x0_is_stabilizer": r.x0_is_stabilizer,
                "escapes": r.escapes.iter().map(|(j, full)| json!({"j": j, "full": full})).collect::<Vec<_>>(),
                "verdict": r.verdict,
            })))
        }
    }
}
