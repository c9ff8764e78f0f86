mod eval;
mod inputs;
mod parse;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wick_core::algebra::{Basis, OperatorPolynomial};
use wick_core::applications::{
    cavity_closed_matrix, cavity_trotter, dilation_matrix, driven_cavity, forced_particle, normal_ordered_gaussian_matrix,
    particle_closed_state, particle_trotter_state, squeeze_route, squeezing_normal_form,
};
use wick_core::fock::{compare_block, number_state, FockConfig};
use wick_core::gwt::{general_contraction, gwt_verify};
use wick_core::scalar::{format_rational, rational_to_f64, Rational, Scalar};
use wick_core::sorder::{s_of_chi, s_ordered_value, verify_scheme};

use inputs::Config;
use parse::{parse, parse_ordering, parse_rational};

#[derive(Parser)]
#[command(name = "wick", version, about = "Operator orderings, contractions and their numeric checks")]
struct Cli {
    /// Structured output.
    #[arg(long, global = true)]
    json: bool,
    /// `key = value` file with defaults for fock, steps and tolerance.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Qp,
    Ladder,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Particle,
    Cavity,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the ordering nodes of an expression and print its normal form.
    Order {
        expr: String,
        #[arg(long)]
        modes: Option<usize>,
        /// Basis of the printed normal form.
        #[arg(long, value_enum)]
        basis: Option<BasisArg>,
    },
    /// Contraction C with O_to e^X = e^C O_from e^X.
    Contract {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Check the theorem degree by degree up to K.
    GwtVerify {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Interleaving weights of a chi path and the s-ordered value they give.
    Sweights {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// s-ordered value of c^n cd^m in normal form.
    Svalue {
        /// A rational or an indeterminate name.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
    },
    /// Closed-form evolution of a driven system, optionally checked against Trotter.
    Evolve {
        #[arg(value_enum)]
        system: System,
        #[arg(long)]
        drive: PathBuf,
        /// Particle mass.
        #[arg(long)]
        m: Option<String>,
        /// Cavity detuning.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long)]
        t: String,
        #[arg(long)]
        fock: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Normal-ordered form of the squeezer, optionally checked against the dilation.
    Squeeze {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        fock: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

struct Failure {
    code: u8,
    message: String,
    /// What was computed before a verification or tolerance failure.
    partial: Option<Box<Output>>,
}

fn usage(e: impl ToString) -> Failure {
    Failure { code: 1, message: e.to_string(), partial: None }
}

fn parse_err(e: impl ToString) -> Failure {
    Failure { code: 2, message: e.to_string(), partial: None }
}

fn verification(message: String, out: Output) -> Failure {
    Failure { code: 3, message, partial: Some(Box::new(out)) }
}

fn tolerance(message: String, out: Output) -> Failure {
    Failure { code: 4, message, partial: Some(Box::new(out)) }
}

/// What a command prints: text lines, or the JSON object.
struct Output {
    text: Vec<String>,
    normal_form: Value,
    contraction: Value,
    report: Value,
}

impl Output {
    fn new() -> Self {
        Output { text: Vec::new(), normal_form: json!([]), contraction: Value::Null, report: json!({}) }
    }
}

fn scalar_terms(s: &Scalar) -> Vec<Value> {
    s.terms()
        .map(|(m, g)| {
            let params: serde_json::Map<String, Value> =
                m.powers().iter().map(|(sym, k)| (sym.name().to_string(), json!(k))).collect();
            json!({
                "re": format_rational(&g.re),
                "im": format_rational(&g.im),
                "params": params,
                "sqrt2": m.has_root2(),
            })
        })
        .collect()
}

fn polynomial_json(p: &OperatorPolynomial) -> Value {
    let indexed = p.modes() > 1;
    let mut out = Vec::new();
    for (w, c) in p.terms() {
        let word: Vec<String> = w.iter().map(|g| g.display(indexed)).collect();
        for mut t in scalar_terms(c) {
            t["word"] = json!(word);
            out.push(t);
        }
    }
    Value::Array(out)
}

fn scalar_json(s: &Scalar) -> Value {
    json!({ "text": s.to_string(), "terms": scalar_terms(s) })
}

fn rational_arg(name: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).ok_or_else(|| parse_err(format!("--{name}: `{text}` is not a rational number")))
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn linear_pair(
    from: &str,
    to: &str,
    x: &str,
    modes: Option<usize>,
) -> Result<(wick_core::gwt::OrderingSpec, wick_core::gwt::OrderingSpec), Failure> {
    let o1 = parse_ordering(from).map_err(|e| parse_err(format!("--from: {e}")))?;
    let o2 = parse_ordering(to).map_err(|e| parse_err(format!("--to: {e}")))?;
    let xe = parse(x).map_err(|e| parse_err(format!("--x: {e}")))?;
    let n = eval::mode_count(&xe, modes).map_err(parse_err)?;
    let lc = eval::linear(&xe, n).map_err(|e| parse_err(format!("--x: {e}")))?;
    let s1 = eval::ordering_spec(&o1, &lc).map_err(usage)?;
    let s2 = eval::ordering_spec(&o2, &lc).map_err(usage)?;
    Ok((s1, s2))
}

fn order(expr: &str, modes: Option<usize>, basis: Option<BasisArg>) -> Result<Output, Failure> {
    let e = parse(expr).map_err(parse_err)?;
    eval::mode_count(&e, modes).map_err(parse_err)?;
    let p = eval::eval(&e).map_err(usage)?;
    let basis = match basis {
        Some(BasisArg::Qp) => Basis::Qp,
        Some(BasisArg::Ladder) => Basis::Ladder,
        None => eval::natural_basis(&p),
    };
    let nf = p.normal_form(basis);
    let mut out = Output::new();
    out.text.push(nf.to_string());
    out.normal_form = polynomial_json(&nf);
    out.report = json!({ "expression": e.to_string(), "basis": format!("{basis:?}").to_lowercase() });
    Ok(out)
}

fn contract(from: &str, to: &str, x: &str, modes: Option<usize>) -> Result<Output, Failure> {
    let (o1, o2) = linear_pair(from, to, x, modes)?;
    let c = general_contraction(&o1, &o2).map_err(usage)?;
    let mut out = Output::new();
    out.text.push(c.to_string());
    out.contraction = scalar_json(&c);
    Ok(out)
}

fn verify(from: &str, to: &str, x: &str, degree: usize, modes: Option<usize>) -> Result<Output, Failure> {
    let (o1, o2) = linear_pair(from, to, x, modes)?;
    let r = gwt_verify(&o1, &o2, degree).map_err(usage)?;
    let mut out = Output::new();
    let verdict = match r.first_failure() {
        None => format!("pass, C = {}", r.contraction),
        Some(d) => format!("FAIL at degree {d}, C = {}", r.contraction),
    };
    out.text.push(verdict);
    out.contraction = scalar_json(&r.contraction);
    out.report = json!({
        "passed": r.passed(),
        "max_degree": r.max_degree,
        "degrees": r.degrees.iter().map(|d| json!({ "degree": d.degree, "pass": d.pass })).collect::<Vec<_>>(),
    });
    match r.first_failure() {
        None => Ok(out),
        Some(d) => Err(verification(format!("theorem check failed at degree {d}"), out)),
    }
}

fn sweights(chi: &str, n: usize, m: usize) -> Result<Output, Failure> {
    let path = inputs::parse_chi(chi).map_err(|e| parse_err(format!("--chi: {e}")))?;
    let r = verify_scheme(&path, n, m).map_err(usage)?;
    let mut out = Output::new();
    for e in &r.weights.entries {
        out.text.push(format!("{}  {}", e.word_string(), format_rational(&e.weight)));
    }
    out.text.push(format!("s = {}", format_rational(&s_of_chi(&path))));
    out.text.push(format!("value = {}", r.value));
    out.text.push(format!("verified: {}", if r.passed() { "pass" } else { "FAIL" }));
    out.normal_form = polynomial_json(&r.value);
    out.report = json!({
        "chi": path.to_string(),
        "s": format_rational(&r.s),
        "weights": r.weights.entries.iter()
            .map(|e| json!({ "word": e.word_string(), "bits": e.bits(), "weight": format_rational(&e.weight) }))
            .collect::<Vec<_>>(),
        "expected": r.expected.to_string(),
        "passed": r.passed(),
    });
    if r.passed() {
        Ok(out)
    } else {
        Err(verification("weights do not reproduce the s-ordered value".into(), out))
    }
}

fn svalue(s: &str, n: u32, m: u32) -> Result<Output, Failure> {
    let s = match parse_rational(s) {
        Some(r) => Scalar::from_rational(r),
        None if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !parse::is_reserved(s) => {
            Scalar::var(s)
        }
        None => return Err(parse_err(format!("--s: `{s}` is neither a rational nor an indeterminate"))),
    };
    let v = s_ordered_value(n, m, &s);
    let mut out = Output::new();
    out.text.push(v.to_string());
    out.normal_form = polynomial_json(&v);
    Ok(out)
}

struct Numeric {
    fock: Option<usize>,
    steps: usize,
    tolerance: Option<f64>,
}

fn check_tolerance(mut out: Output, err: f64, tol: f64, what: &str) -> Result<Output, Failure> {
    out.text.push(format!("{what} error {err:.3e} (tolerance {tol:.1e})"));
    out.report["error"] = json!(err);
    out.report["tolerance"] = json!(tol);
    out.report["within_tolerance"] = json!(err < tol);
    if err < tol {
        Ok(out)
    } else {
        Err(tolerance(format!("{what} error {err:.3e} exceeds {tol:.1e}"), out))
    }
}

fn evolve(system: System, drive: &PathBuf, m: Option<&str>, omega: Option<f64>, t: &str, num: Numeric) -> Result<Output, Failure> {
    let d = inputs::parse_drive(&read_file(drive)?).map_err(|e| parse_err(format!("{}: {e}", drive.display())))?;
    let t = rational_arg("t", t)?;
    let mut out = Output::new();
    match system {
        System::Particle => {
            if omega.is_some() {
                return Err(usage("--omega applies to the cavity"));
            }
            let m = rational_arg("m", m.unwrap_or("1"))?;
            let r = forced_particle(&d, &m, &t).map_err(usage)?;
            let c = r.contraction();
            match &r.exact {
                Some(x) => {
                    out.text.push(format!("dp = {}", format_rational(&x.dp)));
                    out.text.push(format!("dq = {}", format_rational(&x.dq)));
                    out.text.push(format!("C = {}", x.contraction));
                    out.contraction = scalar_json(&x.contraction);
                    out.report = json!({ "dp": format_rational(&x.dp), "dq": format_rational(&x.dq) });
                }
                None => {
                    out.text.push(format!("dp = {}", r.dp));
                    out.text.push(format!("dq = {}", r.dq));
                    out.text.push(format!("C = {}i", r.contraction_im));
                    out.contraction = json!({ "re": c.re, "im": c.im });
                    out.report = json!({ "dp": r.dp, "dq": r.dq });
                }
            }
            if let Some(n) = num.fock {
                let cfg = FockConfig::single(n).map_err(usage)?;
                let vac = number_state(0, n);
                let tf = rational_to_f64(&t);
                let trotter = particle_trotter_state(&d, rational_to_f64(&m), tf, num.steps, &vac, &cfg).map_err(usage)?;
                let closed = particle_closed_state(&r, &vac, &cfg).map_err(usage)?;
                let err = closed.iter().zip(&trotter).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                out.report["steps"] = json!(num.steps);
                out.report["fock"] = json!(n);
                out = check_tolerance(out, err, num.tolerance.unwrap_or(1e-4), "vacuum state")?;
            }
        }
        System::Cavity => {
            if m.is_some() {
                return Err(usage("--m applies to the particle"));
            }
            let w = omega.unwrap_or(0.0);
            let r = driven_cavity(&d, w, &t).map_err(usage)?;
            out.text.push(format!("dc* = {:.12}", r.dc_conj));
            out.text.push(format!("C = {:.12}", r.contraction));
            out.contraction = json!({ "re": r.contraction.re, "im": r.contraction.im });
            out.report = json!({ "dc_conj": { "re": r.dc_conj.re, "im": r.dc_conj.im } });
            if let Some(n) = num.fock {
                let cfg = FockConfig::single(n).map_err(usage)?;
                let closed = cavity_closed_matrix(&r, &cfg).map_err(usage)?;
                let trotter = cavity_trotter(&d, w, rational_to_f64(&t), num.steps, &cfg).map_err(usage)?;
                let err = compare_block(&closed, &trotter, n / 2).map_err(usage)?;
                out.report["steps"] = json!(num.steps);
                out.report["fock"] = json!(n);
                out = check_tolerance(out, err, num.tolerance.unwrap_or(1e-6), "top block operator")?;
            }
        }
    }
    Ok(out)
}

fn squeeze(mu: &str, fock: Option<usize>, tol: Option<f64>) -> Result<Output, Failure> {
    let mu = rational_arg("mu", mu)?;
    let g = squeezing_normal_form(&mu).map_err(usage)?;
    let route = squeeze_route().map_err(usage)?;
    let mut out = Output::new();
    out.text.push(format!("prefactor^2 = {}", format_rational(&g.prefactor_sq)));
    out.text.push(format!("alpha = {}", format_rational(&g.alpha)));
    out.text.push(format!("beta = {}", format_rational(&g.beta)));
    out.text.push(format!("gamma = {}", format_rational(&g.gamma)));
    let route_ok = route.exponent_matches && route.prefactor_matches_times_mu && route.branches_agree;
    out.text.push(format!("symbolic route: {}", if route_ok { "consistent" } else { "INCONSISTENT" }));
    let (pq, p2, q2) = g.qp_exponent();
    out.report = json!({
        "prefactor_sq": format_rational(&g.prefactor_sq),
        "alpha": format_rational(&g.alpha),
        "beta": format_rational(&g.beta),
        "gamma": format_rational(&g.gamma),
        "qp_exponent": {
            "pq": { "re": format_rational(&pq.re), "im": format_rational(&pq.im) },
            "p2": format_rational(&p2),
            "q2": format_rational(&q2),
        },
        "route": {
            "alpha": route.alpha.to_string(),
            "beta": route.beta.to_string(),
            "gamma": route.gamma.to_string(),
            "consistent": route_ok,
        },
    });
    if !route_ok {
        return Err(verification("symbolic route disagrees with the closed form".into(), out));
    }
    if let Some(n) = fock {
        let cfg = FockConfig::single(n).map_err(usage)?;
        let m = normal_ordered_gaussian_matrix(&g, &cfg).map_err(usage)?;
        let oracle = dilation_matrix(rational_to_f64(&mu), &cfg).map_err(usage)?;
        let err = compare_block(&m, &oracle, n / 2).map_err(usage)?;
        out.report["fock"] = json!(n);
        out = check_tolerance(out, err, tol.unwrap_or(1e-8), "top block dilation")?;
    }
    Ok(out)
}

fn render(out: &Output, json: bool) {
    if json {
        let v = json!({ "normal_form": out.normal_form, "contraction": out.contraction, "report": out.report });
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
    } else {
        for line in &out.text {
            println!("{line}");
        }
    }
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let cfg = match &cli.config {
        Some(p) => inputs::parse_config(&read_file(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => Config::default(),
    };
    match cli.command {
        Command::Order { expr, modes, basis } => order(&expr, modes, basis),
        Command::Contract { from, to, x, modes } => contract(&from, &to, &x, modes),
        Command::GwtVerify { from, to, x, degree, modes } => verify(&from, &to, &x, degree, modes),
        Command::Sweights { chi, n, m } => sweights(&chi, n, m),
        Command::Svalue { s, n, m } => svalue(&s, n, m),
        Command::Evolve { system, drive, m, omega, t, fock, steps, tolerance } => {
            let num = Numeric {
                fock: fock.or(cfg.fock),
                steps: steps.or(cfg.steps).unwrap_or(1000),
                tolerance: tolerance.or(cfg.tolerance),
            };
            evolve(system, &drive, m.as_deref(), omega, &t, num)
        }
        Command::Squeeze { mu, fock, tolerance } => squeeze(&mu, fock.or(cfg.fock), tolerance.or(cfg.tolerance)),
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
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            render(&out, json);
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(out) = &f.partial {
                render(out, json);
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
