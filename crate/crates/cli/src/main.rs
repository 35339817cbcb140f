use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use twistsym::bernoulli::{power_sum_egf_check, BernoulliPolynomial, Setting, TwistSpec};
use twistsym::config::parse_grid;
use twistsym::dirichlet::{all_characters, DirichletCharacter};
use twistsym::identities::{grid_verify, verify_instance, Mode, TheoremInstance, YSpec};
use twistsym::padic::{convergence_check, distribution_check, riemann_sum, PadicRing};
use twistsym::quotients::{closed_form_series, consistency_check, QuotientType};
use twistsym::report::{render, Format, Listing, Render};
use twistsym::series::egf_coefficient;
use twistsym::{Error, Rational};

/// Exact twisted Bernoulli numbers and symmetry-identity audits.
#[derive(Parser)]
#[command(name = "twistsym", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Pretty,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Pretty => Format::Pretty,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    AsStated,
    Normalized,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AsStated => Mode::AsStated,
            ModeArg::Normalized => Mode::Normalized,
        }
    }
}

/// Character and twist shared by most subcommands.
#[derive(Args)]
struct SettingArgs {
    /// Modulus of the character.
    #[arg(long, default_value_t = 1)]
    d: u64,
    /// Character label: `trivial`, or one exponent per unit-group generator, e.g. `1,0`.
    #[arg(long = "char", default_value = "trivial")]
    chi: String,
    /// Order of the root of unity ξ = ζ_r^j.
    #[arg(long)]
    r: u64,
    /// Exponent j of ξ = ζ_r^j; must be prime to r.
    #[arg(long, default_value_t = 1)]
    j: u64,
}

impl SettingArgs {
    fn character(&self) -> Result<DirichletCharacter, Error> {
        parse_character(self.d, &self.chi)
    }

    fn setting(&self) -> Result<Setting, Error> {
        Ok(Setting::new(self.character()?, TwistSpec::new(self.r, self.j)?))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Twisted generalized Bernoulli numbers B_{n,χ,ξ^w}, or polynomial values at --x.
    Bernoulli {
        #[command(flatten)]
        setting: SettingArgs,
        /// Power of ξ.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        w: i64,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Evaluate B_{n,χ,ξ^w}(x) at this rational instead.
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        x: Option<Rational>,
    },
    /// Twisted power sums S_k(upper; χ, ξ^w) for k ≤ k-max.
    PowerSum {
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        w: i64,
        #[arg(long)]
        upper: u64,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        /// Also check the generating function of S_k(d v - 1; χ, ξ) against
        /// its closed quotient, for this v, to order k-max.
        #[arg(long)]
        egf_check: Option<u64>,
    },
    /// Characters mod d with order, conductor and primitivity.
    Chars {
        #[arg(long)]
        d: u64,
    },
    /// EGF coefficients of a quotient's closed form.
    Quotient {
        /// Quotient type: G0..G2, L23:0..L23:3, L13:0..L13:3, L12:0..L12:1.
        #[arg(long = "type", value_parser = parse_qtype)]
        qtype: QuotientType,
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<u64>,
        /// One rational per y-variable.
        #[arg(long, value_delimiter = ',', value_parser = parse_rational, allow_hyphen_values = true)]
        y: Vec<Rational>,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Compares every expansion form of a quotient type with its weighted closed form.
    Consistency {
        #[arg(long = "type", value_parser = parse_qtype)]
        qtype: QuotientType,
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<u64>,
        #[arg(long, value_delimiter = ',', value_parser = parse_rational, allow_hyphen_values = true)]
        y: Vec<Rational>,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Verifies one theorem at one parameter point.
    Verify {
        /// Theorem number, 1 to 11.
        #[arg(long)]
        theorem: u8,
        #[command(flatten)]
        setting: SettingArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "as-stated")]
        mode: ModeArg,
        /// Fixed y-values, one per variable; default is the grid 0..=n+1.
        #[arg(long, value_delimiter = ',', value_parser = parse_rational, allow_hyphen_values = true)]
        y: Vec<Rational>,
    },
    /// Verifies theorems over a grid (the standard grid unless --grid-file is given).
    Audit {
        /// Grid file of `key = value` lines.
        #[arg(long)]
        grid_file: Option<PathBuf>,
        /// Restrict to these theorems.
        #[arg(long, value_delimiter = ',')]
        theorem: Vec<u8>,
        /// Restrict to one mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// p-adic Riemann sums of the twisted measure.
    Padic {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        setting: SettingArgs,
        /// Moment: compares sums of χ(x) x^n with B_{n+1,χ,ξ}/(n+1).
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        levels: u32,
        /// Precision M of the ring Z[ζ_r]/p^M.
        #[arg(long, default_value_t = 40)]
        precision: u32,
        /// Report distribution compatibility and f ≡ 1 sums per level instead.
        #[arg(long)]
        distribution: bool,
    },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_qtype(s: &str) -> Result<QuotientType, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_character(d: u64, label: &str) -> Result<DirichletCharacter, Error> {
    match label.trim() {
        "trivial" => DirichletCharacter::trivial(d),
        "" => DirichletCharacter::new(d, &[]),
        l => {
            let exps = l
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad character label {label:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            DirichletCharacter::new(d, &exps)
        }
    }
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precondition(_)
            | Error::Parse(_)
            | Error::InvalidCharacterLabel { .. }
            | Error::InvalidConductor(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

struct Output {
    text: String,
    pass: bool,
}

fn emit<T: Render>(x: &T, format: Format, pass: bool) -> Result<Output, Failure> {
    Ok(Output { text: render(x, format)?, pass })
}

fn params(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn setting_params(s: &SettingArgs) -> Vec<(&'static str, String)> {
    vec![("d", s.d.to_string()), ("char", s.chi.clone()), ("r", s.r.to_string()), ("j", s.j.to_string())]
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn run(cmd: Command, format: Option<Format>) -> Result<Output, Failure> {
    let fmt = format.unwrap_or(Format::Pretty);
    match cmd {
        Command::Bernoulli { setting, w, n_max, x } => {
            let set = setting.setting()?;
            let numbers = set.bernoulli(w, n_max)?;
            let values: Vec<_> = match &x {
                None => numbers[..=n_max].to_vec(),
                Some(x) => (0..=n_max)
                    .map(|n| Ok(BernoulliPolynomial::new(&numbers, n)?.eval(x)))
                    .collect::<Result<_, Error>>()?,
            };
            let mut p = setting_params(&setting);
            p.push(("w", w.to_string()));
            p.push(("n_max", n_max.to_string()));
            if let Some(x) = &x {
                p.push(("x", x.to_string()));
            }
            let listing = Listing {
                command: "bernoulli".into(),
                parameters: params(&p),
                header: vec!["n".into(), "value".into()],
                rows: values.iter().enumerate().map(|(n, v)| vec![n.to_string(), v.to_string()]).collect(),
                data: json!({ "values": values }),
            };
            emit(&listing, fmt, true)
        }
        Command::PowerSum { setting, w, upper, k_max, egf_check } => {
            let set = setting.setting()?;
            let sums = set.power_sums(upper, w, k_max);
            let mut p = setting_params(&setting);
            p.extend([("w", w.to_string()), ("upper", upper.to_string()), ("k_max", k_max.to_string())]);
            let mut pass = true;
            let mut check = serde_json::Value::Null;
            if let Some(v) = egf_check {
                let res = power_sum_egf_check(set.chi(), set.twist(), v, k_max)?;
                pass = res.pass();
                check = json!({ "v": v, "order": res.order, "pass": pass });
                p.push(("egf_check", format!("v={v} {}", if pass { "pass" } else { "fail" })));
            }
            let listing = Listing {
                command: "power-sum".into(),
                parameters: params(&p),
                header: vec!["k".into(), "value".into()],
                rows: sums.iter().enumerate().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect(),
                data: json!({ "values": *sums, "egf_check": check }),
            };
            emit(&listing, fmt, pass)
        }
        Command::Chars { d } => {
            let chars = all_characters(d)?;
            let rows: Vec<Vec<String>> = chars
                .iter()
                .map(|c| {
                    let (f, prim) = c.conductor();
                    vec![joined(c.exponents()), c.order().to_string(), f.to_string(), prim.to_string()]
                })
                .collect();
            let data: Vec<_> = chars
                .iter()
                .map(|c| {
                    let (f, prim) = c.conductor();
                    json!({ "label": c.label(), "conductor": f, "primitive": prim })
                })
                .collect();
            let listing = Listing {
                command: "chars".into(),
                parameters: params(&[("d", d.to_string())]),
                header: ["label", "order", "conductor", "primitive"].map(String::from).to_vec(),
                rows,
                data: json!({ "characters": data }),
            };
            emit(&listing, fmt, true)
        }
        Command::Quotient { qtype, setting, w, y, order } => {
            let set = setting.setting()?;
            qtype.check(&set, &w)?;
            let series = closed_form_series(qtype, &set, &w, &y, order)?;
            let values: Vec<_> = (0..=order).map(|n| egf_coefficient(&series, n)).collect::<Result<_, _>>()?;
            let mut p = vec![("type", qtype.to_string())];
            p.extend(setting_params(&setting));
            p.extend([("w", joined(&w)), ("y", joined(&y)), ("order", order.to_string())]);
            let listing = Listing {
                command: "quotient".into(),
                parameters: params(&p),
                header: vec!["n".into(), "value".into()],
                rows: values.iter().enumerate().map(|(n, v)| vec![n.to_string(), v.to_string()]).collect(),
                data: json!({ "values": values }),
            };
            emit(&listing, fmt, true)
        }
        Command::Consistency { qtype, setting, w, y, n_max } => {
            let set = setting.setting()?;
            let rep = consistency_check(qtype, &set, &w, &y, n_max, None)?;
            let pass = rep.pass();
            emit(&rep, fmt, pass)
        }
        Command::Verify { theorem, setting, w, n_max, mode, y } => {
            let inst = TheoremInstance {
                theorem,
                d: setting.d,
                chi: setting.character()?.exponents().to_vec(),
                r: setting.r,
                j: setting.j,
                w,
                n_max,
                y: if y.is_empty() { YSpec::Grid } else { YSpec::Points(y) },
            };
            let rep = verify_instance(&inst, mode.into())?;
            let pass = rep.pass;
            emit(&rep, fmt, pass)
        }
        Command::Audit { grid_file, theorem, mode } => {
            let (mut cfg, file_fmt) = match &grid_file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Failure::Internal(format!("cannot read {}: {e}", path.display())))?;
                    parse_grid(&text)?
                }
                None => (twistsym::identities::GridConfig::standard(), None),
            };
            if !theorem.is_empty() {
                cfg.theorems = theorem;
            }
            if let Some(m) = mode {
                cfg.modes = vec![m.into()];
            }
            let rep = grid_verify(&cfg)?;
            let pass = rep.pass();
            emit(&rep, format.or(file_fmt).unwrap_or(Format::Pretty), pass)
        }
        Command::Padic { p, setting, n, levels, precision, distribution } => {
            let chi = setting.character()?;
            let twist = TwistSpec::new(setting.r, setting.j)?;
            if !distribution {
                let rep = convergence_check(n, &chi, twist, p, levels, precision)?;
                let pass = rep.pass;
                return emit(&rep, fmt, pass);
            }
            let ring = PadicRing::new(p, precision, setting.r)?;
            let set = Setting::new(chi.clone(), twist);
            let b1 = twistsym::padic::embed_algebraic(&set.bernoulli(1, 1)?[1], &ring)?;
            let chi_arg = (setting.d > 1).then_some(&chi);
            let mut rows = Vec::new();
            let mut data = Vec::new();
            let mut pass = true;
            for level in 0..levels {
                let dist = distribution_check(&ring, twist, 1, setting.d, level)?;
                let sum = riemann_sum(&[Rational::ONE], chi_arg, twist, 1, setting.d, &ring, level)?;
                let exact = sum == b1;
                pass &= dist && exact;
                rows.push(vec![level.to_string(), dist.to_string(), exact.to_string()]);
                data.push(json!({ "level": level, "distribution": dist, "constant_sum_exact": exact }));
            }
            let mut ps = vec![("p", p.to_string())];
            ps.extend(setting_params(&setting));
            ps.extend([("levels", levels.to_string()), ("precision", precision.to_string())]);
            let listing = Listing {
                command: "padic".into(),
                parameters: params(&ps),
                header: ["level", "distribution", "constant_sum_exact"].map(String::from).to_vec(),
                rows,
                data: json!({ "levels": data, "pass": pass }),
            };
            emit(&listing, fmt, pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            eprintln!("twistsym: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, cli.format.map(Format::from)) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()) {
                eprintln!("twistsym: cannot write output: {e}");
                return ExitCode::from(3);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("twistsym: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("twistsym: internal error: {m}");
            ExitCode::from(3)
        }
    }
}
