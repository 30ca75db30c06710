mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bkl_core::rees::Mode;
use bkl_core::scalar::{Scalar, Q};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::*;
use report::{InputDigest, Outcome, RunReport};

#[derive(Parser)]
#[command(name = "bkl", version, about = "Frame-data gLa: decompositions, MC residuals, constraint solving, bounces and spectral sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Jet order.
    #[arg(long, global = true, default_value_t = 6)]
    order: usize,
    /// Tolerance for floating-point checks (rational checks are exact).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = FieldArg::Rational)]
    field: FieldArg,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the command's primary artifact (JSON or CSV) here instead of
    /// embedding it in the report.
    #[arg(long, global = true)]
    emit: Option<PathBuf>,
    /// Seed for randomized samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Rational,
    Float,
    /// The prime field 𝔽₇ (spectral sequences only).
    F7,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Free,
    Bounce,
    #[value(name = "E", alias = "e")]
    E,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Free => Mode::Free,
            ModeArg::Bounce => Mode::Bounce,
            ModeArg::E => Mode::E,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Split an Element into its graded components.
    Decompose { element: PathBuf },
    /// Bracket of two Elements.
    Bracket { x: PathBuf, y: PathBuf },
    /// `[x, x]` of the element assembled from GaugeParams.
    McResidual {
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Free)]
        mode: ModeArg,
    },
    /// Solve the constraint equations from GermData; emits ConstraintData.
    SolveConstraints { germ: PathBuf },
    /// Bounce pipeline on GermData or NormalFormData.
    VerifyBounce {
        input: PathBuf,
        /// Number of random times in [−3, 3] (floating field only).
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Homogeneous Kasner u-orbit, as CSV.
    Orbit {
        #[arg(long)]
        u0: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Factorization and MC-preservation checks; random rational data if no input.
    VerifyAuto { input: Option<PathBuf> },
    /// Pages of the spectral sequence of a filtered complex.
    Specseq { complex: PathBuf },
}

struct Inputs(Vec<InputDigest>);

impl Inputs {
    fn read(&mut self, p: &PathBuf) -> Result<String, String> {
        let bytes = std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?;
        self.0.push(InputDigest::of(&p.display().to_string(), &bytes));
        String::from_utf8(bytes).map_err(|e| format!("{}: {e}", p.display()))
    }
}

fn float_only_for_jets(f: FieldArg) -> Result<(), String> {
    if f == FieldArg::F7 {
        Err("--field f7 only applies to specseq".into())
    } else {
        Ok(())
    }
}

fn run<S: Scalar>(cmd: &Command, c: &Common, inputs: &mut Inputs) -> Result<Outcome, String> {
    match cmd {
        Command::Decompose { element } => decompose::<S>(&parse(&inputs.read(element)?, "Element")?, c.tol),
        Command::Bracket { x, y } => {
            let x = parse(&inputs.read(x)?, "Element")?;
            let y = parse(&inputs.read(y)?, "Element")?;
            bracket::<S>(&x, &y, c.tol)
        }
        Command::McResidual { params, mode } => mc_residual_cmd::<S>(&parse(&inputs.read(params)?, "GaugeParams")?, (*mode).into(), c.tol),
        Command::SolveConstraints { germ } => {
            let mut g: bkl_core::constraints::GermData<S> = parse(&inputs.read(germ)?, "GermData")?;
            g.order = c.order;
            solve_constraints(&g, c.tol)
        }
        Command::VerifyBounce { input, samples } => {
            let i: BounceInput<S> = parse(&inputs.read(input)?, "GermData or NormalFormData")?;
            verify_bounce(i, Some(c.order), c.tol, *samples, c.seed)
        }
        Command::Orbit { u0, steps } => {
            let u = S::parse(u0).ok_or_else(|| format!("bad {} value {u0:?}", S::NAME))?;
            orbit(u, *steps, c.tol)
        }
        Command::VerifyAuto { input } => match input {
            Some(p) => verify_auto::<S>(&parse(&inputs.read(p)?, "verify-auto input")?, c.tol),
            None if S::EXACT => verify_auto(&random_auto(c.order, c.seed)?, c.tol),
            None => {
                let a = random_auto(c.order, c.seed)?;
                let f = |j: &bkl_core::jet::Jet<Q>| j.to_f64();
                let converted = AutoInput {
                    data: a.data.map_jets(f),
                    a: f(&a.a),
                    log_b: f(&a.log_b),
                    morphism: a.morphism.map(|m| MorphismInput { a: f(&m.a), b: f(&m.b), c: f(&m.c) }),
                };
                verify_auto(&converted, c.tol)
            }
        },
        Command::Specseq { .. } => unreachable!(),
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Decompose { .. } => "decompose",
        Command::Bracket { .. } => "bracket",
        Command::McResidual { .. } => "mc-residual",
        Command::SolveConstraints { .. } => "solve-constraints",
        Command::VerifyBounce { .. } => "verify-bounce",
        Command::Orbit { .. } => "orbit",
        Command::VerifyAuto { .. } => "verify-auto",
        Command::Specseq { .. } => "specseq",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let start = Instant::now();
    let mut inputs = Inputs(Vec::new());
    let result = match (&cli.command, c.field) {
        (Command::Specseq { complex }, f) => inputs.read(complex).and_then(|text| match f {
            FieldArg::Rational => specseq_cmd::<Q>(&text, c.seed),
            FieldArg::F7 => specseq_cmd::<specseq::F7>(&text, c.seed),
            FieldArg::Float => Err("spectral sequences need an exact field: --field rational or f7".into()),
        }),
        (cmd, f) => float_only_for_jets(f).and_then(|_| match f {
            FieldArg::Float => run::<f64>(cmd, c, &mut inputs),
            _ => run::<Q>(cmd, c, &mut inputs),
        }),
    };

    // The artifact goes to --emit when given; CSV outputs are written raw.
    let result = match (result, &c.emit) {
        (Ok(mut o), Some(path)) => {
            let text = match o.output.get("csv").and_then(|v| v.as_str()) {
                Some(csv) => csv.to_string(),
                None => serde_json::to_string_pretty(&o.output).expect("serializable") + "\n",
            };
            match std::fs::write(path, text) {
                Ok(()) => {
                    o.output = json!({"emitted": path.display().to_string()});
                    Ok(o)
                }
                Err(e) => Err(format!("{}: {e}", path.display())),
            }
        }
        (r, _) => r,
    };

    let flags = json!({
        "order": c.order,
        "tol": c.tol,
        "field": match c.field { FieldArg::Rational => "rational", FieldArg::Float => "float", FieldArg::F7 => "f7" },
        "seed": c.seed,
    });
    let report = RunReport::finish(name(&cli.command), flags, inputs.0, result, start);
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    match &c.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("{}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
        ExitCode::from(2)
    } else if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
