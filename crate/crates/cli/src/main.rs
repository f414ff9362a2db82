use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gl2_gauss::appendix::{p_sum_closed, PSumParams};
use gl2_gauss::characters::{enumerate_specs, AddChar, CharSpec, Character, Family, MultChar};
use gl2_gauss::cyclotomic::{CycElem, Cyclo};
use gl2_gauss::gauss::{g_brute, g_closed, tau_closed, tau_oracle_full, tau_oracle_subgroup};
use gl2_gauss::group::{group_order, OmegaIndex, DEFAULT_ENUM_CAP};
use gl2_gauss::residue::RingParams;
use gl2_gauss::verify::{self, Report};

#[derive(Parser)]
#[command(name = "gl2gauss", version, about = "Exact Gauss sums on GL2(Z/p^l)")]
struct Cli {
    /// Largest set any brute-force path may enumerate
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_CAP)]
    max_enum: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    X1,
    X2,
    X3,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::X1 => Family::X1,
            FamilyArg::X2 => Family::X2,
            FamilyArg::X3 => Family::X3,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Path {
    Closed,
    Subgroup,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Gauss,
    Tau,
    Appendix,
    Counts,
    Irreducibility,
}

#[derive(clap::Args, Clone, Debug)]
struct SpecArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    alpha: u64,
    /// First family: the orbit parameter u
    #[arg(long)]
    u: Option<u64>,
    /// Second family: non-residue eps
    #[arg(long)]
    eps: Option<u64>,
    /// Third family: beta
    #[arg(long)]
    beta: Option<u64>,
    /// x1: i; x2: k1,k2,k3; x3: i1,i2
    #[arg(long, default_value = "0")]
    i: String,
    /// x1: j; x3: k1,k2,k3
    #[arg(long, default_value = "0")]
    j: String,
}

#[derive(Subcommand)]
enum Command {
    /// tau_l(chi, e) for one character
    Tau {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value_t = 1)]
        r: u64,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "closed")]
        path: Path,
    },
    /// g_l(mu, e) for the character with exponent c on the canonical generator
    Glsum {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        c: u64,
        #[arg(long, default_value_t = 1)]
        r: u64,
        /// Sum over all units instead of using the closed form
        #[arg(long)]
        brute: bool,
    },
    /// The auxiliary sum P and its factor P1
    Psum {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        beta: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
    /// Sizes of the three families
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: u32,
    },
    /// Run an oracle sweep; exit status 1 if any case fails
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        l: u32,
        /// Specs per family for tau/irreducibility sweeps (all when omitted and l = 2)
        #[arg(long)]
        sample: Option<usize>,
        /// Largest level i for the appendix sweep
        #[arg(long, default_value_t = 2)]
        max_i: u32,
        /// Print only failing cases
        #[arg(long)]
        quiet: bool,
    },
    /// Time the closed form against the oracles; CSV on stdout
    Bench {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: u32,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, default_value_t = 1)]
        r: u64,
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
}

fn parse_list(s: &str, len: usize, what: &str) -> Result<Vec<u64>> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .with_context(|| format!("bad --{what} '{s}'"))?;
    if v.len() != len {
        bail!("--{what} needs {len} comma-separated values, got '{s}'");
    }
    Ok(v)
}

fn omega(s: &str, what: &str) -> Result<OmegaIndex> {
    let v = parse_list(s, 3, what)?;
    Ok(OmegaIndex::new(v[0], v[1], v[2]))
}

fn build_spec(a: &SpecArgs) -> Result<CharSpec> {
    Ok(match a.family {
        FamilyArg::X1 => CharSpec::X1 {
            alpha: a.alpha,
            u: a.u.unwrap_or(1),
            i: parse_list(&a.i, 1, "i")?[0],
            j: parse_list(&a.j, 1, "j")?[0],
        },
        FamilyArg::X2 => CharSpec::X2 {
            alpha: a.alpha,
            eps: a.eps.context("x2 needs --eps")?,
            i: omega(&a.i, "i")?,
        },
        FamilyArg::X3 => {
            let i = parse_list(&a.i, 2, "i")?;
            CharSpec::X3 {
                alpha: a.alpha,
                beta: a.beta.unwrap_or(0),
                i: (i[0], i[1]),
                j: omega(&a.j, "j")?,
            }
        }
    })
}

/// `x` rounded to 12 significant digits.
fn sig12(x: f64) -> Value {
    if x == 0.0 || !x.is_finite() {
        return json!(0.0);
    }
    let digits = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    let y: f64 = format!("{x:.digits$}").parse().unwrap_or(x);
    json!(if y == 0.0 { 0.0 } else { y })
}

fn value_json(v: &CycElem) -> Value {
    let z = v.embed();
    // drop float noise left over from cancelling roots
    let tiny = 1e-9 * z.norm().max(1.0);
    let clean = |x: f64| if x.abs() < tiny { 0.0 } else { x };
    let z = (clean(z.re), clean(z.im));
    json!({
        "exact": v,
        "complex": { "re": sig12(z.0), "im": sig12(z.1) },
    })
}

fn spec_json(spec: &CharSpec) -> Value {
    match *spec {
        CharSpec::X1 { alpha, u, i, j } => json!({ "alpha": alpha, "u": u, "i": i, "j": j }),
        CharSpec::X2 { alpha, eps, i } => {
            json!({ "alpha": alpha, "eps": eps, "i": [i.k1, i.k2, i.k3] })
        }
        CharSpec::X3 { alpha, beta, i, j } => {
            json!({ "alpha": alpha, "beta": beta, "i": [i.0, i.1], "j": [j.k1, j.k2, j.k3] })
        }
    }
}

fn print(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn tau_by(path: Path, ch: &Character, e: &AddChar, cap: u64) -> gl2_gauss::Result<CycElem> {
    match path {
        Path::Closed => tau_closed(ch, e),
        Path::Subgroup => tau_oracle_subgroup(ch, e, cap),
        Path::Full => tau_oracle_full(ch, e, cap),
    }
}

fn run_verify(
    suite: Suite,
    p: u64,
    l: u32,
    sample: Option<usize>,
    max_i: u32,
    cap: u64,
) -> Result<Report> {
    if suite == Suite::Appendix {
        return Ok(verify::appendix_suite(p, max_i, cap)?);
    }
    let ring = RingParams::new(p, l)?;
    let families = [Family::X1, Family::X2, Family::X3];
    let per_family = sample.or(if l == 2 { None } else { Some(6) });
    let specs: Vec<CharSpec> = families
        .iter()
        .flat_map(|f| verify::sample_specs(*f, &ring, per_family))
        .collect();
    let report = match suite {
        Suite::Gauss => verify::gauss_suite(&ring, cap)?,
        Suite::Counts => verify::counts_suite(&ring, cap)?,
        Suite::Tau => {
            let mut report = verify::tau_suite(&ring, &specs, &verify::r_values(&ring), cap)?;
            if l % 2 == 1 {
                let ctx = Cyclo::for_ring(&ring);
                for spec in specs.iter().filter(|s| s.family() == Family::X2) {
                    report.extend(verify::virtual_suite(
                        &Character::new(*spec, &ring, &ctx, cap)?,
                        cap,
                    )?);
                }
            }
            report
        }
        Suite::Irreducibility => {
            if group_order(&ring) <= cap.min(10_000) {
                let one_each: Vec<CharSpec> = families
                    .iter()
                    .map(|f| {
                        let s = enumerate_specs(*f, &ring);
                        s[s.len() / 2]
                    })
                    .collect();
                verify::full_suite(&ring, &one_each, &[1], cap)?
            } else {
                verify::irreducibility_suite(&ring, &specs, cap)?
            }
        }
        Suite::Appendix => unreachable!(),
    };
    Ok(report)
}

fn run(cli: Cli) -> Result<bool> {
    let cap = cli.max_enum;
    match cli.command {
        Command::Tau {
            p,
            l,
            r,
            spec,
            path,
        } => {
            let ring = RingParams::new(p, l)?;
            let ctx = Cyclo::for_ring(&ring);
            let spec = build_spec(&spec)?;
            let ch = Character::new(spec, &ring, &ctx, cap)?;
            let e = AddChar::new(&ring, r)?;
            let tau = tau_by(path, &ch, &e, cap)?;
            print(&json!({
                "p": p,
                "l": l,
                "r": r,
                "family": spec.family().name(),
                "params": spec_json(&spec),
                "degree": ch.degree(),
                "tau": value_json(&tau),
            }))?;
        }
        Command::Glsum { p, l, c, r, brute } => {
            let ring = RingParams::level(p, l)?;
            if c >= ring.unit_order() {
                bail!("--c must be below {}", ring.unit_order());
            }
            let ctx = Cyclo::for_ring(&ring);
            let mu = MultChar::new(&ring, c);
            let e = AddChar::new(&ring, r)?;
            let g = if brute {
                g_brute(&mu, &e, &ctx, cap)?
            } else {
                g_closed(&mu, &e, &ctx)?
            };
            print(&json!({
                "p": p,
                "l": l,
                "r": r,
                "c": c,
                "primitive": mu.is_primitive(),
                "g": value_json(&g),
            }))?;
        }
        Command::Psum {
            p,
            i,
            j,
            k,
            beta,
            b,
            r,
        } => {
            let params = PSumParams::new(p, i, j, k, beta, b, r)?;
            let v = p_sum_closed(&params, &params.ctx())?;
            print(&json!({
                "params": params,
                "case": v.case.to_string(),
                "closed_form": v.closed_form,
                "P": value_json(&v.value),
                "P1": value_json(&v.p1),
            }))?;
        }
        Command::Count { p, l } => {
            let ring = RingParams::new(p, l)?;
            let counts = verify::family_counts(&ring, cap)?;
            let mut out = serde_json::Map::new();
            out.insert("p".into(), json!(p));
            out.insert("l".into(), json!(l));
            for c in &counts {
                out.insert(c.family.into(), json!(c.formula));
            }
            out.insert("enumerated".into(), serde_json::to_value(&counts)?);
            print(&Value::Object(out))?;
        }
        Command::Verify {
            suite,
            p,
            l,
            sample,
            max_i,
            quiet,
        } => {
            let report = run_verify(suite, p, l, sample, max_i, cap)?;
            for c in &report.cases {
                if c.passed && quiet {
                    continue;
                }
                let tag = if c.passed { "PASS" } else { "FAIL" };
                if c.detail.is_empty() {
                    println!("{tag} {}", c.name);
                } else {
                    println!("{tag} {} ({})", c.name, c.detail);
                }
            }
            println!("{}", report.summary());
            return Ok(report.passed());
        }
        Command::Bench {
            p,
            l,
            family,
            r,
            reps,
        } => {
            let ring = RingParams::new(p, l)?;
            let ctx = Cyclo::for_ring(&ring);
            let e = AddChar::new(&ring, r)?;
            let families: Vec<Family> = match family {
                Some(f) => vec![f.into()],
                None => vec![Family::X1, Family::X2, Family::X3],
            };
            println!("path,p,l,family,nanoseconds");
            for fam in families {
                let specs = enumerate_specs(fam, &ring);
                let ch = Character::new(specs[specs.len() / 2], &ring, &ctx, cap)?;
                for path in [Path::Closed, Path::Subgroup, Path::Full] {
                    if matches!(path, Path::Full) && group_order(&ring) > cap {
                        continue;
                    }
                    let mut best = u128::MAX;
                    for _ in 0..reps.max(1) {
                        let t = Instant::now();
                        tau_by(path, &ch, &e, cap)?;
                        best = best.min(t.elapsed().as_nanos());
                    }
                    let name = format!("{path:?}").to_lowercase();
                    println!("{name},{p},{l},{},{best}", fam.name());
                }
            }
        }
    }
    Ok(true)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<gl2_gauss::Error>() {
        Some(gl2_gauss::Error::TooLarge { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
