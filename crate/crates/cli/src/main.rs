use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use forge_core::colorset::ColorSet;
use forge_core::config::{parse_seed, Config};
use forge_core::constructions::*;
use forge_core::flagcore::Maniplex;
use forge_core::perm::Perm;
use forge_core::poset::{is_polytope, OracleVerdict};
use forge_core::polytopality::*;
use forge_core::premaniplex::Premaniplex;
use forge_core::symmetry::{certify_derived_orbits, symmetry_type_graph};
use forge_core::voltage::{check_derived_is_maniplex, VoltageAssignment};
use forge_core::{ForgeError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "forge", version, about = "Maniplexes, voltage graphs and polytopality checks")]
struct Cli {
    /// TOML file with caps and seed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// PRNG seed; FORGE_SEED overrides it.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest derived graph handed to the face-poset oracle.
    #[arg(long, global = true)]
    oracle_cap: Option<u64>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named object and write it as JSON.
    Build(BuildArgs),
    /// Run a verification suite or check an input.
    Verify(VerifyArgs),
    /// Write DOT renderings.
    Export(ExportArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// square | torus44:<s> | hat2:<target> | s3 | eta | xi
    target: String,
    /// Rank of the two-orbit premaniplex (xi only).
    #[arg(long, default_value_t = 4)]
    rank: usize,
    /// Semi-edge colors of 2^n_I, comma separated.
    #[arg(long = "I", value_name = "CSV", default_value = "1,2")]
    semi: String,
    #[arg(long, default_value = "xi")]
    variant: Variant,
    /// Output file; stdout when absent. For xi the voltages go to
    /// `<stem>.voltage.json` next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    #[value(alias = "paper-main")]
    Main,
    Lemmas,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long)]
    maniplex: Option<PathBuf>,
    #[arg(long)]
    premaniplex: Option<PathBuf>,
    #[arg(long)]
    voltage: Option<PathBuf>,
    /// Also run the face-poset oracle.
    #[arg(long)]
    oracle: bool,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Stg,
    Premaniplex,
}

#[derive(Args)]
struct ExportArgs {
    kind: ExportKind,
    /// Named object: a build target for stg, `xi` or `2n:<n>:<I csv>` for premaniplex.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    maniplex: Option<PathBuf>,
    #[arg(long)]
    premaniplex: Option<PathBuf>,
    #[arg(long)]
    voltage: Option<PathBuf>,
    #[arg(long = "I", value_name = "CSV", default_value = "1,2")]
    semi: String,
    #[arg(long, default_value = "xi")]
    variant: Variant,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("forge: {e}");
            ExitCode::from(if e.is_infeasible() { EXIT_INFEASIBLE } else { EXIT_INPUT })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let mut cfg = match &cli.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    if let Some(s) = &cli.seed {
        cfg.seed = parse_seed(s)?;
    }
    cfg = cfg.with_env()?;
    if let Some(c) = cli.oracle_cap {
        cfg.oracle_cap = c;
    }
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| ForgeError::Config(e.to_string()))?;
    }
    match cli.cmd {
        Command::Build(a) => cmd_build(&cfg, a),
        Command::Verify(a) => cmd_verify(&cfg, a),
        Command::Export(a) => cmd_export(&cfg, a),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn parse_semi(csv: &str) -> Result<ColorSet> {
    ColorSet::parse_csv(csv).map_err(ForgeError::InvalidArgument)
}

/// `square`, `torus44:<s>` and `hat2:<target>`, materialized.
fn named_maniplex(cfg: &Config, target: &str) -> Result<Maniplex> {
    if target == "square" {
        return Ok(square_flag_graph());
    }
    if let Some(s) = target.strip_prefix("torus44:") {
        let s: usize = s.parse().map_err(|_| ForgeError::InvalidArgument(format!("bad torus size {s:?}")))?;
        return torus_map_44(s);
    }
    if let Some(inner) = target.strip_prefix("hat2:") {
        let base = named_maniplex(cfg, inner)?;
        return Hat2Maniplex::new(base).materialize(cfg.materialization_cap);
    }
    Err(ForgeError::InvalidArgument(format!("unknown maniplex {target:?}")))
}

fn knight_base() -> Result<(Maniplex, Perm)> {
    let m = torus_map_44(8)?;
    let eta = eta_knight(&m)?;
    Ok((m, eta))
}

fn xi_instance(rank: usize, semi: ColorSet, variant: Variant) -> Result<TwoOrbitInstance> {
    match rank {
        4 => {
            let (m, eta) = knight_base()?;
            TwoOrbitInstance::build(&m, &eta, semi, variant)
        }
        r if r >= 5 => Err(ForgeError::infeasible(
            format!("rank {r} two-orbit pipeline"),
            "η and voltages on M_n with 2^(|Fac|) facets",
            "rank 4 at desk scale",
        )),
        r => Err(ForgeError::InvalidArgument(format!("rank {r} has no facet-separating η in the tower; use rank 4"))),
    }
}

fn cmd_build(cfg: &Config, a: BuildArgs) -> Result<u8> {
    let out = a.out.as_deref();
    match a.target.as_str() {
        "s3" => {
            let m3 = m3()?;
            let (s3, report) = find_s3(&m3)?;
            let aut = forge_core::symmetry::automorphisms(&m3);
            let h = Hat2Maniplex::new(m3.clone());
            let ctx = FacetContext::new(&m3)?;
            let (hat_ok, tried) = check_hat_s_non_invariant(&h, &ctx, &s3)?;
            let eta = eta_from_s(&h, &aut, &s3)?;
            let v = json!({
                "base": "hat2:square",
                "facets": s3,
                "transcript": report,
                "hat_s_non_invariant": { "holds": hat_ok, "candidates": tried },
                "eta_separates_facets": eta.separates_facets(),
            });
            emit(out, &pretty(&v)?)?;
        }
        "eta" => {
            let (m, eta) = knight_base()?;
            let sep = facet_separation(&m, &eta);
            let v = json!({
                "base": "torus44:8",
                "word": KNIGHT_WORD,
                "involutory": eta.is_involution(),
                "separation": sep,
                "images": eta,
            });
            emit(out, &pretty(&v)?)?;
        }
        "xi" => {
            let inst = xi_instance(a.rank, parse_semi(&a.semi)?, a.variant)?;
            let x = pretty(&inst.premaniplex)?;
            let xi = pretty(&inst.xi)?;
            match out {
                Some(p) => {
                    let vpath = voltage_path(p);
                    fs::write(p, x)?;
                    fs::write(&vpath, xi)?;
                    eprintln!("premaniplex → {}, voltages → {}", p.display(), vpath.display());
                }
                None => {
                    let v = json!({ "premaniplex": inst.premaniplex, "voltage": inst.xi, "checks": inst.checks });
                    emit(None, &pretty(&v)?)?;
                }
            }
        }
        t => {
            let m = named_maniplex(cfg, t)?;
            emit(out, &pretty(&m)?)?;
        }
    }
    Ok(0)
}

fn voltage_path(p: &Path) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "xi".into());
    p.with_file_name(format!("{stem}.voltage.json"))
}

fn verdict_code(ok: bool, infeasible: bool) -> u8 {
    if infeasible {
        EXIT_INFEASIBLE
    } else if ok {
        0
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_verify(cfg: &Config, a: VerifyArgs) -> Result<u8> {
    let out = a.out.as_deref();
    if let Some(suite) = a.suite {
        let (v, ok) = match suite {
            Suite::Main => main_suite(cfg)?,
            Suite::Lemmas => lemma_suite(cfg)?,
        };
        emit(out, &pretty(&v)?)?;
        eprintln!("suite {}: {}", v["suite"].as_str().unwrap_or(""), if ok { "verified" } else { "FAILED" });
        return Ok(verdict_code(ok, false));
    }
    if let Some(path) = &a.maniplex {
        let m: Maniplex = read_json(path)?;
        let validation = m.validate();
        if !validation.is_valid() {
            let v = json!({ "input": path.display().to_string(), "valid": false, "violations": validation.violations });
            emit(out, &pretty(&v)?)?;
            eprintln!("not a maniplex");
            return Ok(EXIT_NEGATIVE);
        }
        let stg = symmetry_type_graph(&m)?;
        let mut v = json!({ "input": path.display().to_string(), "valid": true, "flags": m.num_flags(), "stg_vertices": stg.num_vertices() });
        let mut code = 0;
        if a.oracle {
            let o = is_polytope(&m, cfg.oracle_cap);
            code = match &o {
                OracleVerdict::Polytope => 0,
                OracleVerdict::NotPolytope { .. } => EXIT_NEGATIVE,
                OracleVerdict::Infeasible { .. } => EXIT_INFEASIBLE,
            };
            eprintln!("oracle: {}", oracle_label(&o));
            v["oracle"] = serde_json::to_value(&o)?;
        }
        emit(out, &pretty(&v)?)?;
        return Ok(code);
    }
    match (&a.premaniplex, &a.voltage) {
        (Some(xp), Some(vp)) => {
            let x: Premaniplex = read_json(xp)?;
            let xi: VoltageAssignment = read_json(vp)?;
            xi.check_against(&x)?;
            let report = verify_polytopal(&x, &xi, cfg.enumeration_cap)?;
            let verdict = &report.verdict;
            let mut v = json!({ "verdict": verdict.label(), "report": report });
            let mut code = verdict_code(verdict.is_polytopal(), matches!(verdict, Verdict::Infeasible { .. }));
            if a.oracle {
                let cv = cross_validate(&x, &xi, cfg.enumeration_cap, cfg.oracle_cap)?;
                if cv.agree == Some(false) {
                    code = EXIT_NEGATIVE;
                }
                if let Some(n) = &cv.notice {
                    eprintln!("{n}");
                }
                v["cross_validation"] = serde_json::to_value(&cv)?;
            }
            emit(out, &pretty(&v)?)?;
            eprintln!("verdict: {}", verdict.label());
            Ok(code)
        }
        (Some(_), None) | (None, Some(_)) => Err(ForgeError::InvalidArgument("--premaniplex and --voltage go together".into())),
        (None, None) => Err(ForgeError::InvalidArgument("nothing to verify: give --suite, --maniplex or --premaniplex/--voltage".into())),
    }
}

fn oracle_label(o: &OracleVerdict) -> &'static str {
    match o {
        OracleVerdict::Polytope => "polytope",
        OracleVerdict::NotPolytope { .. } => "not a polytope",
        OracleVerdict::Infeasible { .. } => "over the oracle cap",
    }
}

fn main_suite(cfg: &Config) -> Result<(Value, bool)> {
    let (m, eta) = knight_base()?;
    let mut ok = true;
    let mut variants = Vec::new();
    for variant in [Variant::Xi, Variant::XiPrime] {
        let inst = TwoOrbitInstance::build(&m, &eta, ColorSet::from_slice(&[1, 2]), variant)?;
        let mp = check_derived_is_maniplex(&inst.premaniplex, &inst.xi)?;
        let ints = check_intersection_properties(&inst.premaniplex, &inst.xi, cfg.enumeration_cap)?;
        let cert = certify_derived_orbits(&inst.premaniplex, &inst.xi)?;
        ok &= mp.holds() && ints.holds();
        variants.push(json!({
            "variant": variant,
            "group_order": inst.xi.voltage_group().order().to_string(),
            "pipeline": inst.checks,
            "maniplex": mp,
            "intersections": ints,
            "orbits": cert,
        }));
    }
    let mut others = Vec::new();
    for semi in [vec![1], vec![2], vec![]] {
        let inst = TwoOrbitInstance::build(&m, &eta, ColorSet::from_slice(&semi), Variant::Xi)?;
        let r = check_intersection_tuples(&inst.premaniplex, &inst.xi, cfg.enumeration_cap, |k, _| k > 1)?;
        ok &= r.holds();
        others.push(json!({ "I": semi, "k_above_1_holds": r.holds(), "tuples": r.tuples.len() }));
    }
    Ok((json!({ "suite": "main", "base": "torus44:8", "holds": ok, "variants": variants, "other_I": others }), ok))
}

fn lemma_suite(cfg: &Config) -> Result<(Value, bool)> {
    let (m, eta) = knight_base()?;
    let inst = TwoOrbitInstance::build(&m, &eta, ColorSet::from_slice(&[1, 2]), Variant::Xi)?;
    let m3 = m3()?;
    let (s3, _) = find_s3(&m3)?;
    let pipe = Hat2Pipeline::new(&m3, &s3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opts = SupportLemmaOptions { enum_cap: cfg.enumeration_cap, ..SupportLemmaOptions::default() };
    let rep = verify_k1_support_lemmas(&inst, Some(&pipe), opts, &mut rng)?;
    let ok = rep.holds();
    Ok((json!({ "suite": "lemmas", "seed": cfg.seed, "holds": ok, "report": rep }), ok))
}

fn cmd_export(cfg: &Config, a: ExportArgs) -> Result<u8> {
    let dot = match a.kind {
        ExportKind::Stg => {
            if let Some(path) = &a.maniplex {
                let m: Maniplex = read_json(path)?;
                symmetry_type_graph(&m)?.to_dot("stg")
            } else if let (Some(xp), Some(vp)) = (&a.premaniplex, &a.voltage) {
                let x: Premaniplex = read_json(xp)?;
                let xi: VoltageAssignment = read_json(vp)?;
                derived_stg(&x, &xi)?.to_dot("stg")
            } else {
                match a.target.as_deref() {
                    Some("xi") => {
                        let inst = xi_instance(4, parse_semi(&a.semi)?, a.variant)?;
                        derived_stg(&inst.premaniplex, &inst.xi)?.to_dot("stg")
                    }
                    Some(t) => symmetry_type_graph(&named_maniplex(cfg, t)?)?.to_dot("stg"),
                    None => return Err(ForgeError::InvalidArgument("export stg needs --target, --maniplex or --premaniplex/--voltage".into())),
                }
            }
        }
        ExportKind::Premaniplex => {
            if let Some(path) = &a.premaniplex {
                read_json::<Premaniplex>(path)?.to_dot("x")
            } else {
                match a.target.as_deref() {
                    Some("xi") => xi_instance(4, parse_semi(&a.semi)?, a.variant)?.premaniplex.to_dot("x"),
                    Some(t) if t.starts_with("2n:") => {
                        let mut parts = t[3..].splitn(2, ':');
                        let n: usize = parts
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| ForgeError::InvalidArgument(format!("bad premaniplex name {t:?}")))?;
                        let semi = parse_semi(parts.next().unwrap_or(""))?;
                        Premaniplex::build_2nI(n, semi)?.to_dot("x")
                    }
                    _ => return Err(ForgeError::InvalidArgument("export premaniplex needs --premaniplex or --target xi|2n:<n>:<I>".into())),
                }
            }
        }
    };
    emit(a.out.as_deref(), &dot)?;
    Ok(0)
}

/// Symmetry type graph of the derived maniplex: X modulo the exact fiber
/// orbit partition.
fn derived_stg(x: &Premaniplex, xi: &VoltageAssignment) -> Result<Premaniplex> {
    let cert = certify_derived_orbits(x, xi)?;
    x.quotient(&cert.orbit_of_vertex)
}
