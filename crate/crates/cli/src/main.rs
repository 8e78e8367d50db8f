//! `trop-dissim`: batch front end. Exit status 0 on success, 1 when a check
//! fails, 2 on bad usage or input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trop_dissim::algebraic::{eval_psi, eval_three_term, phi_r, pullback_identity_check};
use trop_dissim::balancing::{audit_all, MapKind};
use trop_dissim::combinat::{enumerate_cubes, subsets, subsets_of, RSubset};
use trop_dissim::dissim::{d2, d_classic, d_weighted, SubsetVector};
use trop_dissim::linalg::cube_rows;
use trop_dissim::membership::{is_weighted_dissimilarity, recover_tree, FourPointMode};
use trop_dissim::sample::{random_2xn, random_torus_point, rng, DEFAULT_SEED};
use trop_dissim::tree::parse_newick;
use trop_dissim::verify::{verify_reference, Golden};
use trop_dissim::Error;

#[derive(Parser)]
#[command(
    name = "trop-dissim",
    version,
    about = "Exact weighted dissimilarity vectors of phylogenetic trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Classic,
    Weighted,
    D2,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditKind {
    Classic,
    Weighted,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Mode {
    #[default]
    SingleA,
    AllA,
}

impl From<Mode> for FourPointMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::SingleA => FourPointMode::SingleA,
            Mode::AllA => FourPointMode::AllA,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute d2, d_r or the weighted d_r of a Newick tree.
    Dissim {
        /// Newick file.
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "weighted")]
        kind: Kind,
        /// Subset size (ignored for d2).
        #[arg(short, long)]
        r: Option<usize>,
        /// Write the vector here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a vector is a weighted dissimilarity vector.
    Check {
        vector: PathBuf,
        #[arg(long, value_enum, default_value = "single-a")]
        mode: Mode,
        /// Accept decimal entries, converted exactly to rationals.
        #[arg(long)]
        exact_decimal: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the tree behind a weighted dissimilarity vector.
    Recover {
        vector: PathBuf,
        /// Newick output for the recovered tree.
        #[arg(long)]
        out_tree: PathBuf,
        #[arg(long, value_enum, default_value = "single-a")]
        mode: Mode,
        #[arg(long)]
        exact_decimal: bool,
    },
    /// Reproduce the reference matrices, ranks, kernel, cubes and identities.
    #[command(name = "paper-verify")]
    VerifyReference {
        /// Directory holding cone7_classic.txt and cone7_weighted.txt;
        /// defaults to the bundled copies.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        /// Print only the JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Balancing audit of every cone with one degree-4 vertex.
    Audit {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        r: usize,
        #[arg(long, value_enum)]
        kind: AuditKind,
        /// Exit 1 if any cone is not balanced.
        #[arg(long)]
        expect_balanced: bool,
    },
    /// Random exact checks of the cube binomials, three-term relations and
    /// the pullback identity.
    Algebra {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(short, long, default_value_t = 7)]
        n: usize,
        #[arg(short, long, default_value_t = 4)]
        r: usize,
    },
    /// List the 15 cubes.
    Cubes {
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Input(String),
    Semantic(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::NotMember => Failure::Semantic(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n"))
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn read_vector(path: &Path, exact_decimal: bool) -> Result<SubsetVector, Failure> {
    Ok(SubsetVector::from_json(&read(path)?, exact_decimal)?.0)
}

fn cmd_dissim(tree: &Path, kind: Kind, r: Option<usize>, out: Option<&Path>) -> Outcome {
    let t = parse_newick(&read(tree)?)?;
    let need_r = || {
        r.ok_or_else(|| Failure::Input("--r is required for classic and weighted vectors".into()))
    };
    let v = match kind {
        Kind::D2 => d2(&t),
        Kind::Classic => d_classic(&t, need_r()?)?,
        Kind::Weighted => d_weighted(&t, need_r()?)?,
    };
    emit(&v.to_json(), out)?;
    Ok(true)
}

fn cmd_check(vector: &Path, mode: Mode, exact_decimal: bool, out: Option<&Path>) -> Outcome {
    let w = read_vector(vector, exact_decimal)?;
    let cert = is_weighted_dissimilarity(&w, mode.into())?;
    emit(&cert.to_json(), out)?;
    Ok(cert.passed())
}

fn cmd_recover(vector: &Path, out_tree: &Path, mode: Mode, exact_decimal: bool) -> Outcome {
    let w = read_vector(vector, exact_decimal)?;
    let cert = recover_tree(&w, mode.into())?;
    if let Some(t) = &cert.witness_tree {
        emit(&t.to_newick(), Some(out_tree))?;
    }
    emit(&cert.to_json(), None)?;
    Ok(cert.passed())
}

fn cmd_verify_reference(golden_dir: Option<&Path>, as_json: bool) -> Outcome {
    let golden = match golden_dir {
        Some(dir) => Golden::from_dir(dir)?,
        None => Golden::builtin(),
    };
    let report = verify_reference(&golden)?;
    if as_json {
        emit(&pretty(&report.to_json_value()), None)?;
    } else {
        for c in &report.checks {
            println!(
                "{:<6} {}: {}",
                if c.ok { "ok" } else { "FAILED" },
                c.name,
                c.detail
            );
        }
        let failing: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| c.name)
            .collect();
        if failing.is_empty() {
            println!("all {} checks ok", report.checks.len());
        } else {
            println!("failing checks: {}", failing.join(", "));
        }
    }
    Ok(report.all_ok())
}

fn cmd_audit(n: usize, r: usize, kind: AuditKind, expect_balanced: bool) -> Outcome {
    let kind = match kind {
        AuditKind::Classic => MapKind::Classic,
        AuditKind::Weighted => MapKind::Weighted,
    };
    let reports = audit_all(n, r, kind)?;
    let unbalanced = reports.iter().filter(|rep| !rep.dependent_mod_base).count();
    let body = json!({
        "n": n,
        "r": r,
        "map_kind": kind.name(),
        "cones": reports.len(),
        "not_balanced": unbalanced,
        "reports": reports.iter().map(|rep| rep.to_json_value()).collect::<Vec<_>>(),
    });
    emit(&pretty(&body), None)?;
    Ok(!expect_balanced || unbalanced == 0)
}

fn cmd_algebra(trials: usize, seed: u64, n: usize, r: usize) -> Outcome {
    if !(4..=10).contains(&n) || r < 2 || r + 2 > n {
        return Err(Failure::Input(format!(
            "algebra needs 4 <= n <= 10 and 2 <= r <= n-2, got n={n}, r={r}"
        )));
    }
    let mut g = rng(seed);
    let zero = trop_dissim::rational::zero();
    let cubes = enumerate_cubes();
    let rows = cube_rows(n, r);
    let pads = |q: &[usize], size: usize| {
        let rest: Vec<usize> = (1..=n).filter(|v| !q.contains(v)).collect();
        subsets_of(&rest, size)
    };
    let (mut psi_total, mut psi_bad, mut rel_total, mut rel_bad, mut pull_total, mut pull_bad) =
        (0, 0, 0, 0, 0, 0);
    for _ in 0..trials {
        let (_, x2) = random_2xn(&mut g, n)?;
        let x = phi_r(&x2, r)?;
        for row in &rows {
            let six = RSubset::new(row.six.clone(), n)?;
            psi_total += 1;
            psi_bad +=
                usize::from(eval_psi(x.coords(), &cubes[row.cube], &six, &row.shift)? != zero);
        }
        for q in subsets(n, 4) {
            let quad = [q[0], q[1], q[2], q[3]];
            for a in pads(&q, r - 2) {
                rel_total += 1;
                rel_bad += usize::from(eval_three_term(x.coords(), quad, &a)? != zero);
            }
        }
        let y = random_torus_point(&mut g, n)?;
        for q in subsets(n, 4) {
            let quad = [q[0], q[1], q[2], q[3]];
            for a in pads(&q, r - 2) {
                pull_total += 1;
                pull_bad += usize::from(!pullback_identity_check(&y, quad, &a)?);
            }
        }
    }
    let ok = psi_bad == 0 && rel_bad == 0 && pull_bad == 0;
    let body = json!({
        "seed": seed,
        "trials": trials,
        "n": n,
        "r": r,
        "psi": {"evaluated": psi_total, "nonzero": psi_bad},
        "three_term": {"evaluated": rel_total, "nonzero": rel_bad},
        "pullback": {"checked": pull_total, "failed": pull_bad},
        "ok": ok,
    });
    emit(&pretty(&body), None)?;
    Ok(ok)
}

fn cmd_cubes(as_json: bool) -> Outcome {
    let cubes = enumerate_cubes();
    if as_json {
        emit(
            &serde_json::to_string_pretty(cubes).expect("cubes serialize"),
            None,
        )?;
    } else {
        let show = |ts: &[[usize; 3]; 4]| {
            ts.iter()
                .map(|t| format!("{}{}{}", t[0], t[1], t[2]))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for c in cubes {
            println!(
                "{:>2}  black {}  white {}",
                c.id,
                show(&c.black),
                show(&c.white)
            );
        }
    }
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Dissim { tree, kind, r, out } => cmd_dissim(&tree, kind, r, out.as_deref()),
        Command::Check {
            vector,
            mode,
            exact_decimal,
            out,
        } => cmd_check(&vector, mode, exact_decimal, out.as_deref()),
        Command::Recover {
            vector,
            out_tree,
            mode,
            exact_decimal,
        } => cmd_recover(&vector, &out_tree, mode, exact_decimal),
        Command::VerifyReference { golden_dir, json } => cmd_verify_reference(golden_dir.as_deref(), json),
        Command::Audit {
            n,
            r,
            kind,
            expect_balanced,
        } => cmd_audit(n, r, kind, expect_balanced),
        Command::Algebra { trials, seed, n, r } => cmd_algebra(trials, seed, n, r),
        Command::Cubes { json } => cmd_cubes(json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
