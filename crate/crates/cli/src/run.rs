use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use mnae::anneal::{gap_scan_with_cap, uniform_grid};
use mnae::ops::{
    build_a_uniform_x, build_h0_transverse, build_hent, build_hent_general, build_hp, build_ising,
};
use mnae::sat::{enumerate_satisfying_with_cap, generate_with_cap, satisfying_indices, GeneratorParams};
use mnae::spectra::{
    self, entropy_profile, entropy_profile_rebased, full_spectrum_with_cap, verify_frustration_free,
    CheckStatus, Cut, EntropyProfile,
};
use mnae::{ClauseOperators, Error, Instance, OperatorMatrix, PairOperators};
use serde::Serialize;
use serde_json::json;

use crate::args::*;

pub enum Failure {
    Input(String),
    Cap(String),
    Strict(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Cap(_) => 2,
            Failure::Strict(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Cap(m) | Failure::Strict(m) => f.write_str(m),
        }
    }
}

fn is_cap(e: &Error) -> bool {
    match e {
        Error::ExhaustiveCapExceeded { .. } | Error::DimensionCapExceeded { .. } => true,
        Error::AtSchedulePoint { source, .. } => is_cap(source),
        _ => false,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_cap(&e) {
            Failure::Cap(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

pub fn run(cmd: Command) -> Res<()> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Entropy(a) => entropy(a),
        Command::Gapscan(a) => gapscan(a),
    }
}

/// `out.ext` -> `out.<suffix>`
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

fn open_out(path: Option<&Path>) -> Res<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Res<()> {
    let body = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => io::stderr().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn gen(a: GenArgs) -> Res<()> {
    let params = GeneratorParams {
        n_qubits: a.n,
        n_clauses: a.m,
        target_solutions: a.solutions,
        seed: a.seed,
        max_tries: a.max_tries,
    };
    let g = generate_with_cap(&params, a.caps.exhaustive_cap)?;
    let solutions = enumerate_satisfying_with_cap(&g.instance, a.caps.exhaustive_cap)?;
    g.instance.write(&a.out)?;
    let sidecar = json!({
        "n_qubits": a.n,
        "n_clauses": a.m,
        "target_solutions": a.solutions,
        "seed": a.seed,
        "attempts": g.attempts,
        "solutions": solutions,
    });
    write_json(Some(&sibling(&a.out, "solutions.json")), &sidecar)
}

fn load_instance(src: &Source, cap: usize) -> Res<Option<Instance>> {
    if let Some(path) = &src.instance {
        return Ok(Some(Instance::read(path)?));
    }
    let (Some(n), Some(m)) = (src.n, src.m) else { return Ok(None) };
    let seed = src.seed.ok_or_else(|| Failure::Input("--seed is required with --m".into()))?;
    let params = GeneratorParams {
        n_qubits: n,
        n_clauses: m,
        target_solutions: src.solutions.unwrap_or(2),
        seed,
        max_tries: src.max_tries.unwrap_or(10_000),
    };
    Ok(Some(generate_with_cap(&params, cap)?.instance))
}

fn require<T>(inst: Option<T>) -> Res<T> {
    inst.ok_or_else(|| Failure::Input("an instance is required: pass --instance or --n/--m/--seed".into()))
}

fn solve(a: SolveArgs) -> Res<()> {
    let inst = require(load_instance(&a.source, a.caps.exhaustive_cap)?)?;
    let solutions = enumerate_satisfying_with_cap(&inst, a.caps.exhaustive_cap)?;
    let body = json!({
        "n_qubits": inst.n_qubits(),
        "n_clauses": inst.n_clauses(),
        "count": solutions.len(),
        "solutions": solutions,
    });
    let mut w = open_out(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &body)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

struct Built {
    op: OperatorMatrix,
    inst: Option<Instance>,
    n: usize,
}

fn check_dim(n: usize, cap: usize) -> Res<()> {
    match 1usize.checked_shl(n as u32).filter(|_| n < usize::BITS as usize) {
        Some(dim) if dim <= cap => Ok(()),
        Some(dim) => Err(Error::DimensionCapExceeded { dim, cap }.into()),
        None => Err(Failure::Cap(format!("{n} qubits overflow the state dimension"))),
    }
}

fn build(h: &HamArgs) -> Res<Built> {
    let inst = load_instance(&h.source, h.caps.exhaustive_cap)?;
    let n = match (&inst, h.source.n) {
        (Some(i), _) => i.n_qubits(),
        (None, Some(n)) => n,
        (None, None) => {
            return Err(Failure::Input("pass --instance, or --n (with --m/--seed to generate)".into()))
        }
    };
    if n == 0 {
        return Err(Error::NoQubits.into());
    }
    check_dim(n, h.dim_cap)?;
    let a_op = || -> Res<OperatorMatrix> {
        Ok(match h.a {
            AChoice::UniformX => build_a_uniform_x(n),
            AChoice::Identity => OperatorMatrix::identity(n),
            AChoice::FromFile => {
                let path =
                    h.a_file.as_ref().ok_or_else(|| Failure::Input("--a from-file needs --a-file".into()))?;
                let op = OperatorMatrix::read_coo(path)?;
                if op.dim() != 1 << n {
                    return Err(Error::DimensionMismatch { expected: 1 << n, found: op.dim() }.into());
                }
                op
            }
        })
    };
    let op = match h.ham {
        Ham::Ising => build_ising(n),
        Ham::H0 => build_h0_transverse(n),
        Ham::Hp => build_hp(require(inst.as_ref())?),
        Ham::Hent => {
            let i = require(inst.as_ref())?;
            build_hent(i, &ClauseOperators::uniform(i, a_op()?))?
        }
        Ham::HentGeneral => {
            let i = require(inst.as_ref())?;
            build_hent_general(i, &PairOperators::uniform(i, a_op()?))?
        }
    };
    Ok(Built { op, inst, n })
}

impl Ham {
    fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default()
    }
}

fn spectrum(a: SpectrumArgs) -> Res<()> {
    let b = build(&a.ham)?;
    if let Some(p) = &a.export_op {
        b.op.write_coo(p)?;
    }
    let ev = spectra::eigenvalues(&b.op, a.ham.dim_cap)?;
    let mut w = csv::Writer::from_writer(open_out(a.out.as_deref())?);
    w.write_record(["index", "eigenvalue"])?;
    for (k, x) in ev.iter().enumerate() {
        w.write_record([k.to_string(), spectra::fmt12(*x)])?;
    }
    w.flush()?;
    Ok(())
}

fn report_path(report: &Option<PathBuf>, out: &Option<PathBuf>, suffix: &str) -> Option<PathBuf> {
    report.clone().or_else(|| out.as_deref().map(|o| sibling(o, suffix)))
}

fn entropy(a: EntropyArgs) -> Res<()> {
    let b = build(&a.ham)?;
    let cut = match &a.keep {
        Some(keep) => Cut::new(b.n, keep.iter().copied())?,
        None => Cut::half(b.n)?,
    };
    let spec = full_spectrum_with_cap(&b.op, a.ham.dim_cap)?;
    let checked = matches!(a.ham.ham, Ham::Hp | Ham::Hent | Ham::HentGeneral);
    let (profile, ground, frustration) = match (&b.inst, checked) {
        (Some(inst), true) => {
            satisfying_indices(inst, a.ham.caps.exhaustive_cap)?;
            let (profile, ground) = entropy_profile_rebased(&spec, inst, &cut, a.tol)?;
            let ff = verify_frustration_free(inst, &b.op, a.tol)?;
            (profile, Some(ground), Some(ff))
        }
        _ => (entropy_profile(&spec, &cut)?, None, None),
    };
    let ff_ok = frustration.as_ref().is_none_or(|f| f.status != CheckStatus::Fail);
    let ground_ok = ground.as_ref().is_none_or(|g| g.pass || g.satisfying_count == 0);
    let pass = ff_ok && ground_ok;

    let rows = match a.window {
        Window::All => profile.records.clone(),
        Window::FirstQuarter => profile.first_quarter().to_vec(),
    };
    let degenerate_rows = rows.iter().filter(|r| r.degenerate).count();
    let shown = EntropyProfile { cut: cut.clone(), records: rows, rebased: profile.rebased };
    let mut w = open_out(a.out.as_deref())?;
    shown.write_csv(&mut w)?;
    w.flush()?;
    drop(w);

    let report = json!({
        "hamiltonian": a.ham.ham.name(),
        "n_qubits": b.n,
        "keep": cut.keep(),
        "rows": shown.records.len(),
        "degenerate_rows": degenerate_rows,
        "rebased": profile.rebased,
        "ground_space": ground,
        "frustration_free": frustration,
        "pass": pass,
    });
    write_json(report_path(&a.report, &a.out, "report.json").as_deref(), &report)?;
    if a.strict && !pass {
        return Err(Failure::Strict("verification report failed".into()));
    }
    Ok(())
}

fn gapscan(a: GapscanArgs) -> Res<()> {
    if a.ham.ham == Ham::H0 {
        return Err(Failure::Input("--ham h0 is the driver; choose a problem Hamiltonian".into()));
    }
    let b = build(&a.ham)?;
    let scan = gap_scan_with_cap(&build_h0_transverse(b.n), &b.op, &uniform_grid(a.grid), a.ham.dim_cap)?;
    let mut w = open_out(a.out.as_deref())?;
    scan.write_csv(&mut w)?;
    w.flush()?;
    drop(w);
    let summary = json!({
        "hamiltonian": a.ham.ham.name(),
        "n_qubits": b.n,
        "summary": scan.summary(),
    });
    write_json(report_path(&a.report, &a.out, "summary.json").as_deref(), &summary)
}
