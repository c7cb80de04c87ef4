//! Verb implementations behind the `tymc` binary.
//!
//! Every command returns an [`Outcome`] holding its exit status and the text
//! destined for stdout and stderr, so callers other than the binary can run
//! them in-process.
//!
//! Exit status: 0 success, 1 diagnostics or bad arguments, 2 runtime error or
//! `error(...)` return, 3 C++ build failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::argsfile::{parse_args, validate, write_args};
use crate::array::NumArray;
use crate::codegen::{emit_module_with, EmitOptions, EmitTarget, LoweredModule};
use crate::diag::{render_all, DiagCode, Diagnostic};
use crate::format::format_value;
use crate::interp::{self, Exit, Value};
use crate::lexer::tokenize;
use crate::parser::parse;
use crate::sema::analyze;
use crate::typed::TypedProgram;

/// The runtime header included by standalone builds.
pub const RUNTIME_HEADER: &str = include_str!("../runtime/tym_runtime.hpp");
pub const RUNTIME_HEADER_NAME: &str = "tym_runtime.hpp";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_BUILD: i32 = 3;

/// Flags passed to the C++ compiler for standalone builds.
pub const CXX_FLAGS: &[&str] = &["-O2", "-std=c++17"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: stderr.into() }
    }
}

/// Lexes, parses and analyzes `source`. On success the warnings are
/// returned alongside the program.
pub fn frontend(source: &str) -> Result<TypedProgram, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|e| vec![Diagnostic::from(&e)])?;
    let program = parse(&tokens).map_err(|e| vec![Diagnostic::from(&e)])?;
    analyze(&program)
}

/// Runs the front end and codegen on source text.
pub fn compile_source(source: &str, opts: &EmitOptions) -> Result<(LoweredModule, Vec<Diagnostic>), Vec<Diagnostic>> {
    let tp = frontend(source)?;
    let module = emit_module_with(&tp, opts);
    Ok((module, tp.warnings))
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

fn read_source(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_DIAGNOSTICS, format!("{}: cannot read: {e}\n", label(path))))
}

/// Loads and analyzes a source file, rendering diagnostics into the outcome.
fn load(path: &Path) -> Result<(TypedProgram, String), Outcome> {
    let source = read_source(path)?;
    let file = label(path);
    match frontend(&source) {
        Ok(tp) => {
            let mut warnings = tp.warnings.clone();
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                if stem != tp.name {
                    warnings.push(Diagnostic::warning(
                        DiagCode::NameMismatch,
                        tp.header_line,
                        1,
                        format!("function `{}` is defined in a file named `{stem}`", tp.name),
                    ));
                }
            }
            Ok((tp, render_all(&warnings, &file)))
        }
        Err(diags) => Err(Outcome::fail(EXIT_DIAGNOSTICS, render_all(&diags, &file))),
    }
}

fn load_args(tp: &TypedProgram, args: Option<&Path>) -> Result<Vec<Value>, Outcome> {
    let values = match args {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Outcome::fail(EXIT_DIAGNOSTICS, format!("{}: cannot read: {e}\n", label(p))))?;
            parse_args(&text).map_err(|e| Outcome::fail(EXIT_DIAGNOSTICS, format!("{}: {e}\n", label(p))))?
        }
        None => Vec::new(),
    };
    validate(&tp.name, &tp.param_types(), &values).map_err(|e| Outcome::fail(EXIT_DIAGNOSTICS, format!("{e}\n")))?;
    Ok(values)
}

/// `compile`: writes `<function>.cpp` next to the input and prints its path.
pub fn cmd_compile(input: &Path, opts: &EmitOptions) -> Outcome {
    let (tp, warnings) = match load(input) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let module = emit_module_with(&tp, opts);
    let dir = input.parent().unwrap_or(Path::new(""));
    let out = dir.join(format!("{}.cpp", module.function_name));
    if let Err(e) = fs::write(&out, &module.source_text) {
        return Outcome::fail(EXIT_DIAGNOSTICS, format!("{warnings}{}: cannot write: {e}\n", label(&out)));
    }
    Outcome { code: EXIT_OK, stdout: format!("{}\n", label(&out)), stderr: warnings }
}

/// `check`: front end only.
pub fn cmd_check(input: &Path) -> Outcome {
    match load(input) {
        Ok((_, warnings)) => Outcome { code: EXIT_OK, stdout: String::new(), stderr: warnings },
        Err(o) => o,
    }
}

/// `interp`: runs the program in the reference interpreter.
pub fn cmd_interp(input: &Path, args: Option<&Path>) -> Outcome {
    let (tp, warnings) = match load(input) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let values = match load_args(&tp, args) {
        Ok(v) => v,
        Err(mut o) => {
            o.stderr.insert_str(0, &warnings);
            return o;
        }
    };
    let mut out = interpret(&tp, &values);
    out.stderr.insert_str(0, &warnings);
    out
}

/// Runs an analyzed program and renders the result like the standalone
/// harness does.
pub fn interpret(tp: &TypedProgram, args: &[Value]) -> Outcome {
    match interp::run(tp, args) {
        Ok(res) => {
            let mut stderr = String::new();
            for d in &res.diagnostics {
                stderr.push_str(d);
                stderr.push('\n');
            }
            let stdout = res.return_values.iter().map(format_value).collect();
            let code = if res.exit == Exit::Normal { EXIT_OK } else { EXIT_RUNTIME };
            Outcome { code, stdout, stderr }
        }
        Err(e) => Outcome::fail(EXIT_RUNTIME, format!("error: {e}\n")),
    }
}

#[derive(Debug)]
pub struct BuildFailure(pub String);

/// Writes a standalone module and the runtime header into `dir` and
/// compiles them. Returns the path of the executable.
pub fn build_standalone(module: &LoweredModule, cxx: &str, dir: &Path) -> Result<PathBuf, BuildFailure> {
    assert_eq!(module.target, EmitTarget::Standalone, "only standalone modules can be built");
    let io = |e: std::io::Error| BuildFailure(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(RUNTIME_HEADER_NAME), RUNTIME_HEADER).map_err(io)?;
    let src = dir.join(format!("{}.cpp", module.function_name));
    fs::write(&src, &module.source_text).map_err(io)?;
    let exe = dir.join(&module.function_name);
    let output = Command::new(cxx)
        .args(CXX_FLAGS)
        .arg("-I")
        .arg(dir)
        .arg("-o")
        .arg(&exe)
        .arg(&src)
        .output()
        .map_err(|e| BuildFailure(format!("cannot run `{cxx}`: {e}")))?;
    if !output.status.success() {
        return Err(BuildFailure(format!(
            "`{cxx}` failed on {}:\n{}",
            src.display(),
            String::from_utf8_lossy(&output.stderr)
        )));
    }
    Ok(exe)
}

/// Where build artifacts go: the given directory, or a fresh temporary one
/// that lives as long as the guard.
fn build_dir(dir: Option<&Path>) -> std::io::Result<(PathBuf, Option<tempfile::TempDir>)> {
    match dir {
        Some(d) => Ok((d.to_path_buf(), None)),
        None => {
            let t = tempfile::Builder::new().prefix("tymc-").tempdir()?;
            Ok((t.path().to_path_buf(), Some(t)))
        }
    }
}

/// Runs a built executable and relays its output and exit status.
fn execute(exe: &Path, args: Option<&Path>, extra: &[&str]) -> Outcome {
    let mut cmd = Command::new(exe);
    if let Some(a) = args {
        cmd.arg(a);
    }
    cmd.args(extra);
    match cmd.output() {
        Ok(o) => Outcome {
            code: o.status.code().unwrap_or(EXIT_RUNTIME),
            stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
            stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        },
        Err(e) => Outcome::fail(EXIT_RUNTIME, format!("cannot run {}: {e}\n", exe.display())),
    }
}

/// `run`: compiles with the standalone target, builds with `cxx` and runs.
pub fn cmd_run(input: &Path, args: Option<&Path>, cxx: &str, dir: Option<&Path>) -> Outcome {
    let (tp, warnings) = match load(input) {
        Ok(v) => v,
        Err(o) => return o,
    };
    if let Err(mut o) = load_args(&tp, args) {
        o.stderr.insert_str(0, &warnings);
        return o;
    }
    let module = emit_module_with(&tp, &EmitOptions::new(EmitTarget::Standalone));
    let (dir, _guard) = match build_dir(dir) {
        Ok(v) => v,
        Err(e) => return Outcome::fail(EXIT_BUILD, format!("{warnings}cannot create build directory: {e}\n")),
    };
    let exe = match build_standalone(&module, cxx, &dir) {
        Ok(exe) => exe,
        Err(BuildFailure(msg)) => return Outcome::fail(EXIT_BUILD, format!("{warnings}{msg}\n")),
    };
    let args = args.map(|a| a.canonicalize().unwrap_or_else(|_| a.to_path_buf()));
    let mut out = execute(&exe, args.as_deref(), &[]);
    out.stderr.insert_str(0, &warnings);
    out
}

// ---- bench ----

pub const BENCH_VARIANTS: [&str; 4] = ["mult-int", "mult-int-check", "mult-real", "mult-interp"];

/// The mymult matrix product with the given element types
/// and directive prologue.
pub fn mult_source(name: &str, input: &str, directives: &[&str]) -> String {
    let mut s = String::new();
    for d in directives {
        s.push_str(&format!("$ '{d}'\n"));
    }
    s.push_str(&format!(
        "function intArray z = {name}({input} x, {input} y)
  int d1x = rows(x)
  int d2x = columns(x)
  int d1y = rows(y)
  int d2y = columns(y)

  if (d2x ~= d1y)
    error('incompatible dimensions')
  end

  createArray(z, d1x, d2y)

  int i
  int j
  int k
  for i=0:d1x-1
    for j=0:d2y-1
      z(i, j) = 0
      for k=0:d1y-1
        z(i, j) = z(i, j) + x(i, k)*y(k, j)
      end
    end
  end
end
"
    ));
    s
}

const ALL_DIRECTIVES: [&str; 3] = ["zero_based_arrays", "no_init_vars", "no_check_ranges"];

/// Source of a compiled bench variant.
pub fn bench_source(variant: &str) -> Option<String> {
    Some(match variant {
        "mult-int" => mult_source("mult_int", "intArray", &ALL_DIRECTIVES),
        // Keeps zero-based indexing but drops the directives that skip
        // initialization and range checks.
        "mult-int-check" => mult_source("mult_int_check", "intArray", &["zero_based_arrays"]),
        "mult-real" | "mult-interp" => mult_source("mult_real", "realArray", &ALL_DIRECTIVES),
        _ => return None,
    })
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub cxx: String,
    pub build_dir: Option<PathBuf>,
    /// Skip the interpreter variant for sizes above this bound.
    pub interp_max_size: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![100, 300],
            repeats: 3,
            seed: 42,
            cxx: "c++".into(),
            build_dir: None,
            interp_max_size: usize::MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub variant: String,
    pub size: usize,
    pub seconds: f64,
    /// Time relative to the fastest variant at the same size.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub seed: u64,
    pub repeats: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn seconds(&self, variant: &str, size: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.variant == variant && r.size == size).map(|r| r.seconds)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,size,seconds,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:.9},{:.4}\n", r.variant, r.size, r.seconds, r.ratio));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut sizes: Vec<usize> = self.rows.iter().map(|r| r.size).collect();
        sizes.dedup();
        let mut out = format!("median of {} runs, seed {}\n", self.repeats, self.seed);
        out.push_str(&format!("{:<16}", "variant"));
        for s in &sizes {
            out.push_str(&format!("{:>24}", format!("{s}x{s} s (ratio)")));
        }
        out.push('\n');
        for v in BENCH_VARIANTS {
            if !self.rows.iter().any(|r| r.variant == v) {
                continue;
            }
            out.push_str(&format!("{v:<16}"));
            for &s in &sizes {
                match self.rows.iter().find(|r| r.variant == v && r.size == s) {
                    Some(r) => out.push_str(&format!("{:>24}", format!("{:.6} ({:.1})", r.seconds, r.ratio))),
                    None => out.push_str(&format!("{:>24}", "-")),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Square `n`x`n` matrix of integers drawn uniformly from 0..10.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i32>> {
    (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..10)).collect()).collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn parse_time(stderr: &str) -> Option<f64> {
    stderr.lines().find_map(|l| l.strip_prefix("time ")?.trim().parse().ok())
}

#[derive(Debug)]
pub enum BenchError {
    Build(String),
    Run(String),
}

impl std::fmt::Display for BenchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BenchError::Build(m) | BenchError::Run(m) => f.write_str(m),
        }
    }
}

/// Builds the compiled variants once, then times every variant at every
/// size. Compiled variants are timed by the harness around the call only;
/// the interpreter is timed in-process around [`interp::run`]. Each
/// compiled result is checked against the interpreter's output.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    let (dir, _guard) = build_dir(cfg.build_dir.as_deref()).map_err(|e| BenchError::Build(e.to_string()))?;
    let mut exes = Vec::new();
    for v in ["mult-int", "mult-int-check", "mult-real"] {
        let tp = frontend(&bench_source(v).expect("known variant")).expect("bench sources analyze");
        let module = emit_module_with(&tp, &EmitOptions::new(EmitTarget::Standalone));
        let exe = build_standalone(&module, &cfg.cxx, &dir.join(v)).map_err(|BuildFailure(m)| BenchError::Build(m))?;
        exes.push((v, exe));
    }
    let interp_tp = frontend(&bench_source("mult-interp").unwrap()).expect("bench sources analyze");

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let repeats = cfg.repeats.max(1);
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let a = random_matrix(&mut rng, n);
        let b = random_matrix(&mut rng, n);
        let to_real = |m: &Vec<Vec<i32>>| NumArray::from_rows(&m.iter().map(|r| r.iter().map(|&x| f64::from(x)).collect()).collect::<Vec<_>>());
        let ints = [Value::IntArray(NumArray::from_rows(&a)), Value::IntArray(NumArray::from_rows(&b))];
        let reals = [Value::RealArray(to_real(&a)), Value::RealArray(to_real(&b))];
        let int_args = dir.join(format!("int-{n}.args"));
        let real_args = dir.join(format!("real-{n}.args"));
        fs::write(&int_args, write_args(&ints)).map_err(|e| BenchError::Run(e.to_string()))?;
        fs::write(&real_args, write_args(&reals)).map_err(|e| BenchError::Run(e.to_string()))?;

        // The interpreter result is the reference for every variant.
        let mut expected = None;
        let mut size_rows = Vec::new();
        if n <= cfg.interp_max_size {
            let mut times = Vec::new();
            for _ in 0..repeats {
                let t0 = Instant::now();
                let res = interp::run(&interp_tp, &reals).map_err(|e| BenchError::Run(e.to_string()))?;
                times.push(t0.elapsed().as_secs_f64());
                expected = Some(res.return_values.iter().map(format_value).collect::<String>());
            }
            size_rows.push(("mult-interp", median(times)));
        }
        for (v, exe) in &exes {
            let args = if *v == "mult-real" { &real_args } else { &int_args };
            let mut times = Vec::new();
            for _ in 0..repeats {
                let out = execute(exe, Some(args), &["--time"]);
                if out.code != 0 {
                    return Err(BenchError::Run(format!("{v} exited with {}: {}", out.code, out.stderr)));
                }
                if let Some(exp) = &expected {
                    if &out.stdout != exp {
                        return Err(BenchError::Run(format!("{v} disagrees with the interpreter at size {n}")));
                    }
                }
                times.push(parse_time(&out.stderr).ok_or_else(|| BenchError::Run(format!("{v} reported no time")))?);
            }
            size_rows.push((v, median(times)));
        }
        let fastest = size_rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min).max(f64::MIN_POSITIVE);
        let mut ordered: Vec<_> = size_rows.into_iter().collect();
        ordered.sort_by_key(|(v, _)| BENCH_VARIANTS.iter().position(|x| x == v));
        for (v, secs) in ordered {
            let secs = secs.max(f64::MIN_POSITIVE);
            rows.push(BenchRow { variant: v.to_string(), size: n, seconds: secs, ratio: secs / fastest });
        }
    }
    Ok(BenchReport { seed: cfg.seed, repeats, rows })
}

/// `bench`: prints the table followed by CSV rows.
pub fn cmd_bench(cfg: &BenchConfig) -> Outcome {
    match run_bench(cfg) {
        Ok(report) => Outcome {
            code: EXIT_OK,
            stdout: format!("{}\n{}", report.to_table(), report.to_csv()),
            stderr: String::new(),
        },
        Err(BenchError::Build(m)) => Outcome::fail(EXIT_BUILD, format!("{m}\n")),
        Err(BenchError::Run(m)) => Outcome::fail(EXIT_RUNTIME, format!("{m}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_sources_analyze() {
        for v in BENCH_VARIANTS {
            let tp = frontend(&bench_source(v).unwrap()).unwrap();
            assert!(tp.warnings.iter().all(|d| !d.is_error()));
        }
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn time_line() {
        assert_eq!(parse_time("noise\ntime 0.125000000\n"), Some(0.125));
        assert_eq!(parse_time(""), None);
    }

    #[test]
    fn ratios_relative_to_fastest() {
        let report = BenchReport {
            seed: 1,
            repeats: 1,
            rows: vec![BenchRow { variant: "mult-int".into(), size: 4, seconds: 0.5, ratio: 1.0 }],
        };
        assert!(report.to_csv().starts_with("variant,size,seconds,ratio\nmult-int,4,"));
        assert!(report.to_table().contains("mult-int"));
    }
}
