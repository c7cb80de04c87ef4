//! Shared fixtures for the integration tests: the program corpus with
//! hand-derived expected results, and output comparison helpers.

#![allow(dead_code)]

pub mod gen;

use std::path::{Path, PathBuf};
use std::process::Command;

use tymc::argsfile::parse_args;
use tymc::driver::{frontend, interpret, Outcome};
use tymc::TypedProgram;

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(tests_dir().join("fixtures").join(name)).unwrap()
}

pub fn corpus_path(name: &str) -> PathBuf {
    tests_dir().join("corpus").join(format!("{name}.tm"))
}

pub fn corpus_source(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

pub fn analyze_source(src: &str) -> TypedProgram {
    frontend(src).unwrap_or_else(|d| panic!("expected a clean program, got {d:?}"))
}

/// One program run with one set of arguments.
pub struct Case {
    pub name: &'static str,
    pub program: &'static str,
    pub args: &'static str,
    pub exit: i32,
    pub stdout: &'static str,
    /// Substring expected on stderr, if any.
    pub stderr: Option<&'static str>,
    /// The compiled program has defined behavior on these inputs, so its
    /// output must agree with the interpreter.
    pub differential: bool,
}

const fn ok(name: &'static str, program: &'static str, args: &'static str, stdout: &'static str) -> Case {
    Case { name, program, args, exit: 0, stdout, stderr: None, differential: true }
}

const fn fails(name: &'static str, program: &'static str, args: &'static str, stderr: &'static str) -> Case {
    Case { name, program, args, exit: 2, stdout: "", stderr: Some(stderr), differential: true }
}

const ONES_3X3: &str = "intarray 3 3\n1 1 1\n1 1 1\n1 1 1\n";

/// Expected results are derived by hand from the language semantics.
pub const CASES: &[Case] = &[
    ok(
        "mymult_2x2",
        "mymult",
        "realarray 2 2\n1 2\n3 4\nrealarray 2 2\n5 6\n7 8\n",
        "array 2 2\n19 22\n43 50\n",
    ),
    ok(
        "mymult_identity_truncates",
        "mymult",
        "realarray 2 2\n1 0\n0 1\nrealarray 2 2\n1.5 -2.7\n3.9 4\n",
        "array 2 2\n1 -2\n3 4\n",
    ),
    ok(
        "mymult_rectangular",
        "mymult",
        "realarray 2 3\n1 2 3\n4 5 6\nrealarray 3 1\n1\n0\n-1\n",
        "array 2 1\n-2\n-2\n",
    ),
    fails(
        "mymult_incompatible",
        "mymult",
        "realarray 2 3\n1 2 3\n4 5 6\nrealarray 2 2\n5 6\n7 8\n",
        "incompatible dimensions",
    ),
    // z is rebound to the 2x2 sum, so the 3x3 allocation does not survive.
    ok("addslice_ones", "addslice", "intarray 3 3\n1 1 1\n1 1 1\n1 1 1\nintarray 3 3\n1 1 1\n1 1 1\n1 1 1\n", "array 2 2\n2 2\n2 2\n"),
    ok(
        "addslice_values",
        "addslice",
        "intarray 3 3\n1 2 3\n4 5 6\n7 8 9\nintarray 3 3\n10 20 30\n40 50 60\n70 80 90\n",
        "array 2 2\n51 62\n84 95\n",
    ),
    fails(
        "addslice_too_small",
        "addslice",
        "intarray 2 2\n1 1\n1 1\nintarray 2 2\n1 1\n1 1\n",
        "Matrices should be of size at least 3x3",
    ),
    ok(
        "sat_add",
        "sat_add",
        "intarray 1 3\n2147483600 100 2147483647\n",
        "array 1 3\n2147483647 2147483647 -2147483648\n",
    ),
    ok(
        "sat_real",
        "sat_real",
        "realarray 1 6\n2.9 -2.9 3e9 -3e9 0.5 -0.5\n",
        "array 1 6\n2 -2 2147483647 -2147483648 0 0\n",
    ),
    ok("sat_scalar_max", "sat_scalar", "int 65536\nint 65536\n", "2147483647\n"),
    ok("sat_scalar_min", "sat_scalar", "int -65536\nint 65536\n", "-2147483648\n"),
    ok("slice_rows", "slice_rows", "intarray 3 3\n1 2 3\n4 5 6\n7 8 9\n", "array 2 3\n4 5 6\n7 8 9\n"),
    ok("slice_step", "slice_step", "intarray 2 5\n1 2 3 4 5\n6 7 8 9 10\n", "array 1 3\n1 3 5\n"),
    ok("slice_linear", "slice_linear", "intarray 2 2\n1 2\n3 4\n", "array 4 1\n1\n3\n2\n4\n"),
    ok("slice_column", "slice_column", "intarray 4 1\n10\n20\n30\n40\n", "array 2 1\n20\n30\n"),
    ok("assign_block", "assign_block", "intarray 2 2\n1 2\n3 4\n", "array 3 3\n0 1 2\n0 3 4\n7 7 7\n"),
    fails("assign_block_mismatch", "assign_block", ONES_3X3, "nonconformant"),
    ok(
        "assign_colon",
        "assign_colon",
        "realarray 3 2\n0.5 1.5\n2.5 3.5\n4.5 5.5\n",
        "array 4 2\n0.5 1.5\n2.5 3.5\n4.5 5.5\n0 0\n",
    ),
    fails("bounds_error", "bounds_error", "intarray 2 2\n1 2\n3 4\n", "out of bound"),
    ok("zero_based", "zero_based", "intarray 2 2\n1 2\n3 4\n", "23\n"),
    ok("default_init", "default_init", "int 5\n", "5\n"),
    ok("loop_down", "loop_down", "int 5\n", "array 1 5\n5 4 3 2 1\n"),
    ok("loop_step", "loop_step", "int 9\n", "25\n"),
    ok("int_div", "int_div", "int 7\nint 2\n", "array 1 2\n3 -3\n"),
    fails("int_div_zero", "int_div", "int 7\nint 0\n", "division by zero"),
    ok("real_arith", "real_arith", "real 1\nreal 3\n", "0.43333333333333335\n"),
    // g + n is float arithmetic; the sum is widened only on assignment.
    ok("float_mix", "float_mix", "float 0.1\nint 1\n", "1.2000000476837158\n"),
    ok("realarray_scalar", "realarray_scalar", "realarray 1 2\n1 2.5\nint 2\n", "array 1 2\n1.5 4.5\n"),
    ok(
        "intarray_ops",
        "intarray_ops",
        "intarray 2 2\n1 2\n3 4\nintarray 2 2\n10 20\n30 40\n",
        "array 2 2\n-23 -46\n-69 -92\n",
    ),
    fails("intarray_ops_shapes", "intarray_ops", "intarray 2 2\n1 2\n3 4\nintarray 1 2\n1 2\n", "nonconformant"),
    ok("if_inside", "if_else", "int 5\n", "1\n"),
    ok("if_zero", "if_else", "int 0\n", "0\n"),
    ok("if_outside", "if_else", "int 20\n", "-1\n"),
    ok("first_negative_sum", "first_negative", "intarray 1 3\n1 2 3\n", "6\n"),
    fails("first_negative_found", "first_negative", "intarray 1 4\n1 2 -3 4\n", "negative element"),
    ok("rows_cols", "rows_cols", "realarray 3 4\n1 2 3 4\n5 6 7 8\n9 10 11 12\n", "304\n"),
    ok("eye", "eye", "int 3\n", "array 3 3\n1 0 0\n0 1 0\n0 0 1\n"),
    ok("cow", "cow", "intarray 1 2\n1 2\n", "array 1 2\n-98 0\n"),
    // Compiled code makes no promise here, so it is left out of the
    // differential comparison.
    Case {
        name: "unchecked_oob",
        program: "unchecked_oob",
        args: "intarray 2 2\n1 2\n3 4\n",
        exit: 2,
        stdout: "",
        stderr: Some("range checks disabled"),
        differential: false,
    },
];

/// Runs a case through the interpreter.
pub fn interp_case(case: &Case) -> Outcome {
    let tp = analyze_source(&corpus_source(case.program));
    let args = parse_args(case.args).expect("case args parse");
    interpret(&tp, &args)
}

/// Compares printed results: integers must match exactly, reals within a
/// relative error of 1e-12.
pub fn outputs_agree(actual: &str, expected: &str) -> Result<(), String> {
    let a: Vec<&str> = actual.split_whitespace().collect();
    let e: Vec<&str> = expected.split_whitespace().collect();
    if a.len() != e.len() {
        return Err(format!("token count differs:\n--- actual\n{actual}--- expected\n{expected}"));
    }
    for (x, y) in a.iter().zip(&e) {
        if x == y {
            continue;
        }
        let is_int = |s: &str| s.parse::<i64>().is_ok();
        if is_int(x) && is_int(y) {
            return Err(format!("integer {x} != {y}"));
        }
        match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(p), Ok(q)) => {
                let scale = p.abs().max(q.abs());
                if (p - q).abs() > 1e-12 * scale {
                    return Err(format!("real {x} != {y}"));
                }
            }
            _ => return Err(format!("token {x} != {y}")),
        }
    }
    Ok(())
}

/// Checks an outcome against a case's expectations.
pub fn check_case(case: &Case, out: &Outcome) -> Result<(), String> {
    if out.code != case.exit {
        return Err(format!("{}: exit {} != {} (stderr: {})", case.name, out.code, case.exit, out.stderr));
    }
    outputs_agree(&out.stdout, case.stdout).map_err(|e| format!("{}: {e}", case.name))?;
    if let Some(s) = case.stderr {
        if !out.stderr.contains(s) {
            return Err(format!("{}: stderr lacks `{s}`: {}", case.name, out.stderr));
        }
    }
    Ok(())
}

/// The C++ compiler used by the differential tests, when one works.
pub fn cxx() -> Option<String> {
    let cxx = std::env::var("CXX").unwrap_or_else(|_| "c++".into());
    Command::new(&cxx).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cxx)
}

/// Triple-loop matrix product used as an oracle.
pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    (0..n).map(|i| (0..p).map(|j| (0..m).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// Fixed fixture for the directive matrix: element loads and stores, a
/// scalars declared without initializer and no literal zero stores.
pub const DIRECTIVE_PROBE: &str = "function intArray z = probe(intArray x)
  int n = rows(x)
  int i
  int acc
  acc = n
  createArray(z, n, 1)
  for i=1:n
    acc = acc + x(i, 1)
    z(i, 1) = acc
  end
end
";

pub const DIRECTIVES: [&str; 3] = ["zero_based_arrays", "no_init_vars", "no_check_ranges"];

/// `DIRECTIVE_PROBE` preceded by the directives selected by `mask`.
pub fn directive_variant(mask: u8) -> String {
    let mut src = String::new();
    for (bit, d) in DIRECTIVES.iter().enumerate() {
        if mask & (1 << bit) != 0 {
            src.push_str(&format!("$ '{d}'\n"));
        }
    }
    src.push_str(DIRECTIVE_PROBE);
    src
}
