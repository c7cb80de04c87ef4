//! Properties of the emitted text over the corpus.

mod common;

use common::*;
use tymc::codegen::{emit_module, EmitTarget};

const NO_CHECK: &str = "$ 'no_check_ranges'";

fn corpus_sources() -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(tests_dir().join("corpus"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn range_checks_change_only_accessor_names() {
    for (name, src) in corpus_sources() {
        let base: String = src.lines().filter(|l| l.trim() != NO_CHECK).map(|l| format!("{l}\n")).collect();
        let unchecked = format!("{NO_CHECK}\n{base}");
        for target in [EmitTarget::Octave, EmitTarget::Standalone] {
            let checked = emit_module(&analyze_source(&base), target).source_text;
            let unchecked = emit_module(&analyze_source(&unchecked), target).source_text;
            assert_eq!(checked.replace("checkelem", "xelem"), unchecked, "{name}");
        }
    }
}

#[test]
fn targets_share_the_body_lowering() {
    // Both targets index through the same accessor names and shifts.
    for (name, src) in corpus_sources() {
        let tp = analyze_source(&src);
        let count = |t: &str, pat: &str| t.matches(pat).count();
        let oct = emit_module(&tp, EmitTarget::Octave).source_text;
        let sa = emit_module(&tp, EmitTarget::Standalone).source_text;
        for pat in ["xelem(", "checkelem(", ".index(", ".assign(", "for ("] {
            assert_eq!(count(&oct, pat), count(&sa, pat), "{name}: {pat}");
        }
    }
}
