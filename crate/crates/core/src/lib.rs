//! Compiler for tym, a statically typed MATLAB-like language, to C++.
//!
//! The pipeline is [`lexer::tokenize`] → [`parser::parse`] → [`sema::analyze`]
//! → [`codegen::emit_module`]. [`interp::run`] executes analyzed programs
//! directly and serves as the reference semantics for generated code.

pub mod argsfile;
pub mod array;
pub mod ast;
pub mod codegen;
pub mod diag;
pub mod driver;
pub mod format;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod sema;
pub mod typed;

pub use ast::{Program, TymType};
pub use codegen::{emit_module, EmitOptions, EmitTarget, LoweredModule};
pub use diag::{Diagnostic, Severity};
pub use interp::{run, ExecResult, Exit, RuntimeError, Value};
pub use typed::{DirectiveState, TypedProgram};
