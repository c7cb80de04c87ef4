use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tymc::codegen::{EmitOptions, EmitTarget, ErrorStyle};
use tymc::driver::{self, BenchConfig, Outcome};

#[derive(Parser)]
#[command(name = "tymc", version, about = "Compile tym functions to C++, or run them")]
struct Cli {
    #[command(subcommand)]
    command: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Octave,
    Standalone,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrorLowering {
    /// `error("msg"); return retval;`
    Call,
    /// Print to std::cout, then return.
    Stream,
}

#[derive(Subcommand)]
enum Verb {
    /// Translate a .tm file into <function>.cpp next to it
    Compile {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "octave")]
        target: Target,
        /// How the octave target lowers error(...)
        #[arg(long, value_enum, default_value = "call")]
        octave_error: ErrorLowering,
    },
    /// Report diagnostics without generating code
    Check { input: PathBuf },
    /// Run a function in the reference interpreter
    Interp {
        input: PathBuf,
        #[arg(long)]
        args: Option<PathBuf>,
    },
    /// Build with the standalone target and run the executable
    Run {
        input: PathBuf,
        #[arg(long)]
        args: Option<PathBuf>,
        #[arg(long, default_value = "c++")]
        cxx: String,
        #[arg(long)]
        build_dir: Option<PathBuf>,
    },
    /// Time the matrix product variants
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "100,300")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "c++")]
        cxx: String,
        #[arg(long)]
        build_dir: Option<PathBuf>,
        /// Skip the interpreter above this size
        #[arg(long)]
        interp_max_size: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Verb::Compile { input, target, octave_error } => {
            let opts = EmitOptions {
                target: match target {
                    Target::Octave => EmitTarget::Octave,
                    Target::Standalone => EmitTarget::Standalone,
                },
                octave_error: match octave_error {
                    ErrorLowering::Call => ErrorStyle::Call,
                    ErrorLowering::Stream => ErrorStyle::Stream,
                },
            };
            driver::cmd_compile(&input, &opts)
        }
        Verb::Check { input } => driver::cmd_check(&input),
        Verb::Interp { input, args } => driver::cmd_interp(&input, args.as_deref()),
        Verb::Run { input, args, cxx, build_dir } => driver::cmd_run(&input, args.as_deref(), &cxx, build_dir.as_deref()),
        Verb::Bench { sizes, repeats, seed, cxx, build_dir, interp_max_size } => driver::cmd_bench(&BenchConfig {
            sizes,
            repeats,
            seed,
            cxx,
            build_dir,
            interp_max_size: interp_max_size.unwrap_or(usize::MAX),
        }),
    };
    emit(&outcome)
}

fn emit(o: &Outcome) -> ExitCode {
    let _ = std::io::stdout().write_all(o.stdout.as_bytes());
    let _ = std::io::stderr().write_all(o.stderr.as_bytes());
    ExitCode::from(o.code as u8)
}
