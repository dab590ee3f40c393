//! `ebsg` binary entry point: delegates to the library's command-line front
//! end and maps its error classes to process exit codes.

fn main() {
    if let Err(e) = ebsg::cli::run_cli(std::env::args_os()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
