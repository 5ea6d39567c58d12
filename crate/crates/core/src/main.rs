use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = graph_dilation::cli::run(std::env::args_os());
    print!("{}", outcome.output);
    ExitCode::from(outcome.exit as u8)
}
