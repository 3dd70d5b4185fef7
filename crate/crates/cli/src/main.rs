use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, report) = definetti_cli::run(std::env::args_os());
    if code == definetti_cli::EXIT_INPUT {
        eprintln!("{report}");
    } else {
        println!("{report}");
    }
    ExitCode::from(code as u8)
}
