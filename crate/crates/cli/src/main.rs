use std::io::Write;

fn main() {
    let (code, text) = sasaki_cli::run_command(std::env::args());
    if code == 0 {
        print!("{text}");
        let _ = std::io::stdout().flush();
    } else {
        eprint!("{text}");
    }
    std::process::exit(code);
}
