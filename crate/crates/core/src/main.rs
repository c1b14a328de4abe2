use std::io;
use std::path::PathBuf;

use biconserve::cli::run;
use biconserve::config::CONFIG_ENV;

fn main() {
    let config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let code = run(
        std::env::args_os(),
        config.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
