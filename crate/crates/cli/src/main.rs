use std::io;

fn main() {
    let env_config = std::env::var_os(gls_tailbound_cli::CONFIG_ENV).map(Into::into);
    let code = gls_tailbound_cli::run(
        std::env::args_os(),
        env_config,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
