use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use pwlab_cli::{run, Cli};

fn emit(cli: &Cli, table: &pwlab_cli::OutputTable) -> anyhow::Result<()> {
    let mut out: Box<dyn Write> = match &cli.common.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if cli.common.json {
        table.write_json(&mut out)?;
    } else {
        table.write_csv(&mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let table = match run(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("pwlab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = emit(&cli, &table) {
        eprintln!("pwlab: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
