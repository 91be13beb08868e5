//! `csf-lab`: parameter sweeps, figure data and simulation runs written as
//! CSV files plus a JSON manifest.

pub mod app;
pub mod commands;
pub mod error;
pub mod figures;
pub mod output;
pub mod params;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use commands::Ctx;
use error::{CliError, CliResult};
use output::{write_run, Manifest, Table};
use params::Params;

const GIT_DESCRIBE: &str = env!("CSF_LAB_GIT_DESCRIBE");

/// Runs one command line and returns the process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let root = app::build();
    let matches = match root.clone().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&root, &matches) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(root: &clap::Command, matches: &clap::ArgMatches) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    let (path, cmd, leaf) = app::leaf_of(root, matches);
    let params = Params::collect(cmd, leaf)?;
    let out = PathBuf::from(params.str_or("out", "out"));
    let mut ctx = Ctx::new(params)?;
    let mut command = path.join(" ");
    let tables = dispatch(&mut ctx, &path, leaf, &mut command)?;
    for t in &tables {
        t.check_curve()?;
    }
    let mut manifest = Manifest {
        command,
        inputs: ctx.params.snapshot(),
        git_describe: GIT_DESCRIBE.to_string(),
        seed: ctx.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        files: Vec::new(),
        notes: std::mem::take(&mut ctx.notes),
    };
    write_run(&out, &tables, &mut manifest)
}

fn dispatch(ctx: &mut Ctx, path: &[&str], leaf: &clap::ArgMatches, command: &mut String) -> CliResult<Vec<Table>> {
    match path {
        ["twostate", "sweep"] => commands::twostate_sweep(ctx),
        ["markov", "bounds"] => commands::markov_bounds(ctx),
        ["rayleigh", "vq"] => commands::rayleigh_vq(ctx),
        ["rayleigh", "lsc"] => commands::rayleigh_lsc(ctx),
        ["rayleigh", "group"] => commands::rayleigh_group(ctx),
        ["rayleigh", "corr"] => commands::rayleigh_corr(ctx),
        ["waterfill"] => commands::waterfill(ctx),
        ["sim", "fixed"] => commands::sim_fixed(ctx),
        ["sim", "variable"] => commands::sim_variable(ctx),
        ["sim", "oracle"] => commands::sim_oracle(ctx),
        ["figure"] => {
            let name = leaf.get_one::<String>("name").cloned().unwrap_or_default();
            command.push(' ');
            command.push_str(&name);
            figures::run(ctx, &name)
        }
        other => Err::<_, CliError>(commands::unknown(other)),
    }
}
