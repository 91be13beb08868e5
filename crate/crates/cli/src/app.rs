//! Command-line grammar. Every value is taken as a string and parsed after
//! merging with the config file.

use clap::{Arg, Command};

fn opt(id: &'static str, help: &'static str) -> Arg {
    Arg::new(id).long(id).value_name("VALUE").help(help)
}

fn common(cmd: Command) -> Command {
    cmd.arg(opt("out", "Output directory for CSV files and the manifest").value_name("DIR").default_value("out"))
        .arg(opt("config", "Flat JSON file with the same keys as the flags; flags win").value_name("FILE"))
        .arg(opt("seed", "Seed for every random stream").value_name("INT").default_value("1"))
        .arg(opt("jobs", "Worker threads for sweeps (0 = all cores)").value_name("INT").env("CSF_LAB_JOBS").default_value("0"))
}

fn snr(cmd: Command) -> Command {
    cmd.arg(opt("snr-db", "Total SNR P in dB").conflicts_with("snr-linear"))
        .arg(opt("snr-linear", "Total SNR P as a linear ratio"))
}

fn two_state(cmd: Command) -> Command {
    cmd.arg(opt("q", "Probability a sub-channel is good"))
        .arg(opt("p", "Fraction of sub-channels activated"))
        .arg(opt("c1", "Capacity of an active good sub-channel, bits/use"))
        .arg(opt("c0", "Capacity of an active bad sub-channel, bits/use"))
}

fn leaf(name: &'static str, about: &'static str) -> Command {
    common(Command::new(name).about(about))
}

pub fn build() -> Command {
    Command::new("csf-lab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Forward rate vs. channel-state feedback rate for multicarrier block-fading channels")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(
            Command::new("twostate").about("Good/bad sub-channel model").subcommand_required(true).subcommand(
                two_state(leaf("sweep", "Forward rate over a feedback-rate grid"))
                    .arg(opt("rf", "Feedback grid, bits/sub-channel (start:stop:step or list)"))
                    .arg(opt("scheme", "Comma list of vq, lsc, fixed, variable"))
                    .arg(opt("n", "Block length for the finite-length bounds")),
            ),
        )
        .subcommand(
            Command::new("markov").about("Markov-correlated sub-channel states").subcommand_required(true).subcommand(
                two_state(leaf("bounds", "Upper and lower forward-rate bounds"))
                    .arg(opt("delta10", "P(next bad | current good)"))
                    .arg(opt("rf", "Feedback grid, bits/sub-channel")),
            ),
        )
        .subcommand(
            Command::new("rayleigh")
                .about("Threshold schemes over Rayleigh sub-channels")
                .subcommand_required(true)
                .subcommand(
                    snr(leaf("vq", "Rate-distortion quantized feedback"))
                        .arg(opt("n", "Number of sub-channels"))
                        .arg(opt("b", "Feedback grid, bits/block"))
                        .arg(opt("bound", "Finite-length bound to add: none, variable or fixed")),
                )
                .subcommand(
                    snr(leaf("lsc", "Threshold adjustment with lossless reports"))
                        .arg(opt("n", "Number of sub-channels"))
                        .arg(opt("b", "Feedback grid, bits/block")),
                )
                .subcommand(
                    snr(leaf("group", "Group loading, numeric and large-N optimum"))
                        .arg(opt("n", "Number of sub-channels"))
                        .arg(opt("b", "Feedback grid, bits/block"))
                        .arg(opt("m-mode", "Group size domain: continuous, integer or divisor")),
                )
                .subcommand(
                    snr(leaf("corr", "AR(1)-correlated sub-channels"))
                        .arg(opt("n", "Number of sub-channels"))
                        .arg(opt("b", "Feedback grid, bits/block"))
                        .arg(opt("alpha", "Correlation of adjacent sub-channel coefficients")),
                ),
        )
        .subcommand(
            snr(leaf("waterfill", "Monte Carlo water-filling capacity"))
                .arg(opt("n", "Number of sub-channels"))
                .arg(opt("samples", "Random gain vectors to average"))
                .arg(opt("alpha", "Correlation of adjacent sub-channel coefficients")),
        )
        .subcommand(
            Command::new("sim")
                .about("Monte Carlo runs of the feedback codes")
                .subcommand_required(true)
                .subcommand(
                    two_state(leaf("fixed", "Random constant-composition codebooks"))
                        .arg(opt("n", "Block length"))
                        .arg(opt("m-words", "Codebook sizes (list or grid)"))
                        .arg(opt("trials", "Blocks per codebook size")),
                )
                .subcommand(
                    two_state(leaf("variable", "Variable-length random-draw code"))
                        .arg(opt("n", "Block length"))
                        .arg(opt("eps0", "Target missed fraction of good sub-channels"))
                        .arg(opt("eps1", "Target activated fraction of bad sub-channels"))
                        .arg(opt("trials", "Blocks to simulate")),
                )
                .subcommand(
                    leaf("oracle", "Best constant-composition codebook by search")
                        .arg(opt("n", "Block length"))
                        .arg(opt("active", "Active sub-channels per word"))
                        .arg(opt("m-words", "Codebook size"))
                        .arg(opt("q", "Probability a sub-channel is good"))
                        .arg(opt("search", "exhaustive, greedy or auto")),
                ),
        )
        .subcommand(
            snr(two_state(leaf("figure", "Data for a named figure")))
                .arg(Arg::new("name").required(true).value_name("NAME").help(
                    "bincaps, e0e1, rrublb, iidraycaps, iidthres, map_ray, optpara or corrray",
                ))
                .arg(opt("p-list", "Activation fractions, comma list"))
                .arg(opt("q-list", "Good-state probabilities, comma list"))
                .arg(opt("delta10", "P(next bad | current good)"))
                .arg(opt("rf", "Feedback grid, bits/sub-channel"))
                .arg(opt("b", "Feedback grid, bits/block"))
                .arg(opt("n", "Number of sub-channels or block length"))
                .arg(opt("alpha", "Correlation of adjacent sub-channel coefficients"))
                .arg(opt("samples", "Water-filling Monte Carlo samples")),
        )
}

/// Descends to the invoked leaf command, returning its path, definition and matches.
pub fn leaf_of<'a>(root: &'a Command, matches: &'a clap::ArgMatches) -> (Vec<&'a str>, &'a Command, &'a clap::ArgMatches) {
    let mut path = Vec::new();
    let (mut cmd, mut m) = (root, matches);
    while let Some((name, sub)) = m.subcommand() {
        path.push(name);
        cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
        m = sub;
    }
    (path, cmd, m)
}
