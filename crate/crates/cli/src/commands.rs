//! Subcommand implementations. Each returns the tables to write.

use csflab_core::rayleigh::{
    ar1_achievable_rate, group_asymptotic, group_optimize, group_optimize_continuous, group_optimize_divisor,
    lsc_markov_rate, lsc_threshold_rate, vq_lower_bound, vq_optimize, waterfilling_reference, Regime,
};
use csflab_core::simkit::{
    exhaustive_codebook_oracle, greedy_codebook_oracle, simulate_fixed, simulate_variable, variable_rate_bound,
};
use csflab_core::twostate::{
    distortion_rate, fixed_length_lower_bound, lsc_forward_rate, markov_vq_bounds, solve_crossover,
    variable_length_lower_bound, BoundScheme,
};
use csflab_core::{CrossoverPair, Error, GroupPolicy, MarkovSource, RayleighSystem, TwoStateParams};
use rayon::prelude::*;

use crate::error::{at, config_err, CliError, CliResult};
use crate::output::{curve, fmt_sig, Column, Table, Unit};
use crate::params::Params;

/// Shared state of one run.
pub struct Ctx {
    pub params: Params,
    pub seed: u64,
    pub pool: rayon::ThreadPool,
    pub notes: Vec<String>,
}

impl Ctx {
    pub fn new(params: Params) -> CliResult<Ctx> {
        let seed = params.u64_or("seed", 1)?;
        let jobs = params.u64_or("jobs", 0)? as usize;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| config_err(format!("cannot start {jobs} worker threads: {e}")))?;
        Ok(Ctx { params, seed, pool, notes: Vec::new() })
    }

    /// Evaluates `f` at every grid point on the worker pool, keeping grid order.
    pub fn sweep<T, F>(&self, label: &str, grid: &[f64], f: F) -> CliResult<Vec<T>>
    where
        T: Send,
        F: Fn(f64) -> csflab_core::Result<T> + Sync,
    {
        self.pool.install(|| grid.par_iter().map(|&x| f(x).map_err(at(format!("{label} = {}", fmt_sig(x))))).collect())
    }

    /// Like [`Ctx::sweep`] but drops points where `f` reports that the
    /// quantity is undefined there (precondition or infeasibility).
    pub fn sweep_defined<T, F>(&mut self, curve_name: &str, label: &str, grid: &[f64], f: F) -> CliResult<Vec<(f64, T)>>
    where
        T: Send,
        F: Fn(f64) -> csflab_core::Result<T> + Sync,
    {
        let all: Vec<csflab_core::Result<T>> = self.pool.install(|| grid.par_iter().map(|&x| f(x)).collect());
        let mut kept = Vec::new();
        let mut dropped = 0;
        for (x, r) in grid.iter().zip(all) {
            match r {
                Ok(v) => kept.push((*x, v)),
                Err(Error::Precondition(_) | Error::Infeasible(_)) => dropped += 1,
                Err(e) => return Err(at(format!("{label} = {}", fmt_sig(*x)))(e)),
            }
        }
        if dropped > 0 {
            self.notes.push(format!("{curve_name}: {dropped} grid points where the bound is undefined were omitted"));
        }
        Ok(kept)
    }

    fn two_state(&self, defaults: (f64, f64, f64, f64)) -> CliResult<TwoStateParams> {
        let p = &self.params;
        Ok(TwoStateParams::new(
            p.f64_or("q", defaults.0)?,
            p.f64_or("p", defaults.1)?,
            p.f64_or("c1", defaults.2)?,
            p.f64_or("c0", defaults.3)?,
        )?)
    }

    fn system(&self, n: u64, db: f64, alpha: f64) -> CliResult<RayleighSystem> {
        let p = &self.params;
        Ok(RayleighSystem::new(p.u64_or("n", n)?, p.snr_or(db)?, p.f64_or("alpha", alpha)?)?)
    }
}

fn col(name: &str, unit: Unit) -> Column {
    Column::new(name, unit)
}

fn rf_col() -> Column {
    col("rf", Unit::BitsPerSubchannel)
}

fn b_col() -> Column {
    col("b", Unit::BitsPerBlock)
}

fn rate_col() -> Column {
    col("forward_rate", Unit::BitsPerSubchannelUse)
}

fn flag(b: bool) -> f64 {
    f64::from(u8::from(b))
}

pub fn tag(x: f64) -> String {
    fmt_sig(x)
}

pub fn twostate_sweep(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let params = ctx.two_state((0.3, 0.3, 3.0, 0.0))?;
    let grid = ctx.params.grid_or("rf", "0:0.9:0.01")?;
    let n = ctx.params.u64_or("n", 500)?;
    let mut tables = Vec::new();
    let schemes: Vec<String> = ctx.params.str_or("scheme", "vq").split(',').map(|s| s.trim().to_string()).collect();
    for scheme in &schemes {
        match scheme.as_str() {
            "vq" => tables.push(vq_curve(ctx, "twostate_vq", &params, &grid)?),
            "lsc" => tables.push(lsc_curve(ctx, "twostate_lsc", &params, &grid)?),
            "fixed" | "variable" => {
                let which = if scheme == "fixed" { BoundScheme::Fixed } else { BoundScheme::Variable };
                tables.push(bound_curve(ctx, &format!("twostate_{scheme}_n{n}"), &params, &grid, n, which)?);
            }
            other => return Err(config_err(format!("unknown scheme '{other}' (vq, lsc, fixed, variable)"))),
        }
    }
    Ok(tables)
}

pub fn vq_curve(ctx: &Ctx, name: &str, params: &TwoStateParams, grid: &[f64]) -> CliResult<Table> {
    let pts = ctx.sweep("rf", grid, |rf| {
        let eps = solve_crossover(params, rf)?;
        Ok((params.rate_at(eps.eps0), eps))
    })?;
    let mut t = curve(
        name,
        rf_col(),
        rate_col(),
        vec![col("eps0", Unit::Probability), col("eps1", Unit::Probability), col("missed", Unit::Fraction)],
    );
    for (rf, (rate, eps)) in grid.iter().zip(pts) {
        t.push(vec![*rf, rate, eps.eps0, eps.eps1, params.q * eps.eps0]);
    }
    Ok(t)
}

pub fn lsc_curve(ctx: &Ctx, name: &str, params: &TwoStateParams, grid: &[f64]) -> CliResult<Table> {
    let pts = ctx.sweep("rf", grid, |rf| lsc_forward_rate(params, rf))?;
    let mut t = curve(name, rf_col(), rate_col(), vec![]);
    for (rf, rate) in grid.iter().zip(pts) {
        t.push(vec![*rf, rate]);
    }
    Ok(t)
}

pub fn bound_curve(
    ctx: &mut Ctx,
    name: &str,
    params: &TwoStateParams,
    grid: &[f64],
    n: u64,
    scheme: BoundScheme,
) -> CliResult<Table> {
    let pts = ctx.sweep_defined(name, "rf", grid, |rf| match scheme {
        BoundScheme::Fixed => fixed_length_lower_bound(params, rf, n),
        BoundScheme::Variable => variable_length_lower_bound(params, rf, n),
    })?;
    let mut t = curve(name, rf_col(), col("rate_lower", Unit::BitsPerSubchannelUse), vec![col("rate_limit", Unit::BitsPerSubchannelUse)]);
    for (rf, b) in pts {
        t.push(vec![rf, b.rate_lower, b.rate_limit]);
    }
    Ok(t)
}

pub fn markov_bounds(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let params = ctx.two_state((0.3, 0.3, 3.0, 0.0))?;
    let delta10 = ctx.params.f64_or("delta10", 0.3)?;
    let grid = ctx.params.grid_or("rf", "0:0.9:0.01")?;
    markov_tables(ctx, "markov", &params, delta10, &grid)
}

pub fn markov_tables(ctx: &Ctx, prefix: &str, params: &TwoStateParams, delta10: f64, grid: &[f64]) -> CliResult<Vec<Table>> {
    let src = MarkovSource::from_q(params.q, delta10)?;
    let pts = ctx.sweep("rf", grid, |rf| markov_vq_bounds(&src, params.p, params.c1, params.c0, rf))?;
    let iid = ctx.sweep("rf", grid, |rf| Ok(params.rate_at(solve_crossover(params, rf)?.eps0)))?;
    let prob = |n| col(n, Unit::Probability);
    let mut upper = curve(
        format!("{prefix}_upper"),
        rf_col(),
        rate_col(),
        vec![prob("q00"), prob("q01"), prob("q10"), prob("q11"), col("on_boundary", Unit::Dimensionless)],
    );
    let mut lower = curve(
        format!("{prefix}_lower"),
        rf_col(),
        rate_col(),
        vec![prob("eps0"), prob("eps1"), col("below_floor", Unit::Dimensionless)],
    );
    let mut indep = curve(format!("{prefix}_iid_vq"), rf_col(), rate_col(), vec![]);
    for ((rf, b), r) in grid.iter().zip(pts).zip(iid) {
        let j = b.upper_probs;
        upper.push(vec![*rf, b.rate_upper, j.q00, j.q01, j.q10, j.q11, flag(b.upper_on_boundary)]);
        lower.push(vec![*rf, b.rate_lower, b.lower_eps.eps0, b.lower_eps.eps1, flag(b.lower_fallback)]);
        indep.push(vec![*rf, r]);
    }
    Ok(vec![upper, lower, indep])
}

fn b_grid(ctx: &Ctx, default: &str) -> CliResult<Vec<f64>> {
    let g = ctx.params.grid_or("b", default)?;
    if g[0] < 0.0 {
        return Err(config_err("feedback grid 'b' must be >= 0"));
    }
    Ok(g)
}

pub fn rayleigh_vq(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = ctx.system(500, 20.0, 0.0)?;
    let grid = b_grid(ctx, "0:500:10")?;
    let mut tables = vec![rayleigh_vq_curve(ctx, "rayleigh_vq", &sys, &grid)?];
    match ctx.params.str_or("bound", "none") {
        "none" => {}
        "variable" => tables.push(rayleigh_bound_curve(ctx, "rayleigh_vq_lower_variable", &sys, &grid, BoundScheme::Variable)?),
        "fixed" => tables.push(rayleigh_bound_curve(ctx, "rayleigh_vq_lower_fixed", &sys, &grid, BoundScheme::Fixed)?),
        other => return Err(config_err(format!("unknown bound '{other}' (none, variable, fixed)"))),
    }
    Ok(tables)
}

fn policy_columns() -> Vec<Column> {
    vec![
        col("p", Unit::Fraction),
        col("t", Unit::Gain),
        col("q", Unit::Probability),
        col("eps0", Unit::Probability),
        col("eps1", Unit::Probability),
        col("feedback_used", Unit::BitsPerBlock),
    ]
}

pub fn rayleigh_vq_curve(ctx: &Ctx, name: &str, sys: &RayleighSystem, grid: &[f64]) -> CliResult<Table> {
    let n = sys.n as f64;
    let pts = ctx.sweep("b", grid, |b| vq_optimize(sys, b / n))?;
    let mut t = curve(name, b_col(), rate_col(), policy_columns());
    for (b, pol) in grid.iter().zip(pts) {
        t.push(vec![*b, pol.forward_rate, pol.p, pol.t, pol.q, pol.eps.eps0, pol.eps.eps1, pol.feedback_rate * n]);
    }
    Ok(t)
}

pub fn rayleigh_bound_curve(ctx: &mut Ctx, name: &str, sys: &RayleighSystem, grid: &[f64], scheme: BoundScheme) -> CliResult<Table> {
    let n = sys.n as f64;
    let pts = ctx.sweep_defined(name, "b", grid, |b| vq_lower_bound(sys, b / n, scheme))?;
    let mut t = curve(name, b_col(), col("rate_lower", Unit::BitsPerSubchannelUse), policy_columns());
    for (b, pol) in pts {
        t.push(vec![b, pol.forward_rate, pol.p, pol.t, pol.q, pol.eps.eps0, pol.eps.eps1, pol.feedback_rate * n]);
    }
    Ok(t)
}

pub fn rayleigh_lsc(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = ctx.system(500, 20.0, 0.0)?;
    let grid = b_grid(ctx, "0:500:10")?;
    Ok(vec![rayleigh_lsc_curve(ctx, "rayleigh_lsc", &sys, &grid)?])
}

pub fn rayleigh_lsc_curve(ctx: &Ctx, name: &str, sys: &RayleighSystem, grid: &[f64]) -> CliResult<Table> {
    let n = sys.n as f64;
    let pts = ctx.sweep("b", grid, |b| lsc_threshold_rate(sys, b))?;
    let mut t = curve(name, b_col(), rate_col(), vec![col("t", Unit::Gain), col("q", Unit::Probability), col("feedback_used", Unit::BitsPerBlock)]);
    for (b, pol) in grid.iter().zip(pts) {
        t.push(vec![*b, pol.forward_rate, pol.t, pol.q, pol.feedback_rate * n]);
    }
    Ok(t)
}

fn group_fn(mode: &str) -> CliResult<fn(&RayleighSystem, f64) -> csflab_core::Result<GroupPolicy>> {
    match mode {
        "continuous" => Ok(group_optimize_continuous),
        "integer" => Ok(group_optimize),
        "divisor" => Ok(group_optimize_divisor),
        other => Err(config_err(format!("unknown m-mode '{other}' (continuous, integer, divisor)"))),
    }
}

pub fn rayleigh_group(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = ctx.system(500, 20.0, 0.0)?;
    let grid = b_grid(ctx, "10:500:10")?;
    let mode = ctx.params.str_or("m-mode", "integer").to_string();
    group_tables(ctx, "rayleigh_group", &sys, &grid, &mode)
}

pub fn group_curve(ctx: &Ctx, name: &str, sys: &RayleighSystem, grid: &[f64], mode: &str) -> CliResult<Table> {
    let f = group_fn(mode)?;
    let pts = ctx.sweep("b", grid, |b| f(sys, b))?;
    let mut t = curve(
        name,
        b_col(),
        rate_col(),
        vec![
            col("total_rate", Unit::BitsPerUse),
            col("m", Unit::Count),
            col("t", Unit::Gain),
            col("feedback_used", Unit::BitsPerBlock),
            col("budget_binding", Unit::Dimensionless),
        ],
    );
    for (b, g) in grid.iter().zip(pts) {
        t.push(vec![*b, g.forward_rate, g.total_rate, g.m, g.t, g.feedback_bits, flag(g.constrained)]);
    }
    Ok(t)
}

pub fn group_tables(ctx: &Ctx, prefix: &str, sys: &RayleighSystem, grid: &[f64], mode: &str) -> CliResult<Vec<Table>> {
    // Group loading needs a positive budget.
    let positive: Vec<f64> = grid.iter().copied().filter(|b| *b > 0.0).collect();
    let numeric = group_curve(ctx, prefix, sys, &positive, mode)?;
    let pts = ctx.sweep("b", &positive, |b| group_asymptotic(sys, b))?;
    let n = sys.n as f64;
    let mut asym = curve(
        format!("{prefix}_asymptotic"),
        b_col(),
        rate_col(),
        vec![
            col("total_rate", Unit::BitsPerUse),
            col("total_rate_formula", Unit::BitsPerUse),
            col("m", Unit::Count),
            col("t", Unit::Gain),
            col("feedback_used", Unit::BitsPerBlock),
            col("regime", Unit::Dimensionless),
            col("b1", Unit::BitsPerBlock),
            col("bmax", Unit::BitsPerBlock),
        ],
    );
    for (b, s) in positive.iter().zip(pts) {
        let regime = match s.regime.regime {
            Regime::Low => 0.0,
            Regime::Mid => 1.0,
            Regime::Saturated => 2.0,
        };
        asym.push(vec![
            *b,
            s.c_star / n,
            s.c_star,
            s.c_formula,
            s.m_star,
            s.t_star,
            s.feedback_bits,
            regime,
            s.regime.b1,
            s.regime.bmax,
        ]);
    }
    Ok(vec![numeric, asym])
}

pub fn rayleigh_corr(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = ctx.system(500, 20.0, 0.6)?;
    let grid = b_grid(ctx, "20:500:20")?;
    corr_tables(ctx, "corr", &sys, &grid)
}

pub fn corr_tables(ctx: &Ctx, prefix: &str, sys: &RayleighSystem, grid: &[f64]) -> CliResult<Vec<Table>> {
    let n = sys.n as f64;
    let vq = ctx.sweep("b", grid, |b| ar1_achievable_rate(sys, b / n))?;
    let lsc = ctx.sweep("b", grid, |b| lsc_markov_rate(sys, b))?;
    let mut a = curve(format!("{prefix}_vq"), b_col(), rate_col(), policy_columns());
    for (b, pol) in grid.iter().zip(vq) {
        a.push(vec![*b, pol.forward_rate, pol.p, pol.t, pol.q, pol.eps.eps0, pol.eps.eps1, pol.feedback_rate * n]);
    }
    let mut l = curve(format!("{prefix}_lsc"), b_col(), rate_col(), vec![col("t", Unit::Gain), col("feedback_used", Unit::BitsPerBlock)]);
    for (b, pol) in grid.iter().zip(lsc) {
        l.push(vec![*b, pol.forward_rate, pol.t, pol.feedback_rate * n]);
    }
    Ok(vec![a, l])
}

pub fn waterfill(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = ctx.system(500, 20.0, 0.0)?;
    let samples = ctx.params.u64_or("samples", 100_000)?;
    Ok(vec![waterfill_table(ctx, "waterfill", &sys, samples)?])
}

pub fn waterfill_table(ctx: &Ctx, name: &str, sys: &RayleighSystem, samples: u64) -> CliResult<Table> {
    let r = ctx.pool.install(|| waterfilling_reference(sys, samples, ctx.seed)).map_err(at("water-filling reference"))?;
    let mut t = Table::new(
        name,
        vec![
            col("n", Unit::Count),
            col("snr", Unit::Dimensionless),
            col("alpha", Unit::Dimensionless),
            col("total", Unit::BitsPerUse),
            col("total_std_error", Unit::BitsPerUse),
            col("per_subchannel", Unit::BitsPerSubchannelUse),
            col("per_subchannel_std_error", Unit::BitsPerSubchannelUse),
            col("samples", Unit::Count),
        ],
    );
    t.push(vec![
        sys.n as f64,
        sys.snr,
        sys.alpha,
        r.total,
        r.total_std_error,
        r.per_subchannel,
        r.per_subchannel_std_error,
        r.samples as f64,
    ]);
    Ok(t)
}

pub fn sim_fixed(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let params = ctx.two_state((0.3, 0.25, 3.0, 0.0))?;
    let n = ctx.params.u64_or("n", 16)? as usize;
    let sizes = ctx.params.grid_or("m-words", "1,4,16,64,256,1024")?;
    let trials = ctx.params.u64_or("trials", 10_000)?;
    if sizes.iter().any(|m| *m < 1.0 || m.fract() != 0.0) {
        return Err(config_err("'m-words' must hold positive integers"));
    }
    let active = (params.p * n as f64).round().max(1.0);
    let p_eff = active / n as f64;
    let seed = ctx.seed;
    let runs = ctx.sweep("m-words", &sizes, |m| simulate_fixed(&params, n, m as usize, trials, seed))?;
    let mut t = Table::new(
        "sim_fixed",
        vec![
            col("m_words", Unit::Count),
            col("feedback", Unit::BitsPerBlock),
            col("distortion", Unit::Fraction),
            col("distortion_std_error", Unit::Fraction),
            col("forward_rate", Unit::BitsPerSubchannelUse),
            col("forward_std_error", Unit::BitsPerSubchannelUse),
            col("converse", Unit::Fraction),
        ],
    );
    for (m, r) in sizes.iter().zip(runs) {
        let d = converse(params.q, p_eff, r.mean_feedback_bits / n as f64)?;
        t.push(vec![*m, r.mean_feedback_bits, r.mean_distortion, r.distortion_std_error, r.mean_forward_rate, r.forward_std_error, d]);
    }
    Ok(vec![t])
}

/// Smallest distortion any code can reach at feedback rate `rf`.
pub fn converse(q: f64, p: f64, rf: f64) -> CliResult<f64> {
    distortion_rate(q, p, rf).map_err(at(format!("converse at rf = {}", fmt_sig(rf))))
}

pub fn sim_variable(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let params = ctx.two_state((0.3, 0.3, 3.0, 0.0))?;
    let n = ctx.params.u64_or("n", 12)? as usize;
    let eps0 = ctx.params.f64_or("eps0", 0.25)?;
    // Default eps1 keeps the expected activation at p.
    let eps1 = ctx.params.f64_or("eps1", (params.p - params.q * (1.0 - eps0)) / (1.0 - params.q))?;
    let eps = CrossoverPair::new(eps0, eps1)?;
    let trials = ctx.params.u64_or("trials", 10_000)?;
    let seed = ctx.seed;
    let r = ctx.pool.install(|| simulate_variable(&params, eps, n, trials, seed)).map_err(at("variable-length simulation"))?;
    let bound = variable_rate_bound(params.q, params.p, eps, n)?;
    let d = converse(params.q, eps.activation(params.q).clamp(1e-12, 1.0), r.mean_feedback_bits / n as f64)?;
    let mut t = Table::new(
        "sim_variable",
        vec![
            col("n", Unit::Count),
            col("feedback", Unit::BitsPerBlock),
            col("feedback_std_error", Unit::BitsPerBlock),
            col("feedback_bound", Unit::BitsPerBlock),
            col("distortion", Unit::Fraction),
            col("distortion_std_error", Unit::Fraction),
            col("forward_rate", Unit::BitsPerSubchannelUse),
            col("forward_std_error", Unit::BitsPerSubchannelUse),
            col("converse", Unit::Fraction),
        ],
    );
    t.push(vec![
        n as f64,
        r.mean_feedback_bits,
        r.feedback_std_error,
        bound,
        r.mean_distortion,
        r.distortion_std_error,
        r.mean_forward_rate,
        r.forward_std_error,
        d,
    ]);
    Ok(vec![t])
}

pub fn sim_oracle(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let p = &ctx.params;
    let n = p.u64_or("n", 6)? as usize;
    let active = p.u64_or("active", 2)? as usize;
    let m = p.u64_or("m-words", 2)? as usize;
    let q = p.f64_or("q", 0.3)?;
    let result = match p.str_or("search", "auto") {
        "exhaustive" => exhaustive_codebook_oracle(n, active, m, q),
        "greedy" => greedy_codebook_oracle(n, active, m, q),
        "auto" => match exhaustive_codebook_oracle(n, active, m, q) {
            Err(Error::Budget { .. }) => {
                ctx.notes.push("exhaustive search over budget; greedy codebook reported (not exact)".into());
                greedy_codebook_oracle(n, active, m, q)
            }
            other => other,
        },
        other => return Err(config_err(format!("unknown search '{other}' (exhaustive, greedy, auto)"))),
    }
    .map_err(at("codebook search"))?;
    let d = converse(q, active as f64 / n as f64, (m as f64).log2() / n as f64)?;
    let mut t = Table::new(
        "sim_oracle",
        vec![
            col("n", Unit::Count),
            col("active", Unit::Count),
            col("m_words", Unit::Count),
            col("distortion", Unit::Fraction),
            col("exact", Unit::Dimensionless),
            col("codebooks_searched", Unit::Count),
            col("converse", Unit::Fraction),
        ],
    );
    t.push(vec![n as f64, active as f64, m as f64, result.distortion, flag(result.exact), result.codebooks_searched as f64, d]);
    Ok(vec![t])
}

pub fn unknown(path: &[&str]) -> CliError {
    config_err(format!("unknown command '{}'", path.join(" ")))
}
