//! Named figure data sets: fixed parameter sets over the commands' curves.

use csflab_core::rayleigh::vq_optimize;
use csflab_core::twostate::{solve_crossover, BoundScheme};
use csflab_core::{RayleighSystem, TwoStateParams};

use crate::commands::{
    bound_curve, corr_tables, group_tables, lsc_curve, markov_tables, rayleigh_bound_curve, rayleigh_lsc_curve,
    rayleigh_vq_curve, tag, vq_curve, waterfill_table, Ctx,
};
use crate::error::{at, config_err, CliResult};
use crate::output::{curve, Column, Table, Unit};

pub const NAMES: [&str; 8] = ["bincaps", "e0e1", "rrublb", "iidraycaps", "iidthres", "map_ray", "optpara", "corrray"];

pub fn run(ctx: &mut Ctx, name: &str) -> CliResult<Vec<Table>> {
    match name {
        "bincaps" => bincaps(ctx),
        "e0e1" => e0e1(ctx),
        "rrublb" => rrublb(ctx),
        "iidraycaps" => iidraycaps(ctx),
        "iidthres" => iidthres(ctx),
        "map_ray" => map_ray(ctx),
        "optpara" => optpara(ctx),
        "corrray" => corrray(ctx),
        other => Err(config_err(format!("unknown figure '{other}' (expected one of {})", NAMES.join(", ")))),
    }
}

fn binary(ctx: &Ctx, p: f64) -> CliResult<TwoStateParams> {
    let g = &ctx.params;
    Ok(TwoStateParams::new(g.f64_or("q", 0.3)?, p, g.f64_or("c1", 3.0)?, g.f64_or("c0", 0.0)?)?)
}

fn rf_grid(ctx: &Ctx) -> CliResult<Vec<f64>> {
    ctx.params.grid_or("rf", "0:0.9:0.01")
}

fn rayleigh(ctx: &Ctx, db: f64, alpha: f64) -> CliResult<RayleighSystem> {
    let g = &ctx.params;
    Ok(RayleighSystem::new(g.u64_or("n", 500)?, g.snr_or(db)?, g.f64_or("alpha", alpha)?)?)
}

fn b_grid(ctx: &Ctx, default: &str) -> CliResult<Vec<f64>> {
    let g = ctx.params.grid_or("b", default)?;
    if g[0] < 0.0 {
        return Err(config_err("feedback grid 'b' must be >= 0"));
    }
    Ok(g)
}

fn bincaps(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let grid = rf_grid(ctx)?;
    let ps = ctx.params.list_or("p-list", &[0.2, 0.3, 0.4])?;
    let mut out = Vec::new();
    for &p in &ps {
        out.push(vq_curve(ctx, &format!("bincaps_vq_p{}", tag(p)), &binary(ctx, p)?, &grid)?);
    }
    for &p in &ps {
        out.push(lsc_curve(ctx, &format!("bincaps_lsc_p{}", tag(p)), &binary(ctx, p)?, &grid)?);
    }
    let n = ctx.params.u64_or("n", 500)?;
    let params = binary(ctx, ctx.params.f64_or("p", 0.3)?)?;
    let name = format!("bincaps_variable_n{n}_p{}", tag(params.p));
    out.push(bound_curve(ctx, &name, &params, &grid, n, BoundScheme::Variable)?);
    Ok(out)
}

fn e0e1(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let grid = rf_grid(ctx)?;
    let ps = ctx.params.list_or("p-list", &[0.3])?;
    let mut out = Vec::new();
    for p in ps {
        let params = binary(ctx, p)?;
        let q = params.q;
        let pts = ctx.sweep("rf", &grid, |rf| solve_crossover(&params, rf))?;
        let frac = |n| Column::new(n, Unit::Fraction);
        let mut t = Table::new(
            format!("e0e1_p{}", tag(p)),
            vec![
                Column::new("rf", Unit::BitsPerSubchannel),
                frac("missed"),
                frac("detected"),
                frac("misfires"),
                Column::new("eps0", Unit::Probability),
                Column::new("eps1", Unit::Probability),
            ],
        );
        for (rf, e) in grid.iter().zip(pts) {
            t.push(vec![*rf, q * e.eps0, q * (1.0 - e.eps0), (1.0 - q) * e.eps1, e.eps0, e.eps1]);
        }
        out.push(t);
    }
    Ok(out)
}

fn rrublb(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let grid = rf_grid(ctx)?;
    let qs = ctx.params.list_or("q-list", &[0.3, 0.5])?;
    let delta10 = ctx.params.f64_or("delta10", 0.3)?;
    let g = &ctx.params;
    let (p, c1, c0) = (g.f64_or("p", 0.3)?, g.f64_or("c1", 3.0)?, g.f64_or("c0", 0.0)?);
    let mut out = Vec::new();
    for q in qs {
        let params = TwoStateParams::new(q, p, c1, c0)?;
        out.extend(markov_tables(ctx, &format!("rrublb_q{}", tag(q)), &params, delta10, &grid)?);
    }
    Ok(out)
}

fn samples(ctx: &Ctx) -> CliResult<u64> {
    ctx.params.u64_or("samples", 100_000)
}

fn spread_curve(name: &str, sys: &RayleighSystem, grid: &[f64]) -> Table {
    let mut t = curve(name, Column::new("b", Unit::BitsPerBlock), Column::new("forward_rate", Unit::BitsPerSubchannelUse), vec![]);
    let r = sys.spread_rate();
    for b in grid {
        t.push(vec![*b, r]);
    }
    t
}

fn iidraycaps(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = rayleigh(ctx, 20.0, 0.0)?;
    let grid = b_grid(ctx, "0:500:10")?;
    let mut out = vec![
        rayleigh_vq_curve(ctx, "iidraycaps_vq", &sys, &grid)?,
        rayleigh_bound_curve(ctx, "iidraycaps_vq_lower_variable", &sys, &grid, BoundScheme::Variable)?,
        rayleigh_lsc_curve(ctx, "iidraycaps_lsc", &sys, &grid)?,
    ];
    out.extend(group_tables(ctx, "iidraycaps_group", &sys, &grid, "integer")?.into_iter().take(1));
    out.push(spread_curve("iidraycaps_spread", &sys, &grid));
    out.push(waterfill_table(ctx, "iidraycaps_waterfill", &sys, samples(ctx)?)?);
    Ok(out)
}

fn iidthres(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = rayleigh(ctx, 20.0, 0.0)?;
    let grid = b_grid(ctx, "0:500:10")?;
    let mut out = vec![
        rayleigh_vq_curve(ctx, "iidthres_vq", &sys, &grid)?,
        rayleigh_lsc_curve(ctx, "iidthres_lsc", &sys, &grid)?,
    ];
    out.extend(group_tables(ctx, "iidthres_group", &sys, &grid, "integer")?.into_iter().take(1));
    Ok(out)
}

fn map_ray(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = rayleigh(ctx, 20.0, 0.0)?;
    let grid = b_grid(ctx, "0:500:10")?;
    let n = sys.n as f64;
    let pts = ctx.sweep("b", &grid, |b| vq_optimize(&sys, b / n))?;
    let count = |c| Column::new(c, Unit::Count);
    let mut t = Table::new(
        "map_ray_vq",
        vec![
            Column::new("b", Unit::BitsPerBlock),
            count("good"),
            count("missed"),
            count("misfires"),
            count("active"),
            Column::new("t", Unit::Gain),
        ],
    );
    for (b, pol) in grid.iter().zip(pts) {
        t.push(vec![*b, n * pol.q, n * pol.q * pol.eps.eps0, n * (1.0 - pol.q) * pol.eps.eps1, n * pol.p, pol.t]);
    }
    Ok(vec![t])
}

fn optpara(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = rayleigh(ctx, 5.0, 0.0)?;
    let grid = b_grid(ctx, "10:500:10")?;
    let mut out = group_tables(ctx, "optpara_group", &sys, &grid, "continuous")?;
    out.push(rayleigh_lsc_curve(ctx, "optpara_single", &sys, &grid)?);
    out.push(waterfill_table(ctx, "optpara_waterfill", &sys, samples(ctx)?)?);
    Ok(out)
}

fn corrray(ctx: &mut Ctx) -> CliResult<Vec<Table>> {
    let sys = rayleigh(ctx, 20.0, 0.6)?;
    if sys.alpha <= 0.0 {
        return Err(config_err("corrray needs alpha > 0"));
    }
    let grid = b_grid(ctx, "20:500:20")?;
    let mut out = corr_tables(ctx, "corrray", &sys, &grid)?;
    let iid = RayleighSystem::independent(sys.n, sys.snr).map_err(at("independent reference"))?;
    out.push(rayleigh_vq_curve(ctx, "corrray_iid_vq", &iid, &grid)?);
    Ok(out)
}
