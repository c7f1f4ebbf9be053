//! One handler per subcommand; every handler writes its fixed-schema CSV and
//! (with `--format json`) a JSON mirror.

use std::path::Path;

use levelcross::bounds::{
    alpha_interval, feasible_p_max, moment_bound_ball, moment_bound_interval,
    moment_bound_sphere, series_d, series_e, BoundParams, MomentOrder,
};
use levelcross::crossings::count_crossings;
use levelcross::diagnostics::{
    check_density_condition, check_density_condition_radial, check_shotnoise_h2, crossing_counts,
    tail_index, CountingParams, DensityKind,
};
use levelcross::exec::replicate_map;
use levelcross::geometry::{
    estimate_level_measure_ball, estimate_level_measure_sphere, estimate_measure_pth_moment,
    CroftonPlan,
};
use levelcross::kacrice::{estimate_r_profile, verify_kac_rice, KacParams, DEFAULT_DELTAS};
use levelcross::rng::mix64;
use levelcross::simulate::{
    draw_trajectory, sample_field, FieldHandle, Grid, PathSample, ProcessSpec,
};
use levelcross::stats::estimate_pth_moment;

use crate::config::Config;
use crate::error::CliError;
use crate::output::{csv_body, fmt_real, OutDir};
use crate::specs::{build_impulse, build_kernel, build_spec, spec_id, AnySpec};

pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub out: &'a OutDir,
    pub master_seed: u64,
    pub json_mirror: bool,
}

impl Ctx<'_> {
    fn write_table(&self, name: &str, header: &str, rows: &[Vec<String>]) -> Result<(), CliError> {
        self.out.write(name, &csv_body(header, rows))?;
        if self.json_mirror {
            let cols: Vec<&str> = header.split(',').collect();
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let map: serde_json::Map<String, serde_json::Value> = cols
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), serde_json::Value::String(v.clone())))
                        .collect();
                    serde_json::Value::Object(map)
                })
                .collect();
            let json_name = name.replace(".csv", ".json");
            self.out
                .write(&json_name, &serde_json::to_string_pretty(&objs).unwrap())?;
        }
        Ok(())
    }
}

pub fn dispatch(command: &str, ctx: &Ctx) -> Result<(), CliError> {
    match command {
        "bound" => run_bound(ctx),
        "simulate" => run_simulate(ctx),
        "count" => run_count(ctx),
        "moments" => run_moments(ctx),
        "crofton" => run_crofton(ctx),
        "kacrice" => run_kacrice(ctx),
        "diagnose" => run_diagnose(ctx),
        "report" => run_report(ctx),
        other => Err(CliError::Config(format!(
            "key 'command': unknown command '{other}'"
        ))),
    }
}

fn parse_moment_order(cfg: &Config) -> Result<MomentOrder, CliError> {
    let raw = cfg.require("bound.m")?;
    if raw == "inf" {
        Ok(MomentOrder::Infinite)
    } else {
        raw.parse::<u32>()
            .map(MomentOrder::Finite)
            .map_err(|_| CliError::Config(format!("key 'bound.m': expected integer or 'inf', got '{raw}'")))
    }
}

const BOUNDS_HEADER: &str = "k,h,m,p,alpha,E_value,D_value,bound";

fn run_bound(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let k = cfg.require_u64("bound.k")? as u32;
    let h = cfg.require_u64("bound.h")? as u32;
    let m = parse_moment_order(cfg)?;
    let tol = cfg.f64_or("bound.tol", 1e-9)?;

    let p_max = feasible_p_max(k, h, m)?;
    match p_max {
        Some(p) => println!("max feasible p for (k={k}, h={h}, m={m}): {p}"),
        None => println!("no feasible p for (k={k}, h={h}, m={m})"),
    }

    let p = match cfg.get_u64("bound.p")? {
        Some(p) => p as u32,
        None => {
            // Pure feasibility query.
            cfg.get("bound.c");
            cfg.get("bound.d_m");
            cfg.get("bound.alpha");
            cfg.get("bound.domain");
            cfg.get("bound.size");
            cfg.get("bound.d");
            return Ok(());
        }
    };
    // Window check first: an empty window is the infeasibility exit.
    let (lo, hi) = alpha_interval(k, h, m, p)?;
    println!("alpha window for p = {p}: ({lo}, {hi})");

    let c = cfg.get_f64("bound.c")?;
    let d_m = cfg.get_f64("bound.d_m")?;
    let (c, d_m) = match (c, d_m) {
        (Some(c), Some(d_m)) => (c, d_m),
        _ => {
            cfg.get("bound.alpha");
            cfg.get("bound.domain");
            cfg.get("bound.size");
            cfg.get("bound.d");
            return Ok(()); // feasibility-only run: no constants, no CSV
        }
    };
    let m_finite = match m {
        MomentOrder::Finite(mv) => mv,
        MomentOrder::Infinite => {
            return Err(CliError::Config(
                "key 'bound.m': the explicit bound needs a finite m".into(),
            ))
        }
    };
    let alpha = match cfg.get_f64("bound.alpha")? {
        Some(a) => a,
        None => 0.5 * (lo + hi),
    };
    let params = BoundParams {
        k,
        h,
        m,
        p,
        c,
        d_m,
        domain_size: cfg.f64_or("bound.size", 1.0)?,
        alpha: Some(alpha),
    };
    let domain = cfg.get("bound.domain").unwrap_or_else(|| "interval".into());
    let bound = match domain.as_str() {
        "interval" => moment_bound_interval(&params, tol)?,
        "ball" => {
            let d = cfg.require_u64("bound.d")? as u32;
            moment_bound_ball(&params, d, params.domain_size, tol)?
        }
        "sphere" => {
            let d = cfg.require_u64("bound.d")? as u32;
            moment_bound_sphere(&params, d, tol)?
        }
        other => {
            return Err(CliError::Config(format!(
                "key 'bound.domain': expected interval|ball|sphere, got '{other}'"
            )))
        }
    };
    let e = series_e(alpha, k, m_finite, p, tol)?;
    let d_series = series_d(alpha, k, h, p, tol)?;
    println!("bound = {bound}");
    let row = vec![
        k.to_string(),
        h.to_string(),
        m.to_string(),
        p.to_string(),
        fmt_real(alpha),
        fmt_real(e.value + e.tail_bound),
        fmt_real(d_series.value + d_series.tail_bound),
        fmt_real(bound),
    ];
    ctx.write_table("bounds.csv", BOUNDS_HEADER, &[row])
}

fn path_spec(ctx: &Ctx) -> Result<ProcessSpec, CliError> {
    match build_spec(ctx.cfg)? {
        AnySpec::Path(spec) => Ok(spec),
        AnySpec::Field(_) => Err(CliError::Config(
            "key 'process.kind': this command needs a path process, not a field".into(),
        )),
    }
}

fn interval(cfg: &Config) -> Result<(f64, f64), CliError> {
    let lo = cfg.f64_or("interval.lo", 0.0)?;
    let hi = cfg.f64_or("interval.hi", 2.0 * std::f64::consts::PI)?;
    if hi <= lo {
        return Err(CliError::Config("key 'interval.hi': must exceed interval.lo".into()));
    }
    Ok((lo, hi))
}

fn counting_params(cfg: &Config) -> Result<CountingParams, CliError> {
    Ok(CountingParams {
        interval: interval(cfg)?,
        base_step: cfg.f64_or("count.base_step", 0.01)?,
        refine_tol: cfg.f64_or("count.refine_tol", 1e-9)?,
    })
}

fn run_simulate(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = path_spec(ctx)?;
    let iv = interval(cfg)?;
    let n = cfg.u64_or("grid.n", 1001)? as usize;
    let order = cfg.u64_or("grid.order", 1)? as u32;
    let replicates = cfg.u64_or("replicates", 1)? as usize;
    let grid = Grid::new(iv.0, iv.1, n.max(2));

    for r in 0..replicates {
        let seed = mix64(ctx.master_seed, r as u64);
        let traj = draw_trajectory(&spec, iv, order, seed)?;
        let sample = PathSample::from_trajectory(traj.as_ref(), &grid, order, seed, 0.0);
        let mut header = String::from("t,x");
        for j in 1..=order {
            header.push_str(&format!(",dx{j}"));
        }
        let rows: Vec<Vec<String>> = (0..grid.n)
            .map(|i| {
                let mut row = vec![fmt_real(grid.point(i))];
                for j in 0..=order as usize {
                    row.push(fmt_real(sample.derivatives[j][i]));
                }
                row
            })
            .collect();
        ctx.write_table(&format!("path_{r:04}.csv"), &header, &rows)?;
    }
    Ok(())
}

const COUNTS_HEADER: &str = "spec_id,u,replicate,count,undercount";

fn run_count(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = path_spec(ctx)?;
    let id = spec_id(cfg)?;
    let params = counting_params(cfg)?;
    let u = cfg.f64_or("count.u", 0.0)?;
    let replicates = cfg.u64_or("replicates", 1000)? as usize;

    let results = replicate_map(replicates, ctx.master_seed, |_i, seed| {
        draw_trajectory(&spec, params.interval, 1, seed).map(|traj| {
            let cc = count_crossings(
                traj.as_ref(),
                params.interval,
                u,
                params.base_step,
                params.refine_tol,
            );
            (cc.count, cc.undercount_flag)
        })
    });
    let mut rows = Vec::with_capacity(replicates);
    for (r, res) in results.into_iter().enumerate() {
        let (count, flag) = res?;
        rows.push(vec![
            id.clone(),
            fmt_real(u),
            r.to_string(),
            count.to_string(),
            (flag as u8).to_string(),
        ]);
    }
    ctx.write_table("counts.csv", COUNTS_HEADER, &rows)
}

const MOMENTS_HEADER: &str = "spec_id,u,p,n,estimate,stderr,ci_low,ci_high";

fn run_moments(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = path_spec(ctx)?;
    let id = spec_id(cfg)?;
    let params = counting_params(cfg)?;
    let u = cfg.f64_or("count.u", 0.0)?;
    let p_list = cfg
        .u32_list("moments.p_list")?
        .unwrap_or_else(|| vec![1]);
    let replicates = cfg.u64_or("moments.replicates", 10_000)? as usize;

    let counts = crossing_counts(&spec, u, replicates, ctx.master_seed, &params)?;
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let mut rows = Vec::new();
    for &p in &p_list {
        let est = estimate_pth_moment(&values, p, mix64(ctx.master_seed, 0xC0DE + p as u64));
        rows.push(vec![
            id.clone(),
            fmt_real(u),
            p.to_string(),
            est.n.to_string(),
            fmt_real(est.point_estimate),
            fmt_real(est.std_error),
            fmt_real(est.ci_low),
            fmt_real(est.ci_high),
        ]);
    }
    ctx.write_table("moments.csv", MOMENTS_HEADER, &rows)?;

    // Optional bound block: one bounds.csv row per requested p.
    if cfg.get("bound.k").is_some() {
        let k = cfg.require_u64("bound.k")? as u32;
        let h = cfg.require_u64("bound.h")? as u32;
        let m = parse_moment_order(cfg)?;
        let tol = cfg.f64_or("bound.tol", 1e-9)?;
        let c = cfg.require_f64("bound.c")?;
        let d_m = cfg.require_f64("bound.d_m")?;
        let size = cfg.f64_or("bound.size", params.interval.1 - params.interval.0)?;
        let m_finite = match m {
            MomentOrder::Finite(mv) => mv,
            MomentOrder::Infinite => {
                return Err(CliError::Config(
                    "key 'bound.m': the explicit bound needs a finite m".into(),
                ))
            }
        };
        let mut bound_rows = Vec::new();
        for &p in &p_list {
            let (lo, hi) = alpha_interval(k, h, m, p)?;
            let alpha = cfg.get_f64("bound.alpha")?.unwrap_or(0.5 * (lo + hi));
            let bparams = BoundParams {
                k,
                h,
                m,
                p,
                c,
                d_m,
                domain_size: size,
                alpha: Some(alpha),
            };
            let bound = moment_bound_interval(&bparams, tol)?;
            let e = series_e(alpha, k, m_finite, p, tol)?;
            let d_series = series_d(alpha, k, h, p, tol)?;
            bound_rows.push(vec![
                k.to_string(),
                h.to_string(),
                m.to_string(),
                p.to_string(),
                fmt_real(alpha),
                fmt_real(e.value + e.tail_bound),
                fmt_real(d_series.value + d_series.tail_bound),
                fmt_real(bound),
            ]);
        }
        ctx.write_table("bounds.csv", BOUNDS_HEADER, &bound_rows)?;
    }
    Ok(())
}

const CROFTON_HEADER: &str = "spec_id,u,n_probes,estimate,stderr,ci_low,ci_high,degenerate_probes";

fn run_crofton(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let field_spec = match build_spec(cfg)? {
        AnySpec::Field(f) => f,
        AnySpec::Path(_) => {
            return Err(CliError::Config(
                "key 'process.kind': the crofton command needs a field".into(),
            ))
        }
    };
    let id = spec_id(cfg)?;
    let u = cfg.f64_or("crofton.u", 0.0)?;
    let n_probes = cfg.u64_or("crofton.n_probes", 10_000)? as usize;
    let p = cfg.u64_or("crofton.p", 1)? as u32;
    let n_fields = cfg.u64_or("crofton.n_fields", 1)? as usize;
    let plan = CroftonPlan {
        n_probes,
        seed: ctx.master_seed,
        base_step: cfg.f64_or("crofton.base_step", 0.01)?,
        refine_tol: cfg.f64_or("crofton.refine_tol", 1e-9)?,
    };

    let (est, degenerate) = if p == 1 && n_fields == 1 {
        let handle = sample_field(&field_spec, mix64(ctx.master_seed, 0));
        let inner = CroftonPlan {
            seed: mix64(ctx.master_seed, 1),
            ..plan
        };
        let ce = match &handle {
            FieldHandle::Ball { field, radius, .. } => {
                estimate_level_measure_ball(field.as_ref(), u, *radius, &inner)
            }
            FieldHandle::Sphere { field, .. } => {
                estimate_level_measure_sphere(field.as_ref(), u, &inner)
            }
        };
        (ce.estimate, ce.degenerate_probes)
    } else {
        let me = estimate_measure_pth_moment(&field_spec, u, p, n_fields, &plan);
        if me.inner_noise_warning {
            eprintln!("warning: inner Crofton relative error above 10%; increase crofton.n_probes");
        }
        (me.moment, me.degenerate_probes)
    };
    let row = vec![
        id,
        fmt_real(u),
        n_probes.to_string(),
        fmt_real(est.point_estimate),
        fmt_real(est.std_error),
        fmt_real(est.ci_low),
        fmt_real(est.ci_high),
        degenerate.to_string(),
    ];
    ctx.write_table("crofton.csv", CROFTON_HEADER, &[row])
}

const KACRICE_HEADER: &str = "spec_id,u,delta,mean,stderr";

fn run_kacrice(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = path_spec(ctx)?;
    let id = spec_id(cfg)?;
    let u = cfg.f64_or("kacrice.u", 0.0)?;
    let deltas = cfg
        .f64_list("kacrice.deltas")?
        .unwrap_or_else(|| DEFAULT_DELTAS.to_vec());
    let replicates = cfg.u64_or("kacrice.replicates", 1000)? as usize;
    let params = KacParams {
        interval: interval(cfg)?,
        base_step: cfg.f64_or("count.base_step", 0.01)?,
        refine_tol: cfg.f64_or("count.refine_tol", 1e-9)?,
        quad_step_fraction: cfg.f64_or("kacrice.quad_step_fraction", 0.125)?,
    };
    let mut report = verify_kac_rice(&spec, u, &deltas, replicates, ctx.master_seed, &params)?;

    if cfg.bool_or("kacrice.profile", false)? {
        let epsilon = cfg.f64_or("kacrice.epsilon", 0.5)?;
        let levels = cfg.u64_or("kacrice.levels", 5)? as usize;
        let delta = cfg.f64_or(
            "kacrice.profile_delta",
            epsilon / (2.0 * levels as f64),
        )?;
        let profile = estimate_r_profile(
            &spec,
            u,
            epsilon,
            levels,
            delta,
            replicates,
            mix64(ctx.master_seed, 0x9f0f),
            &params,
        )?;
        report.r_profile = Some(profile.levels.clone());
    }

    let rows: Vec<Vec<String>> = report
        .deltas
        .iter()
        .zip(&report.kac_estimates)
        .map(|(delta, est)| {
            vec![
                id.clone(),
                fmt_real(u),
                fmt_real(*delta),
                fmt_real(est.point_estimate),
                fmt_real(est.std_error),
            ]
        })
        .collect();
    ctx.write_table("kacrice.csv", KACRICE_HEADER, &rows)?;
    self::write_json(ctx, "kacrice.json", &report)
}

fn write_json<T: serde::Serialize>(ctx: &Ctx, name: &str, value: &T) -> Result<(), CliError> {
    ctx.out
        .write(name, &serde_json::to_string_pretty(value).unwrap())?;
    Ok(())
}

fn run_diagnose(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let check = cfg.require("diagnose.check")?;
    match check.as_str() {
        "h2" => {
            let kernel = build_kernel(cfg)?;
            let k = cfg.u64_or("diagnose.k", 1)? as u32;
            let n_max = cfg.u64_or("diagnose.n_max", 50)? as u32;
            let report = check_shotnoise_h2(&kernel, k, n_max);
            write_json(ctx, "diagnostics.json", &vec![report])
        }
        "density_a" | "density_b1" | "density_b2" => {
            let kind = match check.as_str() {
                "density_a" => DensityKind::A,
                "density_b1" => DensityKind::B1,
                _ => DensityKind::B2,
            };
            let kernel = build_kernel(cfg)?;
            let impulse = build_impulse(cfg)?;
            let lambda = cfg.require_f64("process.lambda")?;
            let report = check_density_condition(kind, &kernel, lambda, &impulse)?;
            write_json(ctx, "diagnostics.json", &vec![report])
        }
        "density_radial" => {
            let d = cfg.require_u64("diagnose.d")? as u32;
            let q = cfg.u64_or("diagnose.q", 1)? as u32;
            let lambda = cfg.require_f64("process.lambda")?;
            let report = check_density_condition_radial(d, q, lambda);
            write_json(ctx, "diagnostics.json", &vec![report])
        }
        "tail" => {
            let spec = path_spec(ctx)?;
            let params = counting_params(cfg)?;
            let u = cfg.f64_or("count.u", 0.0)?;
            let replicates = cfg.u64_or("diagnose.replicates", 100_000)? as usize;
            let top = cfg.f64_or("diagnose.top_fraction", 0.05)?;
            let counts = crossing_counts(&spec, u, replicates, ctx.master_seed, &params)?;
            let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            let report = tail_index(&values, top)?;
            write_json(ctx, "diagnostics.json", &report)
        }
        other => Err(CliError::Config(format!(
            "key 'diagnose.check': unknown check '{other}'"
        ))),
    }
}

const REPORT_HEADER: &str = "spec_id,u,p,n,estimate,stderr,ci_low,ci_high,bound,satisfied";

fn run_report(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let inputs = cfg.require("report.inputs")?;
    let dirs: Vec<&str> = inputs
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();

    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for dir in dirs {
        let dir = Path::new(dir);
        let manifest_path = dir.join("manifest.json");
        let manifest_text = std::fs::read_to_string(&manifest_path).map_err(|_| {
            CliError::Config(format!(
                "manifest mismatch: missing {}",
                manifest_path.display()
            ))
        })?;
        let manifest: serde_json::Value = serde_json::from_str(&manifest_text)
            .map_err(|_| CliError::Config("manifest mismatch: unparseable manifest.json".into()))?;
        if manifest.get("tool").and_then(|t| t.as_str()) != Some("levelcross") {
            return Err(CliError::Config(format!(
                "manifest mismatch: {} was not produced by this toolkit",
                manifest_path.display()
            )));
        }

        // Bounds per moment order, when the run produced them.
        let mut bounds = std::collections::BTreeMap::new();
        if let Ok(text) = std::fs::read_to_string(dir.join("bounds.csv")) {
            for line in text.lines().skip(1) {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() == 8 {
                    if let (Ok(p), Ok(b)) = (cols[3].parse::<u32>(), cols[7].parse::<f64>()) {
                        bounds.insert(p, b);
                    }
                }
            }
        }
        let moments_path = dir.join("moments.csv");
        let text = std::fs::read_to_string(&moments_path).map_err(|_| {
            CliError::Config(format!("missing {}", moments_path.display()))
        })?;
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(CliError::Config(format!(
                    "malformed row in {}",
                    moments_path.display()
                )));
            }
            let p: u32 = cols[2]
                .parse()
                .map_err(|_| CliError::Config("bad p column in moments.csv".into()))?;
            let ci_high: f64 = cols[7]
                .parse()
                .map_err(|_| CliError::Config("bad ci_high column in moments.csv".into()))?;
            let bound = bounds.get(&p).copied().unwrap_or(f64::INFINITY);
            let satisfied = ci_high <= bound;
            let mut row: Vec<String> = cols.iter().map(|s| s.to_string()).collect();
            row.push(fmt_real(bound));
            row.push((satisfied as u8).to_string());
            json_rows.push(serde_json::json!({
                "spec_id": cols[0],
                "u": cols[1],
                "p": p,
                "estimate": cols[4],
                "ci_low": cols[6],
                "ci_high": cols[7],
                "bound": if bound.is_finite() { serde_json::json!(bound) } else { serde_json::json!("inf") },
                "satisfied": satisfied,
            }));
            rows.push(row);
        }
    }
    ctx.out
        .write("report.csv", &csv_body(REPORT_HEADER, &rows))?;
    write_json(ctx, "report.json", &json_rows)
}
