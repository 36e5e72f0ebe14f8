use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum as _;
use serde_json::{json, Value};

use chhard_core::analysis::{
    average_deltas, curve_delta, gain_map, hardening_curve, order_antennas, pol_ratio_stats,
    time_freq_spread, EmpiricalCdf,
};
use chhard_core::io::export::{
    csv_field, json_number, render_cdf, render_curve, render_delta, render_map, render_surface,
    to_json_string,
};
use chhard_core::io::{load_gscm_config, read_tensor, write_atomic, write_tensor, Format};
use chhard_core::synth::seed::SeedPath;
use chhard_core::synth::{gen_gscm, gen_iid_gaussian, run_ensemble, GeneratorSpec, RunPlan};
use chhard_core::{
    build_cylindrical, geometry_for_id, normalize, std_surface, subset_gain, ArrayGeometry,
    ChannelTensor, Count, Error, GscmConfig, HardeningCurve, OrderLabel, UserPattern,
};

use crate::args::*;
use crate::manifest::Manifest;
use crate::UsageError;

/// Seed used by `reproduce` when none is given.
pub const DEFAULT_REPRODUCE_SEED: u64 = 2024;

struct Ctx {
    out_dir: PathBuf,
    format: Format,
    written: Vec<String>,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self> {
        std::fs::create_dir_all(&cli.out_dir)
            .with_context(|| format!("creating {}", cli.out_dir.display()))?;
        Ok(Self {
            out_dir: cli.out_dir.clone(),
            format: match cli.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            written: Vec::new(),
        })
    }

    fn ext(&self) -> &'static str {
        self.format.extension()
    }

    fn write(&mut self, name: &str, content: &[u8]) -> Result<()> {
        let path = self.out_dir.join(name);
        write_atomic(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn write_table(&mut self, stem: &str, content: String) -> Result<()> {
        let name = format!("{stem}.{}", self.ext());
        self.write(&name, content.as_bytes())
    }

    fn finish(self, mut manifest: Manifest) -> Result<()> {
        manifest.outputs = self.written;
        manifest
            .write(&self.out_dir)
            .with_context(|| format!("writing manifest in {}", self.out_dir.display()))
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Theory(a) => theory(cli, a),
        Command::Synth(a) => synth(cli, a),
        Command::Analyze(a) => analyze(cli, a),
        Command::Reproduce(a) => reproduce(cli, a),
    }
}

fn parse_paths(paths: &[String]) -> Result<Vec<Count>> {
    paths
        .iter()
        .map(|p| {
            p.parse::<Count>()
                .map_err(|e| UsageError(e.to_string()).into())
        })
        .collect()
}

fn write_surface(ctx: &mut Ctx, m_max: u64, paths: &[Count]) -> Result<Value> {
    if m_max == 0 || paths.is_empty() {
        return Err(UsageError("need m-max >= 1 and at least one path count".into()).into());
    }
    let antennas: Vec<Count> = (1..=m_max).map(Count::Finite).collect();
    let values = std_surface(&antennas, paths)?;
    ctx.write_table(
        "surface",
        render_surface(&antennas, paths, &values, ctx.format),
    )?;
    Ok(json!({ "m_max": m_max, "paths": paths }))
}

fn theory(cli: &Cli, a: &TheoryArgs) -> Result<()> {
    let mut ctx = Ctx::new(cli)?;
    let paths = parse_paths(&a.paths)?;
    let config = write_surface(&mut ctx, a.m_max, &paths)?;
    ctx.finish(Manifest::new("theory", cli.seed, config))
}

fn resolve_config(path: Option<&Path>) -> Result<GscmConfig> {
    Ok(match path {
        Some(p) => load_gscm_config(p)?,
        None => GscmConfig::default(),
    })
}

fn pattern_for(p: PatternArg) -> UserPattern {
    match p {
        PatternArg::Omni => UserPattern::Omni,
        PatternArg::Directive => UserPattern::directive_default(),
    }
}

fn synth(cli: &Cli, a: &SynthArgs) -> Result<()> {
    let seed = cli
        .seed
        .ok_or_else(|| UsageError("--seed is required for synth".into()))?;
    let mut ctx = Ctx::new(cli)?;
    let users = a.users.unwrap_or(1);
    let snapshots = a.snapshots.unwrap_or(300);
    let freqs = a.freqs.unwrap_or(129);
    let antennas = a.antennas.unwrap_or(128);
    let (tensor, config) = match a.model {
        Model::Gaussian => (
            gen_iid_gaussian(users, snapshots, freqs, antennas, seed)?,
            json!({ "model": "gaussian", "users": users, "snapshots": snapshots, "freqs": freqs, "antennas": antennas }),
        ),
        Model::Keyhole | Model::Scatterer => {
            let spec = if a.model == Model::Keyhole {
                GeneratorSpec::Keyhole {
                    snapshots,
                    freqs,
                    antennas,
                }
            } else {
                GeneratorSpec::Scatterer {
                    paths: a.paths,
                    geometry: geometry_for_id(&a.array)?,
                    snapshots,
                    freqs,
                }
            };
            let tensor = spec.generate(seed, users)?;
            let mut config = serde_json::to_value(&spec)?;
            config["users"] = json!(users);
            if let GeneratorSpec::Scatterer { .. } = spec {
                config["geometry"] = json!(a.array);
            }
            (tensor, config)
        }
        Model::Gscm => {
            let mut config = resolve_config(a.config.as_deref())?.with_seed(seed);
            if let Some(k) = a.users {
                config.users = k;
            }
            if let Some(n) = a.snapshots {
                config.trajectory.snapshots = n;
            }
            if let Some(f) = a.freqs {
                config.freqs = f;
            }
            config.validate()?;
            let geometry = geometry_for_id(&a.array)?;
            let tensor = gen_gscm(&config, &geometry, &pattern_for(a.pattern))?;
            ctx.write("config.toml", config.to_toml_string().as_bytes())?;
            let value = json!({
                "model": "gscm",
                "array": a.array,
                "pattern": a.pattern.to_possible_value().map(|v| v.get_name().to_string()),
                "gscm": serde_json::to_value(&config)?,
            });
            (tensor, value)
        }
    };
    let path = ctx.out_dir.join(&a.output);
    write_tensor(&tensor, &path)?;
    ctx.written.push(a.output.clone());
    if a.model != Model::Gscm {
        ctx.write("config.json", to_json_string(&config).as_bytes())?;
    }
    ctx.finish(Manifest::new("synth", Some(seed), config))
}

/// Geometry for analysis: an explicit id must resolve and match the tensor;
/// the id from the metadata is used only when it does.
fn analysis_geometry(
    tensor: &ChannelTensor,
    explicit: Option<&str>,
) -> Result<Option<ArrayGeometry>> {
    if let Some(id) = explicit {
        let g = geometry_for_id(id)?;
        if g.len() != tensor.antennas() {
            return Err(UsageError(format!(
                "array '{id}' has {} ports but the tensor has {} antennas",
                g.len(),
                tensor.antennas()
            ))
            .into());
        }
        return Ok(Some(g));
    }
    Ok(geometry_for_id(&tensor.meta().array_id)
        .ok()
        .filter(|g| g.len() == tensor.antennas()))
}

fn table_two(format: Format, names: [&str; 2], values: [f64; 2]) -> String {
    match format {
        Format::Csv => format!(
            "{},{}\n{},{}\n",
            names[0],
            names[1],
            csv_field(values[0]),
            csv_field(values[1])
        ),
        Format::Json => to_json_string(&json!({
            names[0]: json_number(values[0]),
            names[1]: json_number(values[1]),
        })),
    }
}

fn analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<()> {
    let order: OrderLabel = a
        .order
        .parse()
        .map_err(|e: Error| UsageError(e.to_string()))?;
    if order == OrderLabel::Explicit {
        return Err(
            UsageError("the explicit order needs an index list; use the library".into()).into(),
        );
    }
    let tensor =
        read_tensor(&a.tensor).with_context(|| format!("reading {}", a.tensor.display()))?;
    let geometry = analysis_geometry(&tensor, a.array.as_deref())?;
    let mut ctx = Ctx::new(cli)?;

    let selection = order_antennas(&tensor, a.user, order, geometry.as_ref())?;
    let curve = hardening_curve(&tensor, a.user, order, geometry.as_ref())?;
    let mut summary = json!({
        "tensor": a.tensor.display().to_string(),
        "user": a.user,
        "order": order.as_str(),
        "subset_size": curve.max_size(),
        "start_db": json_number(curve.reference_db()),
        "end_db": json_number(curve.at(curve.max_size())),
        "hardening_db": json_number(curve.hardening_db),
    });

    let mut outputs = a.outputs.clone();
    outputs.dedup();
    for output in outputs {
        match output {
            Output::Curve => ctx.write_table("curve", render_curve(&curve, ctx.format))?,
            Output::Cdf => {
                for (stem, size) in [("cdf_m1", 1), ("cdf", selection.len())] {
                    let block = normalize(&tensor, a.user, &selection.prefix(size)?)?;
                    let cdf = EmpiricalCdf::from_series(&subset_gain(&block))?;
                    ctx.write_table(stem, render_cdf(&cdf, ctx.format))?;
                }
            }
            Output::Map => {
                let map = gain_map(&tensor, a.user)?;
                summary["median_port"] = json!(map.median_port + 1);
                ctx.write_table("map", render_map(&map, ctx.format))?;
            }
            Output::Spread => {
                let s = time_freq_spread(&tensor, a.user, &selection)?;
                summary["spread"] = json!({ "time_db": s.time_db, "freq_db": s.freq_db });
                ctx.write_table(
                    "spread",
                    table_two(ctx.format, ["time_db", "freq_db"], [s.time_db, s.freq_db]),
                )?;
            }
            Output::Polstats => {
                let g = geometry
                    .as_ref()
                    .ok_or_else(|| Error::MissingPolarization(tensor.meta().array_id.clone()))?;
                let s = pol_ratio_stats(&tensor, a.user, g)?;
                summary["polstats"] = serde_json::to_value(s)?;
                ctx.write_table(
                    "polstats",
                    table_two(ctx.format, ["mean_db", "std_db"], [s.mean_db, s.std_db]),
                )?;
            }
        }
    }
    ctx.write("summary.json", to_json_string(&summary).as_bytes())?;
    let config = json!({
        "tensor": a.tensor.display().to_string(),
        "user": a.user,
        "order": order.as_str(),
        "array": a.array,
    });
    ctx.finish(Manifest::new("analyze", cli.seed, config))
}

fn reproduce(cli: &Cli, a: &ReproduceArgs) -> Result<()> {
    if a.runs == 0 {
        return Err(UsageError("--runs must be >= 1".into()).into());
    }
    let seed = cli.seed.unwrap_or(DEFAULT_REPRODUCE_SEED);
    let mut ctx = Ctx::new(cli)?;
    let name = a.figure.to_possible_value().unwrap().get_name().to_string();
    let (config, run_seeds, summary) = match a.figure {
        Figure::Fig5 => {
            let paths = parse_paths(&["1", "3", "10", "30", "100", "inf"].map(String::from))?;
            (
                write_surface(&mut ctx, 128, &paths)?,
                Vec::new(),
                Value::Null,
            )
        }
        Figure::Fig7 | Figure::Fig8 => {
            let base = resolve_config(a.config.as_deref())?;
            single_tensor_figure(&mut ctx, a.figure, base, seed)?
        }
        Figure::Fig14 | Figure::Fig15 => {
            let base = resolve_config(a.config.as_deref())?;
            ensemble_figure(&mut ctx, a.figure, base, seed, a.runs)?
        }
    };
    if !summary.is_null() {
        ctx.write("summary.json", to_json_string(&summary).as_bytes())?;
    }
    let mut manifest = Manifest::new(&format!("reproduce {name}"), Some(seed), config);
    manifest.run_seeds = run_seeds;
    ctx.finish(manifest)
}

fn curve_summary(curve: &HardeningCurve) -> Value {
    json!({
        "start_db": json_number(curve.reference_db()),
        "hardening_db": json_number(curve.hardening_db),
    })
}

/// `fig7` compares selection orders, `fig8` polarization subsets, both on
/// one indoor GSCM tensor for an omni user.
fn single_tensor_figure(
    ctx: &mut Ctx,
    figure: Figure,
    base: GscmConfig,
    seed: u64,
) -> Result<(Value, Vec<u64>, Value)> {
    let mut config = base.with_seed(seed);
    config.users = 1;
    let geometry = build_cylindrical();
    let tensor = gen_gscm(&config, &geometry, &UserPattern::Omni)?;
    let mut summary = json!({});
    let orders: &[OrderLabel] = if figure == Figure::Fig7 {
        let gaussian_seed = SeedPath::root(seed).child(7).value();
        let g = gen_iid_gaussian(
            1,
            config.trajectory.snapshots,
            config.freqs,
            geometry.len(),
            gaussian_seed,
        )?;
        let curve = hardening_curve(&g, 0, OrderLabel::StrongestFirst, None)?;
        ctx.write_table("gaussian", render_curve(&curve, ctx.format))?;
        summary["gaussian"] = curve_summary(&curve);
        &[
            OrderLabel::Original,
            OrderLabel::StrongestFirst,
            OrderLabel::WeakestFirst,
        ]
    } else {
        &[
            OrderLabel::VerticalOnly,
            OrderLabel::HorizontalOnly,
            OrderLabel::BothAlternating,
        ]
    };
    for &order in orders {
        let curve = hardening_curve(&tensor, 0, order, Some(&geometry))?;
        ctx.write_table(order.as_str(), render_curve(&curve, ctx.format))?;
        summary[order.as_str()] = curve_summary(&curve);
    }
    let value =
        json!({ "array": geometry.id, "pattern": "omni", "gscm": serde_json::to_value(&config)? });
    Ok((value, vec![seed], summary))
}

/// Ten-run ensembles for an omni and a rotating directive user on matched
/// seeds: `fig14` writes the averaged curves, `fig15` the averaged steps.
fn ensemble_figure(
    ctx: &mut Ctx,
    figure: Figure,
    base: GscmConfig,
    seed: u64,
    runs: usize,
) -> Result<(Value, Vec<u64>, Value)> {
    let geometry = build_cylindrical();
    let mut plan = RunPlan::new(runs, seed);
    plan.users_per_run = base.users;
    plan.order = OrderLabel::StrongestFirst;
    let mut summary = json!({});
    let mut run_seeds = Vec::new();
    for (name, pattern) in [
        ("omni", UserPattern::Omni),
        ("directive", UserPattern::directive_default()),
    ] {
        let spec = GeneratorSpec::Gscm {
            config: base.clone(),
            geometry: geometry.clone(),
            pattern,
        };
        let out = run_ensemble(&plan, &spec)?;
        if figure == Figure::Fig14 {
            ctx.write_table(name, render_curve(&out.curve, ctx.format))?;
        } else {
            let deltas = out
                .members
                .iter()
                .map(curve_delta)
                .collect::<chhard_core::Result<Vec<_>>>()?;
            let mean = average_deltas(&deltas)?;
            ctx.write_table(&format!("{name}_delta"), render_delta(&mean, ctx.format))?;
        }
        summary[name] = curve_summary(&out.curve);
        summary[name]["members"] = json!(out.members.len());
        run_seeds = out.run_seeds;
    }
    let value = json!({
        "array": geometry.id,
        "runs": runs,
        "users_per_run": plan.users_per_run,
        "order": plan.order.as_str(),
        "gscm": serde_json::to_value(&base)?,
    });
    Ok((value, run_seeds, summary))
}
