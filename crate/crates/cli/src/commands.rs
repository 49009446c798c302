use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;
use rodtwin_core::coupling::{burnup_sweep, couple_rod_channel, extract_sensors, generate_dataset, Dataset, Split};
use rodtwin_core::io::{self, AppConfig};
use rodtwin_core::khnet::{reconstruct_field, train, KhModel, LrSchedule, TrainConfig, TrainHistory};
use rodtwin_core::metrics::{evaluate_fields, MetricsReport};
use rodtwin_core::thermomech::{hoop_strain_summary_with, stress_field};
use rodtwin_core::Result;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Cli, Command};

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => AppConfig::load(p)?,
        None => AppConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.training.seed = seed;
        cfg.sweep.seed = seed;
    }
    let out = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::Simulate => simulate(&cfg, &out),
        Command::Generate => generate(&cfg, cli.seed, &out),
        Command::Train { dataset } => train_cmd(&cfg, dataset, &out),
        Command::Reconstruct { model, sensors, truth } => reconstruct(&cfg, model, sensors, truth.as_deref(), &out),
        Command::Strain { field } => strain(&cfg, field, &out),
        Command::Evaluate { predicted, truth } => evaluate(&cfg, predicted, truth, cli.out_dir.as_deref()),
        Command::SweepBurnup { epochs, lr } => sweep(&cfg, *epochs, *lr, &out),
    }
}

fn create(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn simulate(cfg: &AppConfig, out: &Path) -> Result<()> {
    let pipeline = cfg.pipeline();
    pipeline.validate()?;
    let spec = cfg.case.spec()?;
    let sol = couple_rod_channel(&spec, &pipeline)?;
    let sensors = extract_sensors(
        &sol,
        &pipeline.sensors.locations(&pipeline.geometry),
        pipeline.sensors.eta,
        pipeline.sensors.t_inf,
    )?;
    create(out)?;
    io::write_field_csv(&out.join("field.csv"), &sol.field)?;
    io::write_channel_csv(&out.join("channel.csv"), &sol.channel)?;
    io::write_sensors_csv(&out.join("sensors.csv"), &sensors)?;
    let summary = json!({
        "id": spec.id,
        "peak_lhgr": spec.peak_lhgr,
        "burnup": spec.burnup,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "residuals": sol.residuals,
        "max_temperature": sol.field.max(),
        "outlet_temperature": sol.channel.t_cool.last(),
    });
    io::write_json(&out.join("summary.json"), &summary)?;
    print_json(&summary)
}

fn generate(cfg: &AppConfig, seed: Option<u64>, out: &Path) -> Result<()> {
    let mut ds = generate_dataset(&cfg.roster.specs(), &cfg.pipeline())?;
    ds.seed = seed;
    create(out)?;
    io::write_dataset(out, &ds)?;
    info!("wrote {} cases to {}", ds.cases.len(), out.display());
    print_json(&io::Manifest::of(&ds).splits)
}

#[derive(Serialize)]
struct CaseScore {
    id: String,
    split: Split,
    peak_lhgr: f64,
    burnup: f64,
    metrics: MetricsReport,
}

fn score(model: &KhModel, ds: &Dataset, split: Split) -> Result<Vec<CaseScore>> {
    ds.split(split)
        .map(|c| {
            let pred = reconstruct_field(model, &c.sensors, &c.solution.field.mesh)?;
            Ok(CaseScore {
                id: c.spec.id.clone(),
                split,
                peak_lhgr: c.spec.peak_lhgr,
                burnup: c.spec.burnup,
                metrics: evaluate_fields(&pred, &c.solution.field)?,
            })
        })
        .collect()
}

/// History summary without wall-clock fields, so reruns produce identical files.
fn history_summary(h: &TrainHistory) -> Value {
    let last = |v: &[f64]| v.last().copied();
    json!({
        "epochs": h.len(),
        "best_epoch": h.best_epoch,
        "initial_train_mse": h.initial_train_mse,
        "final_train_mse": last(&h.train_mse),
        "final_val_mse": last(&h.val_mse),
        "best_train_mse": h.train_mse.get(h.best_epoch),
        "best_val_mse": h.val_mse.get(h.best_epoch),
    })
}

fn fit(ds: &Dataset, tc: &TrainConfig, out: &Path) -> Result<(KhModel, Value)> {
    let (model, hist) = train(ds, tc)?;
    info!("trained {} epochs in {:.1} s", hist.len(), hist.wall_time_s);
    create(out)?;
    model.save(&out.join("model.json"))?;
    io::write_history_csv(&out.join("history.csv"), &hist)?;
    Ok((model, history_summary(&hist)))
}

fn train_cmd(cfg: &AppConfig, dataset: &Path, out: &Path) -> Result<()> {
    let ds = io::read_dataset(dataset)?;
    let (model, mut summary) = fit(&ds, &cfg.training, out)?;
    summary["test"] = serde_json::to_value(score(&model, &ds, Split::Test)?)?;
    io::write_json(&out.join("summary.json"), &summary)?;
    print_json(&summary)
}

fn reconstruct(cfg: &AppConfig, model: &Path, sensors: &Path, truth: Option<&Path>, out: &Path) -> Result<()> {
    let model = KhModel::load(model)?;
    let sensors = io::read_sensors_csv(sensors)?;
    let truth = truth.map(|p| io::read_field_csv(p, &cfg.geometry)).transpose()?;
    let mesh = match &truth {
        Some(t) => t.mesh.clone(),
        None => cfg.pipeline().build_mesh()?,
    };
    let field = reconstruct_field(&model, &sensors, &mesh)?;
    create(out)?;
    io::write_field_csv(&out.join("reconstructed.csv"), &field)?;
    let summary = match &truth {
        Some(t) => {
            let m = evaluate_fields(&field, t)?;
            io::write_json(&out.join("metrics.json"), &m)?;
            serde_json::to_value(m)?
        }
        None => json!({ "nodes": field.values.len(), "max_temperature": field.max() }),
    };
    print_json(&summary)
}

fn strain(cfg: &AppConfig, field: &Path, out: &Path) -> Result<()> {
    let field = io::read_field_csv(field, &cfg.geometry)?;
    let tm = &cfg.thermomech;
    let report = hoop_strain_summary_with(&field, &cfg.materials, tm)?;
    info!("strain summary in {:.3} s", report.run_time_s);
    let stress = stress_field(&field, tm.gap_pressure, tm.coolant_pressure, &cfg.materials)?;
    create(out)?;
    io::write_stress_csv(&out.join("stress.csv"), &stress)?;
    let mut v = serde_json::to_value(&report)?;
    if let Value::Object(m) = &mut v {
        m.remove("run_time_s");
    }
    io::write_json(&out.join("strain.json"), &v)?;
    print_json(&v)
}

fn evaluate(cfg: &AppConfig, predicted: &Path, truth: &Path, out: Option<&Path>) -> Result<()> {
    let p = io::read_field_csv(predicted, &cfg.geometry)?;
    let t = io::read_field_csv(truth, &cfg.geometry)?;
    let m = evaluate_fields(&p, &t)?;
    if let Some(dir) = out {
        create(dir)?;
        io::write_json(&dir.join("metrics.json"), &m)?;
    }
    print_json(&m)
}

#[derive(Serialize)]
struct SweepRow {
    id: String,
    split: Split,
    burnup: f64,
    r_squared: f64,
    nl2: f64,
}

fn sweep(cfg: &AppConfig, epochs: usize, lr: f64, out: &Path) -> Result<()> {
    let ds = burnup_sweep(&cfg.sweep, &cfg.pipeline())?;
    create(out)?;
    io::write_dataset(&out.join("dataset"), &ds)?;
    let tc = TrainConfig {
        epochs,
        schedule: LrSchedule::constant(lr),
        ..cfg.training.clone()
    };
    let (model, mut summary) = fit(&ds, &tc, out)?;
    let scores = score(&model, &ds, Split::Test)?;
    let mut w = csv::Writer::from_path(out.join("sweep.csv"))?;
    for s in &scores {
        w.serialize(SweepRow {
            id: s.id.clone(),
            split: s.split,
            burnup: s.burnup,
            r_squared: s.metrics.r_squared,
            nl2: s.metrics.nl2,
        })?;
    }
    w.flush()?;
    let r2: Vec<f64> = scores.iter().map(|s| s.metrics.r_squared).collect();
    summary["test_cases"] = json!(scores.len());
    summary["mean_test_r_squared"] = json!(r2.iter().sum::<f64>() / r2.len() as f64);
    summary["min_test_r_squared"] = json!(r2.iter().copied().fold(f64::INFINITY, f64::min));
    summary["max_test_nl2"] = json!(scores.iter().map(|s| s.metrics.nl2).fold(0.0, f64::max));
    io::write_json(&out.join("summary.json"), &summary)?;
    print_json(&summary)
}
