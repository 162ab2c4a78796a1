use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use mlpreach::oracle::ArmConfig;
use mlpreach::{
    export_tubes, forward, import_tubes, max_sensitivity, output_reach,
    read_network_file, safety_verify, sample_containment, Bound, Error, InputBox64, Mlp64,
    SafetySpec64, Verdict,
};
use serde_json::json;

use crate::failure::{exit, Failure};
use crate::Run;

const DEFAULT_SAMPLES: usize = 10_000;
const DEFAULT_ARM_GRID: usize = 21;

fn required<T: Copy>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing `{name}` (flag or config)")))
}

fn network(run: &Run) -> Result<Mlp64, Failure> {
    let path = run
        .file
        .network
        .as_deref()
        .ok_or_else(|| Failure::Usage("missing `network` (flag or config)".into()))?;
    read_network_file(path).map_err(|e| match e {
        Error::Io(io) => Failure::from_io(path, io),
        other => Failure::Usage(format!("{}: {other}", path.display())),
    })
}

fn point(run: &Run) -> Result<&[f64], Failure> {
    run.file
        .point
        .as_deref()
        .ok_or_else(|| Failure::Usage("missing `point` (flag or config)".into()))
}

fn input_set(run: &Run) -> Result<Vec<InputBox64>, Failure> {
    run.file
        .input
        .iter()
        .map(|b| {
            let pairs: Vec<(f64, f64)> = b.bounds.iter().map(|&[lo, hi]| (lo, hi)).collect();
            InputBox64::from_intervals(&pairs).map_err(Failure::from)
        })
        .collect()
}

fn spec(run: &Run) -> Result<SafetySpec64, Failure> {
    let docs = run
        .file
        .spec
        .as_ref()
        .ok_or_else(|| Failure::Usage("missing `spec` in config".into()))?;
    let bounds = docs.iter().map(|d| Bound { lower: d.min, upper: d.max }).collect();
    Ok(SafetySpec64::new(bounds)?)
}

/// Runs `body` against `--out` (buffered) or stdout.
fn with_sink(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<(), Failure>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::from_io(path, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json(run: &Run, value: &serde_json::Value) -> Result<(), Failure> {
    with_sink(run.file.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Failure::Internal(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn eval(run: &Run) -> Result<i32, Failure> {
    let net = network(run)?;
    let x = point(run)?;
    let y = forward(&net, x)?;
    emit_json(run, &json!({ "input": x, "output": y }))?;
    Ok(exit::SUCCESS)
}

pub fn sensitivity(run: &Run) -> Result<i32, Failure> {
    let net = network(run)?;
    let x = point(run)?;
    let delta = required(run.file.delta, "delta")?;
    let r = max_sensitivity(&net, x, delta)?;
    let trace: Vec<_> = r
        .layer_trace
        .iter()
        .enumerate()
        .map(|(i, t)| json!({ "layer": i + 1, "radius": t.radius, "sensitivity": t.sensitivity }))
        .collect();
    emit_json(run, &json!({ "point": x, "delta": delta, "epsilon": r.epsilon, "trace": trace }))?;
    Ok(exit::SUCCESS)
}

pub fn reach(run: &Run) -> Result<i32, Failure> {
    let net = network(run)?;
    let delta = required(run.file.delta, "delta")?;
    let est = output_reach(&net, &input_set(run)?, delta)?;
    with_sink(run.file.out.as_deref(), |w| Ok(export_tubes(&est, w)?))?;
    let summary = format!("{} tubes", est.tubes.len());
    // Keep stdout clean for the table when it is the sink.
    if run.file.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(exit::SUCCESS)
}

pub fn verify(run: &Run) -> Result<i32, Failure> {
    let net = network(run)?;
    let spec = spec(run)?;
    let delta = required(run.file.delta, "delta")?;
    let report = safety_verify(&net, &input_set(run)?, &spec, delta)?;
    let mut doc = json!({
        "verdict": report.verdict.label(),
        "delta": delta,
        "cell_count": report.cell_count,
    });
    let code = match &report.verdict {
        Verdict::Safe => exit::SUCCESS,
        Verdict::Unsafe { cell_index, input, output } => {
            doc["cell_index"] = json!(cell_index);
            doc["input"] = json!(input);
            doc["output"] = json!(output);
            exit::UNSAFE
        }
        Verdict::Uncertain { offending } => {
            doc["offending"] = json!(offending);
            exit::UNCERTAIN
        }
    };
    emit_json(run, &doc)?;
    Ok(code)
}

pub fn sample(run: &Run) -> Result<i32, Failure> {
    let net = network(run)?;
    let boxes = input_set(run)?;
    let est = match &run.file.tubes {
        Some(path) => {
            let file = File::open(path).map_err(|e| Failure::from_io(path, e))?;
            import_tubes(BufReader::new(file))?
        }
        None => output_reach(&net, &boxes, required(run.file.delta, "delta")?)?,
    };
    let n = run.file.samples.unwrap_or(DEFAULT_SAMPLES);
    let report = sample_containment(&net, &boxes, &est, n, run.file.seed.unwrap_or(0))?;
    emit_json(run, &serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?)?;
    Ok(exit::SUCCESS)
}

pub fn gen_arm_data(run: &Run) -> Result<i32, Failure> {
    let mut cfg = ArmConfig::default();
    if let Some(a) = &run.file.arm {
        cfg.link1 = a.link1.unwrap_or(cfg.link1);
        cfg.link2 = a.link2.unwrap_or(cfg.link2);
        if let Some([lo, hi]) = a.theta1_zone {
            cfg.theta1_zone = (lo, hi);
        }
        if let Some([lo, hi]) = a.theta2_zone {
            cfg.theta2_zone = (lo, hi);
        }
    }
    let grid = run.grid.unwrap_or(DEFAULT_ARM_GRID);
    let mut rows = 0;
    with_sink(run.file.out.as_deref(), |w| {
        rows = mlpreach::gen_arm_data(&cfg, grid, w)?;
        Ok(())
    })?;
    if run.file.out.is_some() {
        println!("{rows} rows");
    }
    Ok(exit::SUCCESS)
}
