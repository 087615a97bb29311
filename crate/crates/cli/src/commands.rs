use std::io::Write;

use bipart_core::asymptotics::{rate_table, theorem_estimate, write_rate_csv};
use bipart_core::calibration::{calibrate, default_rel_tol};
use bipart_core::count::ln_biguint;
use bipart_core::format::sig12;
use bipart_core::gibbs::{llt_check_with_budget, SampledPartition, Sampler, SamplerSpec};
use bipart_core::series::{corollary2_coeffs, corollary3_coeffs};
use bipart_core::{CountTable, Error, PartSet, Result, Target};
use rayon::prelude::*;
use serde::Serialize;

pub fn count(out: &mut dyn Write, n1: usize, n2: usize, parts: PartSet, table: bool, budget: u64) -> Result<()> {
    let t = CountTable::build_with_budget(parts, n1, n2, budget)?;
    if table {
        t.write_csv(out)?;
    } else {
        writeln!(out, "{}", t.get(n1, n2).expect("target inside its own table"))?;
    }
    Ok(())
}

pub fn coeffs(out: &mut dyn Write, barred: bool, order: usize) -> Result<()> {
    let report = if barred { corollary3_coeffs(order)? } else { corollary2_coeffs(order)? };
    write!(out, "{report}")?;
    Ok(())
}

pub fn compare(out: &mut dyn Write, parts: PartSet, t: f64, grid: &[usize], budget: u64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("t must be positive, got {t}")));
    }
    let targets: Vec<Target> = grid
        .iter()
        .map(|&n2| Target::new((t * (n2 as f64).sqrt() + 1e-9).floor() as usize, n2))
        .collect();
    let max1 = targets.iter().map(|x| x.n1).max().unwrap_or(0);
    let max2 = targets.iter().map(|x| x.n2).max().unwrap_or(0);
    let table = CountTable::build_with_budget(parts, max1, max2, budget)?;
    let preds = targets
        .par_iter()
        .map(|&x| theorem_estimate::<f64>(x, parts).map(|e| e.log_value))
        .collect::<Result<Vec<_>>>()?;
    writeln!(out, "n2,n1,p_exact,log_pred,log_ratio")?;
    for (x, pred) in targets.iter().zip(preds) {
        let p = table.get(x.n1, x.n2).expect("target inside the table");
        writeln!(out, "{},{},{},{},{}", x.n2, x.n1, p, sig12(pred), sig12(ln_biguint(p) - pred))?;
    }
    Ok(())
}

pub fn rates(out: &mut dyn Write, t_min: f64, t_max: f64, steps: usize) -> Result<()> {
    if !(t_min > 0.0 && t_max > t_min && steps >= 2) {
        return Err(Error::Config("rate grid needs 0 < t-min < t-max and at least 2 steps".into()));
    }
    let grid: Vec<f64> = (0..steps).map(|i| t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64).collect();
    write_rate_csv(&rate_table(&grid)?, out)
}

#[derive(Serialize)]
struct SampleOutput {
    n1: usize,
    n2: usize,
    part_set: PartSet,
    alpha: f64,
    beta: f64,
    seed: u64,
    tv_budget: f64,
    replicas: Vec<SampledPartition>,
}

pub fn sample(
    out: &mut dyn Write,
    n1: usize,
    n2: usize,
    parts: PartSet,
    reps: usize,
    seed: u64,
    tv_budget: f64,
) -> Result<()> {
    let params = calibrate::<f64>(Target::new(n1, n2), parts, default_rel_tol())?.params;
    let sampler = Sampler::new(SamplerSpec::new(params, parts, tv_budget, seed)?)?;
    let doc = SampleOutput {
        n1,
        n2,
        part_set: parts,
        alpha: params.alpha(),
        beta: params.beta(),
        seed,
        tv_budget,
        replicas: sampler.replicas(reps),
    };
    serde_json::to_writer(&mut *out, &doc).map_err(|e| Error::Config(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn llt(out: &mut dyn Write, n1: usize, n2: usize, parts: PartSet, budget: u64) -> Result<()> {
    let report = llt_check_with_budget(Target::new(n1, n2), parts, budget)?;
    write_json(out, &report.summary())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Config(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}
