//! Dispatch from parsed arguments to library calls.

use std::path::Path;
use std::sync::Arc;

use mflab::bump::{phi_from_bump, BumpSpec};
use mflab::circle::{
    arc_table_csv, enumerate_rs, gauss_sum, kernel_piece, lambda_grid, lambda_grid_csv, major_arc_membership,
    multiplier_m, multiplier_m_grid, phi_star, ApproxParams, Assembler, GaussCache, KernelSpec, MajorArcParams,
    PhiMethod,
};
use mflab::experiments::{
    a1_reduction_experiment, decay_experiment, report, thm1_instance, thm1_scaling_experiment, A1ReductionParams,
    CoefficientMode, DecayParams, ExperimentRecord, RecordStore, Thm1Params,
};
use mflab::grid::{forward_dft, inverse_dft, GridSignal, GridSpec, Multiplier};
use mflab::multifreq::{a1_details, classical_coefficients, lemma21_check, CoefficientField, Lemma21Instance, RowWindow};
use mflab::rng::lattice_unimodular;
use mflab::variation::{greedy_jump_count, max_jump_count, variation_seminorm, variation_seminorm_exhaustive};
use mflab::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::cli::{Command, DecayKindArg, ExperimentCommand, ModeArg};
use crate::parse;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn spectrum_json(m: &Multiplier) -> Value {
    GridSignal { spec: m.spec, values: m.values.clone() }.to_json()
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::Parameter(format!("--seed is required for {what}")))
}

fn default_eps1(eps1: Option<f64>, d: u32) -> f64 {
    eps1.unwrap_or(1.0 / (10.0 * d as f64))
}

fn method(proxy_refine: Option<u32>) -> PhiMethod {
    match proxy_refine {
        Some(refine) => PhiMethod::LatticeProxy { refine },
        None => PhiMethod::Quadrature,
    }
}

fn point(text: &str, n: usize) -> Result<Vec<f64>> {
    let xi: Vec<f64> = parse::list(text, "coordinate")?;
    if xi.len() != n {
        return Err(Error::Dimension(format!("expected {n} coordinates, got {}", xi.len())));
    }
    Ok(xi)
}

fn store(records: Option<&Path>, rec: &ExperimentRecord) -> Result<Value> {
    if let Some(path) = records {
        RecordStore::new(path).append(rec)?;
    }
    Ok(serde_json::to_value(rec)?)
}

pub fn run(command: Command) -> Result<Value> {
    match command {
        Command::Variation { r, samples, series, exhaustive } => {
            let s = parse::series(samples.as_deref(), series.as_deref())?;
            let v = if exhaustive { variation_seminorm_exhaustive(&s, r)? } else { variation_seminorm(&s, r)? };
            Ok(json!(v))
        }
        Command::Jumps { lambda, samples, series } => {
            let s = parse::series(samples.as_deref(), series.as_deref())?;
            Ok(json!({ "greedy": greedy_jump_count(&s, lambda)?, "max": max_jump_count(&s, lambda)? }))
        }
        Command::Dft { input, inverse, binary_out } => {
            let signal = GridSignal::from_json(&parse::read_json(&input)?)?;
            let out = if inverse {
                inverse_dft(&Multiplier::new(signal.spec, signal.values)?)
            } else {
                let m = forward_dft(&signal);
                GridSignal { spec: m.spec, values: m.values }
            };
            if let Some(path) = binary_out {
                out.write_binary(std::io::BufWriter::new(std::fs::File::create(path)?))?;
            }
            Ok(out.to_json())
        }
        Command::GaussSum { a, q, b, d, n, budget, cache } => {
            let b: Vec<i64> = parse::list(&b, "numerator")?;
            if b.len() != n {
                return Err(Error::Dimension(format!("--b has {} entries, expected n = {n}", b.len())));
            }
            let value = match cache {
                Some(path) => {
                    let c = if path.exists() { GaussCache::load(&path)? } else { GaussCache::with_budget(budget) };
                    let v = c.get(a, &b, q, d)?;
                    c.append_to(&path)?;
                    v
                }
                None => gauss_sum(a, &b, q, d, budget)?,
            };
            Ok(complex_json(value))
        }
        Command::Arcs { lambda, j, eps1, d, table_csv, grid_csv, base_bits, refine } => {
            let p = MajorArcParams::new(default_eps1(eps1, d), j, d)?;
            if let Some(path) = table_csv {
                std::fs::write(path, arc_table_csv(&p))?;
            }
            if let Some(path) = grid_csv {
                std::fs::write(path, lambda_grid_csv(&lambda_grid(base_bits, &p, refine)?))?;
            }
            Ok(match major_arc_membership(lambda, &p) {
                Some(r) => json!({ "a": r.a, "q": r.q }),
                None => json!({ "a": null, "q": null }),
            })
        }
        Command::EnumerateRs { s, n, budget } => {
            let points = enumerate_rs(s, n, budget)?;
            let rows: Vec<Value> = points
                .iter()
                .map(|p| json!({ "a": p.a, "b": p.b, "q": p.q, "alpha": p.alpha().value(), "beta": p.beta() }))
                .collect();
            Ok(json!({ "s": s, "n": n, "count": rows.len(), "points": rows }))
        }
        Command::Multiplier { j, lambda, xi, side, d, n, kernel, budget } => {
            let k = parse::kernel(&kernel, n, d)?;
            let piece = kernel_piece(j, &k, budget)?;
            match (xi, side) {
                (Some(xi), None) => Ok(complex_json(multiplier_m(&piece, lambda, &point(&xi, n)?)?)),
                (None, Some(side)) => Ok(spectrum_json(&multiplier_m_grid(&piece, lambda, GridSpec::new(n, side)?)?)),
                _ => usage("give exactly one of --xi and --N"),
            }
        }
        Command::Phi { j, lambda, xi, d, n, kernel, proxy_refine, eps1 } => {
            let k = parse::kernel(&kernel, n, d)?;
            let xi = point(&xi, n)?;
            let m = method(proxy_refine);
            let value = match eps1 {
                Some(e) => phi_star(j, lambda, &xi, &k, MajorArcParams::new(e, j, d)?.radius(), m)?,
                None => m.evaluate(j, lambda, &xi, &k)?,
            };
            Ok(complex_json(value))
        }
        Command::AssembleLs { s, j, j_max, lambda, xi, eps1, kappa, d, n, kernel, proxy_refine, phi_s } => {
            let asm = assembler(&kernel, n, d, eps1, kappa, proxy_refine)?;
            let xi = point(&xi, n)?;
            let value = match (j, j_max, phi_s) {
                (None, Some(jm), true) => asm.phi_s(s, jm, lambda, &xi)?,
                (None, Some(jm), false) => asm.level_sum(s, jm, lambda, &xi)?,
                (Some(j), None, false) => asm.level_term(s, j, lambda, &xi)?,
                _ => return usage("give --j, --j-max, or --j-max with --phi-s"),
            };
            Ok(complex_json(value))
        }
        Command::ErrorTerm { j, lambda, xi, side, oversample, eps1, kappa, d, n, kernel, proxy_refine } => {
            let asm = assembler(&kernel, n, d, eps1, kappa, proxy_refine)?;
            match (xi, side) {
                (Some(xi), None) => Ok(complex_json(asm.error_term(j, lambda, &point(&xi, n)?)?)),
                (None, Some(side)) => {
                    let values = asm.error_term_on_grid(j, lambda, side, oversample, None)?;
                    Ok(spectrum_json(&Multiplier::new(GridSpec::new(1, side)?, values)?))
                }
                _ => usage("give exactly one of --xi and --N"),
            }
        }
        Command::Carleson { input, delta, n, lambdas, grid_bits, refine, eps1, j_max, d, kernel, budget } => {
            let f = match (input, delta) {
                (Some(path), None) => GridSignal::from_json(&parse::read_json(&path)?)?,
                (None, Some(side)) => GridSignal::delta(GridSpec::new(n, side)?),
                _ => return usage("give exactly one of --input and --delta"),
            };
            let lambdas = match (lambdas, grid_bits) {
                (Some(text), None) => parse::list(&text, "lambda")?,
                (None, Some(bits)) => lambda_grid(bits, &MajorArcParams::new(default_eps1(eps1, d), j_max, d)?, refine)?,
                _ => return usage("give exactly one of --lambdas and --grid-bits"),
            };
            let k = parse::kernel(&kernel, f.spec.n, d)?;
            Ok(mflab::circle::carleson_operator(&f, &lambdas, j_max, &k, budget)?.to_json())
        }
        Command::A1 { coefficients, classical, random_labels, side, kappa, s, seed, window_support } => {
            let g = match (coefficients, classical, random_labels) {
                (Some(path), None, None) => {
                    let raw = parse::read_json(&path)?;
                    let list = raw.as_array().ok_or_else(|| Error::Parameter("coefficients must be a JSON array".into()))?;
                    CoefficientField::from_signals(list.iter().map(GridSignal::from_json).collect::<Result<_>>()?)?
                }
                (None, Some(text), None) => {
                    let freqs: Vec<f64> = parse::list(&text, "frequency")?;
                    classical_coefficients(&freqs.iter().map(|&f| vec![f]).collect::<Vec<_>>(), GridSpec::new(1, side)?)?
                }
                (None, None, Some(labels)) => {
                    let seed = require_seed(seed, "--random-labels")?;
                    let spec = GridSpec::new(1, side)?;
                    CoefficientField::from_signals(
                        (0..labels)
                            .map(|b| GridSignal::from_fn(spec, |x| lattice_unimodular(seed, b as u64, x)))
                            .collect(),
                    )?
                }
                _ => return usage("give exactly one of --coefficients, --classical and --random-labels"),
            };
            let spec = g.spec();
            let bump = BumpSpec::chi_s(spec.n, kappa, s);
            let phi = phi_from_bump(&bump, spec)?;
            let window = if window_support { RowWindow::Support } else { RowWindow::Full };
            let rep = a1_details(&g, &phi, bump.measure_u(), window)?;
            Ok(json!({
                "a1": rep.a1,
                "argmax": spec.position(rep.argmax),
                "labels": g.len(),
                "measure_u": bump.measure_u(),
            }))
        }
        Command::Multifreq { labels, side, q, eta, kappa, s, times, trials, mode, seed } => {
            let mut p = Thm1Params::new(vec![labels], seed);
            (p.side, p.q, p.eta, p.kappa, p.s, p.times, p.trials, p.mode) =
                (side, q, eta, kappa, s, times, trials, coefficient_mode(mode));
            Ok(serde_json::to_value(thm1_instance(&p, side, labels)?)?)
        }
        Command::Lemma21 { labels, times, points, q, r, seed } => {
            let out = lemma21_check(&Lemma21Instance::random(labels, times, points, seed)?, q, r)?;
            Ok(json!({
                "lhs": out.lhs,
                "rhs": out.rhs,
                "ratio": out.ratio,
                "a0": out.a0,
                "c_variation": out.c_variation,
            }))
        }
        Command::Experiment { which } => experiment(which),
        Command::Report { records, out_dir } => {
            let rep = report(&RecordStore::new(&records).load()?);
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                for (name, csv) in &rep.tables {
                    std::fs::write(dir.join(format!("{name}.csv")), csv)?;
                }
                std::fs::write(dir.join("summary.txt"), &rep.summary)?;
            }
            Ok(json!({ "tables": rep.tables, "summary": rep.summary }))
        }
        Command::Defaults => Ok(crate::defaults()),
    }
}

fn assembler(kernel: &str, n: usize, d: u32, eps1: Option<f64>, kappa: u32, proxy_refine: Option<u32>) -> Result<Assembler> {
    let k: KernelSpec = parse::kernel(kernel, n, d)?;
    let params = ApproxParams::new(k, default_eps1(eps1, d), kappa, method(proxy_refine))?;
    Ok(Assembler::new(params, Arc::new(GaussCache::new())))
}

fn coefficient_mode(mode: ModeArg) -> CoefficientMode {
    match mode {
        ModeArg::Random => CoefficientMode::RandomUnimodular,
        ModeArg::Classical => CoefficientMode::Classical,
    }
}

fn experiment(which: ExperimentCommand) -> Result<Value> {
    match which {
        ExperimentCommand::Thm1 {
            sizes, side, q, eta, kappa, s, times, trials, packets, mode, no_n_doubling, seed, records,
        } => {
            let mut p = Thm1Params::new(parse::list(&sizes, "size")?, seed);
            (p.side, p.q, p.eta, p.kappa, p.s, p.times, p.trials, p.packets) =
                (side, q, eta, kappa, s, times, trials, packets);
            p.mode = coefficient_mode(mode);
            p.n_doubling = !no_n_doubling;
            store(records.as_deref(), &thm1_scaling_experiment(&p)?)
        }
        ExperimentCommand::A1Reduction { s, kappa, d, side, x, alpha, c, lambda_field, no_n_doubling, seed, records } => {
            let mut p = A1ReductionParams::new(s, side, seed);
            (p.kappa, p.d, p.x) = (kappa, d, x);
            p.alpha = alpha.as_deref().map(parse::rational).transpose()?;
            p.c = c.as_deref().map(parse::complex_list).transpose()?;
            p.lambda_field = parse::lambda_field(&lambda_field)?;
            p.n_doubling = !no_n_doubling;
            store(records.as_deref(), &a1_reduction_experiment(&p)?)
        }
        ExperimentCommand::Decay {
            kind, sweep, eps1, d, kappa, samples, grid_factor, oversample, noise_floor, no_n_doubling, seed, records,
        } => {
            let mut p = match kind {
                DecayKindArg::GaussSum => {
                    let mut p = DecayParams::gauss_sum(parse::list(&sweep, "prime")?);
                    p.seed = seed.unwrap_or(0);
                    p
                }
                DecayKindArg::MinorArc => DecayParams::minor_arc(parse::list(&sweep, "scale")?, require_seed(seed, "decay")?),
                DecayKindArg::ErrorTerm => DecayParams::error_term(parse::list(&sweep, "scale")?, require_seed(seed, "decay")?),
            };
            if let Some(e) = eps1 {
                p.eps1 = e;
            }
            if let Some(k) = samples {
                p.samples = k;
            }
            (p.d, p.kappa, p.grid_factor, p.oversample, p.noise_floor) = (d, kappa, grid_factor, oversample, noise_floor);
            p.n_doubling = !no_n_doubling;
            store(records.as_deref(), &decay_experiment(&p)?)
        }
    }
}
