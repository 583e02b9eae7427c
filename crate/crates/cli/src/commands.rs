use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use log::info;
use serde_json::{json, Value};

use lipminor::acceptance::{Suite, CRITERIA};
use lipminor::criteria::{
    classify_contact_set, estimate_r_star, existence_check, integral_test_default, p_k_zero, regularity_test,
    vigon_identity, Verdict, DEFAULT_T_MIN,
};
use lipminor::experiments::{run_experiment, ExperimentParams};
use lipminor::levy::{simulate_path, JumpSpec, LevyModel, SimConfig};
use lipminor::oracle::{
    h_moments, k_cdf_zero_drift, k_density_zero_drift, lambda_density_zero_drift, BrownianParams,
};
use lipminor::{compute_minorant, default_guard, extract_contact_set, straddle_interval, CadlagPath};

use crate::config::{load_model, write_json, write_sidecar, Failure, RunConfig};
use crate::{Cli, Command, CriteriaArgs, CriteriaTest, ExperimentArgs, MinorantArgs, OracleArgs, SimulateArgs, VerifyArgs};

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let provenance = RunConfig::new(cli).to_value();
    match &cli.command {
        Command::Minorant(args) => minorant(args, &provenance),
        Command::Simulate(args) => simulate(args, &provenance),
        Command::Oracle(args) => oracle(args, &provenance),
        Command::Criteria(args) => criteria(args, &provenance),
        Command::Experiment(args) => experiment(args, &provenance),
        Command::VerifyAll(args) => verify_all(args, &provenance),
    }
}

fn emit(out: Option<&PathBuf>, doc: &Value) -> Result<(), Failure> {
    match out {
        Some(path) => write_json(path, doc),
        None => {
            println!("{}", serde_json::to_string_pretty(doc)?);
            Ok(())
        }
    }
}

fn minorant(args: &MinorantArgs, provenance: &Value) -> Result<u8, Failure> {
    let file = File::open(&args.input)
        .map_err(|e| Failure::Input(format!("cannot open {}: {e}", args.input.display())))?;
    let path = CadlagPath::read_csv(BufReader::new(file))?;
    let guard = args.guard.unwrap_or_else(|| default_guard(&path, args.alpha));
    let result = compute_minorant(&path, args.alpha, guard)?;

    let mut text = String::from("t,m,contact,contaminated\n");
    for i in 0..path.len() {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            path.times()[i],
            result.m[i],
            u8::from(result.contact_mask[i]),
            u8::from(result.contaminated[i])
        );
    }
    std::fs::write(&args.out, text)?;
    write_sidecar(&args.out, provenance)?;

    let core_length = result.contaminated.iter().filter(|&&c| !c).count();
    let core_contacts = (0..path.len())
        .filter(|&i| result.contact_mask[i] && !result.contaminated[i])
        .count();
    let runs: Vec<[f64; 2]> = extract_contact_set(&result)
        .into_iter()
        .map(|r| [path.times()[r.start], path.times()[r.end - 1]])
        .collect();
    let straddle = match straddle_interval(&path, &result) {
        Ok(s) => json!({
            "degenerate": s.degenerate, "g": s.g, "d": s.d, "t": s.t, "s": s.s, "k": s.k, "h": s.h,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let summary = json!({
        "provenance": provenance,
        "points": path.len(),
        "alpha": args.alpha,
        "guard": guard,
        "contact_count": result.contact_count(),
        "core_length": core_length,
        "core_contact_count": core_contacts,
        "contaminated_count": path.len() - core_length,
        "contact_runs": runs,
        "straddle": straddle,
    });
    let summary_path = args.summary.clone().unwrap_or_else(|| {
        let mut name = args.out.as_os_str().to_owned();
        name.push(".summary.json");
        PathBuf::from(name)
    });
    write_json(&summary_path, &summary)?;
    info!("{} contacts among {} points", result.contact_count(), path.len());
    Ok(0)
}

fn simulate(args: &SimulateArgs, provenance: &Value) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let cfg = SimConfig::new(args.window, args.dt, args.seed, args.replicate);
    let path = simulate_path(&model, &cfg)?;
    let file = File::create(&args.out)?;
    let mut writer = BufWriter::new(file);
    path.write_csv(&mut writer)?;
    writer.flush()?;
    write_sidecar(&args.out, provenance)?;
    info!("wrote {} points to {}", path.len(), args.out.display());
    Ok(0)
}

fn oracle(args: &OracleArgs, provenance: &Value) -> Result<u8, Failure> {
    let model = LevyModel::brownian(args.sigma2, args.beta);
    let norm = BrownianParams::normalized(&model, args.alpha)?;
    let bp = norm.params;
    let scale = norm.height_scale;
    let mut laplace = Vec::new();
    for &theta in &args.theta {
        laplace.push(json!({
            "theta": theta,
            "k": bp.k_laplace(theta)?,
            "lambda_ratio": bp.lambda_ratio(theta)?,
            "t": bp.t_laplace(theta).ok(),
            "s": bp.s_laplace(theta)?,
            "ttilde": bp.ttilde_laplace(theta)?,
        }));
    }
    if !args.kappa.is_empty() && bp.beta != 0.0 {
        return Err(Failure::Input("densities at --kappa are only available for zero drift".into()));
    }
    let mut densities = Vec::new();
    for &kappa in &args.kappa {
        densities.push(json!({
            "kappa": kappa,
            "k_density": k_density_zero_drift(bp.alpha, kappa)?,
            "k_cdf": k_cdf_zero_drift(bp.alpha, kappa)?,
            "lambda_density": lambda_density_zero_drift(bp.alpha, kappa)?,
        }));
    }
    let (h_mean, h_var) = h_moments(bp.alpha);
    let (neg_rate, pos_rate) = bp.neg_inf_exp_rates();
    let doc = json!({
        "provenance": provenance,
        "normalized": { "alpha": bp.alpha, "beta": bp.beta, "height_scale": scale },
        "p_t_positive": bp.p_t_positive(),
        "h_mean": h_mean * scale,
        "h_variance": h_var * scale * scale,
        "negative_side_infimum_rate": neg_rate / scale,
        "positive_side_infimum_rate": pos_rate / scale,
        "laplace": laplace,
        "densities": densities,
    });
    emit(args.out.as_ref(), &doc)?;
    Ok(0)
}

fn criteria(args: &CriteriaArgs, provenance: &Value) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let (a, b) = (args.a.unwrap_or(-args.alpha), args.b.unwrap_or(args.alpha));
    let mut inconclusive = false;
    let result = match args.test {
        CriteriaTest::Finint => {
            let v = integral_test_default(&model, a, b)?;
            inconclusive = v.verdict == Verdict::Indeterminate;
            serde_json::to_value(v)?
        }
        CriteriaTest::Regularity => {
            let r = regularity_test(&model)?;
            inconclusive = r.regular_for_lower_half_line.is_none() || r.regular_for_upper_half_line.is_none();
            serde_json::to_value(r)?
        }
        CriteriaTest::Rstar => serde_json::to_value(estimate_r_star(&model, args.r_lo, args.r_hi, 30, DEFAULT_T_MIN)?)?,
        CriteriaTest::Vigon => serde_json::to_value(vigon_identity(&model, args.q, a, b)?)?,
        CriteriaTest::Pkzero => serde_json::to_value(p_k_zero(&model, args.alpha)?)?,
        CriteriaTest::Classify => json!({
            "existence": existence_check(&model, args.alpha)?,
            "classification": classify_contact_set(&model, args.alpha)?,
        }),
    };
    let doc = json!({ "provenance": provenance, "model": model, "result": result });
    emit(args.out.as_ref(), &doc)?;
    if inconclusive {
        return Err(Failure::Numerical("integral test inconclusive".into()));
    }
    Ok(0)
}

fn experiment(args: &ExperimentArgs, provenance: &Value) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let window = match args.window {
        Some(w) => w,
        None if matches!(model.jumps, JumpSpec::None {}) && model.sigma2 > 0.0 => {
            let sigma = model.sigma();
            let gap = (args.alpha - model.drift.abs()) / sigma;
            if !(gap > 0.0) {
                return Err(Failure::Input("need |drift| < alpha".into()));
            }
            (20.0 / gap).ceil()
        }
        None => return Err(Failure::Input("--window is required for models with jumps".into())),
    };
    let params = ExperimentParams {
        model,
        alpha: args.alpha,
        window,
        dt: args.dt,
        n: args.n,
        seed: args.seed,
        theta_grid: args.theta_grid.clone(),
        alpha_grid: args.alpha_grid.clone(),
    };
    info!("running experiment {} with n = {}", args.name, args.n);
    let output = run_experiment(args.name, &params)?;
    output.write_to(&args.out, provenance)?;
    for check in &output.report.checks {
        println!(
            "{:<40} {} statistic {} threshold {}",
            check.name,
            if check.pass { "PASS" } else { "FAIL" },
            check.statistic,
            check.threshold
        );
    }
    if output.report.passed {
        Ok(0)
    } else {
        Err(Failure::Acceptance(format!(
            "experiment {} failed: {}",
            args.name,
            output
                .report
                .failed_checks()
                .iter()
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )))
    }
}

fn verify_all(args: &VerifyArgs, provenance: &Value) -> Result<u8, Failure> {
    let ids: Vec<u32> = if args.only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        args.only.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(Failure::Input(format!("no acceptance criterion with id {bad}")));
    }
    let suite = Suite::new(args.profile);
    let mut results = Vec::new();
    for id in ids {
        let result = suite.run(id);
        println!("{result}");
        results.push(result);
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} ({})", r.id, r.name))
        .collect();
    let doc = json!({
        "provenance": provenance,
        "profile": args.profile,
        "passed": failed.is_empty(),
        "results": results,
    });
    if let Some(out) = &args.out {
        write_json(out, &doc)?;
    }
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
        Ok(0)
    } else {
        Err(Failure::Acceptance(format!("failed criteria: {}", failed.join(", "))))
    }
}
