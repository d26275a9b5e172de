use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use gsp_core::analysis::{
    check_demand_monotonicity, check_regularity, gsp_membership_with, ram_membership, ram_relation,
    MembershipConfig,
};
use gsp_core::assortment::{optimal_assortment, ratio_report, revenue_ordered};
use gsp_core::estimation::{fit as fit_model, FitConfig, TypeUniverse};
use gsp_core::{io, Assortment, Error as CoreError, Model, Revenues, Table};
use serde_json::{json, Value};

use crate::args::{
    AssortArgs, CheckArgs, EvalArgs, ExamplesArgs, FitArgs, Format, MethodArg, Output,
};
use crate::render;

/// Overrides the enumeration cap used by `fit` and `check --gsp-membership`.
pub const UNIVERSE_CAP_ENV: &str = "GSP_UNIVERSE_CAP";
/// Exit status when a requested quality gate fails.
const EXIT_GATE: u8 = 3;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn universe_cap_override() -> Result<Option<usize>> {
    match std::env::var(UNIVERSE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{UNIVERSE_CAP_ENV}={v:?} is not a non-negative integer")),
        Err(_) => Ok(None),
    }
}

/// Prints text or JSON to stdout and, with `--out`, writes the same JSON to a file.
fn emit(output: &Output, text: String, value: &Value) -> Result<()> {
    let json = serde_json::to_string_pretty(value)? + "\n";
    match output.format {
        Format::Text => print!("{text}"),
        Format::Json => print!("{json}"),
    }
    if let Some(path) = &output.out {
        fs::write(path, &json).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<Model> {
    io::model_from_json(&read(path)?)
        .with_context(|| format!("invalid model in {}", path.display()))
}

pub fn eval(args: &EvalArgs) -> Result<ExitCode> {
    let model = load_model(&args.model)?;
    let assortments = match (&args.assortments, args.all_subsets) {
        (_, Some(n)) => {
            if n != model.universe_size() {
                bail!(
                    "--all-subsets {n} does not match the model universe size {}",
                    model.universe_size()
                );
            }
            Assortment::all_nonempty(n)?
        }
        (Some(path), None) => {
            let raw: Vec<Vec<u32>> = serde_json::from_str(&read(path)?).with_context(|| {
                format!("{} must hold a JSON array of id arrays", path.display())
            })?;
            raw.into_iter()
                .enumerate()
                .map(|(k, ids)| Assortment::new(ids).with_context(|| format!("assortments[{k}]")))
                .collect::<Result<_>>()?
        }
        (None, None) => bail!("give --assortments FILE or --all-subsets N"),
    };
    let table = model.choice_table(&assortments)?;
    emit(
        &args.output,
        render::choice_table(&table),
        &io::table_value(&table),
    )?;
    Ok(ExitCode::SUCCESS)
}

pub fn fit(args: &FitArgs) -> Result<ExitCode> {
    if args.max_atoms == 0 {
        bail!("--max-atoms must be at least 1");
    }
    if args.tol.is_nan() || args.tol < 0.0 {
        bail!("--tol must be non-negative");
    }
    let dataset = io::dataset_from_json(&read(&args.data)?)
        .with_context(|| format!("invalid dataset in {}", args.data.display()))?;
    let universe = match args.cap_seq_len {
        Some(l) => TypeUniverse::Capped(l),
        None => TypeUniverse::Full,
    };
    let mut config = FitConfig::new(args.max_atoms)
        .with_irrational_penalty(args.irrational_penalty)
        .with_universe(universe);
    if let Some(cap) = universe_cap_override()? {
        config.universe_cap = cap;
    }
    let result = match fit_model(&dataset, &config) {
        Ok(r) => r,
        Err(e @ CoreError::CapExceeded { .. }) => {
            return Err(e).context(format!(
                "restrict the candidate types with --cap-seq-len L or raise {UNIVERSE_CAP_ENV}"
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let text = format!(
        "residual         {:.3e}\nsupport size     {}\nirrational mass  {:.6}\niterations       {}\ncandidate types  {}\n\n{}",
        result.residual_norm,
        result.model.support_size(),
        result.irrational_mass,
        result.iterations,
        result.candidate_columns,
        render::model(&result.model),
    );
    emit(&args.output, text, &io::fit_result_value(&result))?;
    if args.require_exact && result.residual_norm > args.tol {
        eprintln!(
            "residual {:.3e} exceeds --tol {:.3e}",
            result.residual_norm, args.tol
        );
        return Ok(ExitCode::from(EXIT_GATE));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn check(args: &CheckArgs) -> Result<ExitCode> {
    let table: Table = io::table_from_json(&read(&args.table)?)
        .with_context(|| format!("invalid table in {}", args.table.display()))?;
    let [regularity, monotone, ram, membership] = args.selected();
    let mut value = json!({});
    let mut text = String::new();
    if regularity {
        let v = check_regularity(&table);
        value["regularity"] = io::regularity_value(&v);
        text += &render::regularity(&v);
    }
    if monotone {
        let v = check_demand_monotonicity(&table);
        value["monotone"] = json!({
            "holds": v.is_empty(),
            "violations": v.iter().map(|m| json!({
                "smaller_set": m.smaller_set.members(),
                "larger_set": m.larger_set.members(),
                "mass_small": m.mass_small,
                "mass_large": m.mass_large,
            })).collect::<Vec<_>>(),
        });
        text += &render::monotonicity(&v);
    }
    if ram {
        let relation = ram_relation(&table);
        let verdict = ram_membership(&table);
        let mut v = io::ram_value(&verdict);
        v["relation"] = relation
            .edges
            .iter()
            .map(|((x, y), s)| json!({ "from": x, "to": y, "witness": s.members() }))
            .collect();
        value["ram"] = v;
        text += &render::ram(&verdict, &relation);
    }
    if membership {
        let mut config = MembershipConfig::default();
        if let Some(cap) = universe_cap_override()? {
            config.universe_cap = cap;
        }
        let verdict = gsp_membership_with(&table, table.universe_size(), &config);
        value["gsp_membership"] = io::membership_value(&verdict);
        text += &render::membership(&verdict);
    }
    emit(&args.output, text, &value)?;
    Ok(ExitCode::SUCCESS)
}

pub fn assort(args: &AssortArgs) -> Result<ExitCode> {
    let model = load_model(&args.model)?;
    let revenues: Revenues =
        io::revenues_from_json(&read(&args.revenues)?, Some(model.universe_size()))
            .with_context(|| format!("invalid revenues in {}", args.revenues.display()))?;
    let (text, value) = match args.method {
        MethodArg::Exact => {
            let s = optimal_assortment(&model, &revenues)?;
            (
                render::solutions(&[&s]),
                json!({ "exact": io::solution_value(&s) }),
            )
        }
        MethodArg::RevenueOrdered => {
            let s = revenue_ordered(&model, &revenues)?;
            (
                render::solutions(&[&s]),
                json!({ "revenue_ordered": io::solution_value(&s) }),
            )
        }
        MethodArg::Both => {
            let report = ratio_report(&model, &revenues)?;
            (render::ratio(&report), io::ratio_report_value(&report))
        }
    };
    emit(&args.output, text, &value)?;
    Ok(ExitCode::SUCCESS)
}

pub fn examples(args: &ExamplesArgs) -> Result<ExitCode> {
    if args.list {
        for example in gsp_datasets::all_examples()? {
            println!("{:<16}{}", example.name, example.title);
        }
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(dir) = &args.export {
        for path in gsp_datasets::export_all(dir)? {
            println!("{}", path.display());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let reports = gsp_datasets::verify_all();
    let passed = reports.iter().filter(|r| r.passed()).count();
    for report in &reports {
        println!(
            "{} {}",
            if report.passed() { "PASS" } else { "FAIL" },
            report.name
        );
        for c in &report.checks {
            println!(
                "  [{}] {}: {}",
                if c.passed { "ok" } else { "FAILED" },
                c.label,
                c.detail
            );
        }
    }
    println!("{passed}/{} examples verified", reports.len());
    Ok(if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_GATE)
    })
}
