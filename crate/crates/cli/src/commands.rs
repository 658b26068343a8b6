//! The four commands. Each resolves its settings, runs the library
//! operation and returns a [`Table`] whose metadata embeds every resolved
//! setting.

use std::path::{Path, PathBuf};

use entest_core::estimators::{CountVector, EstimatorConfig, LeadingTerm, ParamVector, Regime};
use entest_core::exact_oracle::{
    enumerate_moments_with, exact_entropy, exact_estimator_bias, optimal_params, Distribution,
    EnumerationOptions,
};
use entest_core::experiments::{safety_check, sweep_a, AGrid, ParamLine, SweepSpec};
use entest_core::mi::{
    classify_x_with, mi_estimate, mi_subsample_curve, synth_dataset, ATable, PairDataset,
    SynthConfig, SynthProfile, Thresholds, YClass,
};
use entest_core::sampling::SeedSpec;
use entest_core::Error as CoreError;

use crate::config::{parse_list, parse_real, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_real, Cell, Table};

pub const COMMON_KEYS: &[&str] = &["output", "format", "timestamp"];

pub const ESTIMATE_KEYS: &[&str] = &[
    "counts",
    "counts_file",
    "estimator",
    "regime",
    "leading_term",
    "a_strategy",
    "a",
    "p",
    "safety_threshold",
];

pub const BIAS_KEYS: &[&str] = &[
    "p",
    "n",
    "a_strategy",
    "a",
    "max_outcomes",
    "precision_bits",
];

pub const SWEEP_KEYS: &[&str] = &[
    "p",
    "n",
    "a",
    "a_line_base",
    "a_line_direction",
    "a_line_steps",
    "replicates",
    "regime",
    "seed",
    "stream",
];

pub const MI_KEYS: &[&str] = &[
    "dataset",
    "synth_profile",
    "synth_size",
    "synth_seed",
    "synth_x_values",
    "synth_heavy_fraction",
    "synth_moderate_fraction",
    "synth_q_heavy",
    "synth_q_moderate",
    "synth_zipf_exponent",
    "dataset_output",
    "truth_output",
    "n_grid",
    "replicates",
    "seed",
    "stream",
    "replacement",
    "t_moderate",
    "t_heavy",
    "a_heavy_y1",
    "a_moderate_y1",
    "a_neutral",
    "a_moderate_y0",
    "a_heavy_y0",
];

fn a_columns(m: usize) -> impl Iterator<Item = String> {
    (1..=m).map(|i| format!("a_{i}"))
}

fn distribution(s: &mut Settings, key: &str) -> CliResult<Distribution> {
    let p = s.required_reals(key)?;
    Ok(Distribution::new(p)?)
}

fn regime(s: &mut Settings) -> CliResult<Regime> {
    Ok(
        match s
            .choice("regime", "binomial", &["binomial", "poisson"])?
            .as_str()
        {
            "poisson" => Regime::Poisson,
            _ => Regime::Binomial,
        },
    )
}

/// Resolve `a` from `a_strategy` for `boxes` boxes.
fn params(s: &mut Settings, boxes: usize, default_strategy: &str) -> CliResult<ParamVector> {
    let strategy = s.choice(
        "a_strategy",
        default_strategy,
        &["explicit", "optimal_from_p", "all_ones"],
    )?;
    let a = match strategy.as_str() {
        "explicit" => {
            let a = s
                .reals("a")?
                .ok_or_else(|| CliError::validation("a_strategy = explicit needs `a`"))?;
            ParamVector::new(a)?
        }
        "optimal_from_p" => {
            let d = distribution(s, "p")?;
            optimal_params(&d)
        }
        _ => ParamVector::uniform(boxes, 1.0)?,
    };
    if a.len() != boxes {
        return Err(CliError::validation(format!(
            "parameter vector has {} entries for {boxes} boxes",
            a.len()
        )));
    }
    if strategy != "explicit" {
        s.record("a_resolved", join_reals(a.values()));
    }
    Ok(a)
}

/// Shortest round-trip form, so a recorded vector reproduces exactly.
fn join_reals(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn read_counts_file(path: &Path) -> CliResult<Vec<u64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut counts = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for field in body
            .split([',', ' ', '\t'])
            .filter(|f| !f.trim().is_empty())
        {
            let v = field.trim().parse::<u64>().map_err(|_| {
                CliError::validation(format!(
                    "{}, line {}: {field:?} is not a non-negative integer",
                    path.display(),
                    idx + 1
                ))
            })?;
            counts.push(v);
        }
    }
    Ok(counts)
}

pub fn estimate(s: &mut Settings) -> CliResult<Table> {
    let counts = match (s.has("counts"), s.has("counts_file")) {
        (true, false) => s.required_uints("counts")?,
        (false, true) => {
            let path = s.string("counts_file", None)?.expect("present");
            read_counts_file(Path::new(&path))?
        }
        _ => {
            return Err(CliError::validation(
                "give exactly one of `counts` or `counts_file`",
            ))
        }
    };
    let c = CountVector::new(counts)?;
    let kind = s.choice(
        "estimator",
        "schuermann",
        &["naive", "grassberger", "schuermann"],
    )?;
    let cfg = match kind.as_str() {
        "naive" => EstimatorConfig::Naive,
        "grassberger" => {
            let lead = match s
                .choice("leading_term", "psi_N", &["psi_N", "log_N"])?
                .as_str()
            {
                "log_N" => LeadingTerm::LogN,
                _ => LeadingTerm::PsiN,
            };
            EstimatorConfig::Grassberger { leading_term: lead }
        }
        _ => {
            let regime = regime(s)?;
            let a = params(s, c.len(), "all_ones")?;
            EstimatorConfig::Schuermann { a, regime }
        }
    };
    let threshold = s.real("safety_threshold", Some("10"))?.expect("default");
    let e = cfg.evaluate(&c)?;

    let mut t = Table::new(
        ["estimator_id", "leading_term", "value_nats", "value_bits"]
            .map(String::from)
            .to_vec(),
    );
    if let Some(a) = cfg.params() {
        let report = safety_check(a, &c, threshold)?;
        let flagged: Vec<String> = report
            .flags
            .iter()
            .map(|f| format!("box {} a^n = {}", f.box_index, fmt_real(f.power)))
            .collect();
        t.meta(
            "safety",
            if report.pass() {
                "pass".to_string()
            } else {
                format!("flagged: {}", flagged.join("; "))
            },
        );
    }
    t.push(vec![
        Cell::Text(e.estimator_id.as_str().into()),
        Cell::Text(e.leading_term.as_str().into()),
        Cell::Real(e.value_nats),
        Cell::Real(e.value_bits),
    ]);
    Ok(t)
}

pub fn bias_exact(s: &mut Settings) -> CliResult<Table> {
    let d = distribution(s, "p")?;
    let ns = s.required_uints("n")?;
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::validation("`n` must list tuple sizes >= 1"));
    }
    let a = params(s, d.len(), "optimal_from_p")?;
    let opts = EnumerationOptions {
        max_outcomes: s.uint("max_outcomes", Some("10000000"))?.expect("default") as u128,
        precision_bits: s.uint("precision_bits", Some("256"))?.expect("default") as usize,
    };
    let est = EstimatorConfig::Schuermann {
        a: a.clone(),
        regime: Regime::Binomial,
    };
    let mut columns = vec!["N".to_string()];
    columns.extend(a_columns(a.len()));
    columns.extend(
        [
            "bias_closed_bits",
            "bias_enumeration_bits",
            "difference_bits",
            "mean_bits",
            "variance",
            "outcome_count",
        ]
        .map(String::from),
    );
    let mut t = Table::new(columns);
    t.meta(
        "exact_entropy_bits",
        fmt_real(exact_entropy(&d) / std::f64::consts::LN_2),
    );
    for n in ns {
        let closed = match exact_estimator_bias(&d, n, &a) {
            Ok(b) => Some(b / std::f64::consts::LN_2),
            Err(CoreError::Domain(msg)) => {
                t.meta(format!("closed_form_unavailable.N{n}"), msg);
                None
            }
            Err(e) => return Err(e.into()),
        };
        let enumerated = match enumerate_moments_with(&d, n, &est, &opts) {
            Ok(r) => Some(r),
            Err(e @ CoreError::BudgetExceeded { .. }) => {
                t.meta(format!("enumeration_skipped.N{n}"), e.to_string());
                None
            }
            Err(e) => return Err(e.into()),
        };
        if closed.is_none() && enumerated.is_none() {
            return Err(CliError::validation(format!(
                "N = {n}: neither the closed form nor enumeration applies"
            )));
        }
        let mut row = vec![Cell::Int(n)];
        row.extend(a.values().iter().map(|&v| Cell::Real(v)));
        let real_or_empty = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Real);
        let eb = enumerated.as_ref().map(|r| r.bias_bits());
        row.push(real_or_empty(closed));
        row.push(real_or_empty(eb));
        row.push(real_or_empty(closed.zip(eb).map(|(c, e)| c - e)));
        row.push(real_or_empty(enumerated.as_ref().map(|r| r.mean_bits())));
        row.push(real_or_empty(
            enumerated.as_ref().map(|r| r.variance_bits2()),
        ));
        row.push(enumerated.map_or(Cell::Empty, |r| Cell::Int(r.outcome_count)));
        t.push(row);
    }
    Ok(t)
}

fn seed(s: &mut Settings) -> CliResult<SeedSpec> {
    let master = s.uint("seed", Some("0"))?.expect("default");
    let stream = s.uint("stream", Some("0"))?.expect("default");
    Ok(SeedSpec::new(master, stream))
}

pub fn sweep(s: &mut Settings) -> CliResult<Table> {
    let d = distribution(s, "p")?;
    let tuple_sizes = s.required_uints("n")?;
    let points = s
        .points("a")?
        .unwrap_or_default()
        .into_iter()
        .map(ParamVector::new)
        .collect::<Result<Vec<_>, _>>()?;
    let line = match (
        s.reals("a_line_base")?,
        s.reals("a_line_direction")?,
        s.reals("a_line_steps")?,
    ) {
        (None, None, None) => None,
        (Some(base), Some(direction), Some(steps)) => Some(ParamLine {
            base,
            direction,
            steps,
        }),
        _ => {
            return Err(CliError::validation(
                "a parameter line needs a_line_base, a_line_direction and a_line_steps",
            ))
        }
    };
    let spec = SweepSpec {
        distribution: d.clone(),
        tuple_sizes,
        a_grid: AGrid { line, points },
        replicates: s.uint("replicates", Some("1000000"))?.expect("default"),
        regime: regime(s)?,
        seed: seed(s)?,
    };
    // Validate everything before any sampling.
    spec.validate()?;
    let rows = sweep_a(&spec)?;

    let mut columns = vec!["N".to_string()];
    columns.extend(a_columns(d.len()));
    columns.extend(["mean_bits", "std_error_bits", "variance", "overflow_count"].map(String::from));
    let mut t = Table::new(columns);
    t.meta(
        "exact_entropy_bits",
        fmt_real(exact_entropy(&d) / std::f64::consts::LN_2),
    );
    let mut unreliable = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut cells = vec![Cell::Int(row.n)];
        cells.extend(row.a.values().iter().map(|&v| Cell::Real(v)));
        match &row.result {
            Ok(sum) => {
                if sum.unreliable() {
                    unreliable.push(i.to_string());
                }
                cells.extend([
                    Cell::Real(sum.mean_bits),
                    Cell::Real(sum.std_error_bits),
                    Cell::Real(sum.variance_bits2),
                    Cell::Int(sum.overflow_count),
                ]);
            }
            Err(msg) => {
                t.meta(format!("row_error.{i}"), msg.clone());
                cells.extend([
                    Cell::Real(f64::NAN),
                    Cell::Real(f64::NAN),
                    Cell::Real(f64::NAN),
                    Cell::Int(spec.replicates),
                ]);
            }
        }
        t.push(cells);
    }
    if !unreliable.is_empty() {
        t.meta("unreliable_rows", unreliable.join(","));
    }
    Ok(t)
}

fn pair(s: &mut Settings, key: &str, default: &str) -> CliResult<(f64, f64)> {
    let v = s.string(key, Some(default))?.expect("default");
    let parsed = parse_list(&v, parse_real).map_err(CliError::validation)?;
    match parsed.as_slice() {
        [a0, a1] if *a0 >= 0.0 && *a1 >= 0.0 => Ok((*a0, *a1)),
        _ => Err(CliError::validation(format!(
            "`{key}` must be two non-negative reals a_0,a_1"
        ))),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn mi(s: &mut Settings) -> CliResult<Table> {
    let mut meta: Vec<(String, String)> = Vec::new();
    let full = match (s.has("dataset"), s.has("synth_profile")) {
        (true, false) => {
            let path = PathBuf::from(s.string("dataset", None)?.expect("present"));
            let file = std::fs::File::open(&path).map_err(|e| CliError::io(&path, e))?;
            PairDataset::parse(std::io::BufReader::new(file))
                .map_err(|source| CliError::Dataset { path, source })?
        }
        (false, true) => {
            let profile = match s
                .choice("synth_profile", "pym_like", &["pym_like", "spherical_like"])?
                .as_str()
            {
                "spherical_like" => SynthProfile::SphericalLike,
                _ => SynthProfile::PymLike,
            };
            let defaults = SynthConfig::for_profile(profile);
            let x_values = defaults.x_values.to_string();
            let cfg = SynthConfig {
                x_values: s.uint("synth_x_values", Some(&x_values))?.expect("default") as u32,
                heavy_fraction: s
                    .real(
                        "synth_heavy_fraction",
                        Some(&fmt_real(defaults.heavy_fraction)),
                    )?
                    .expect("default"),
                moderate_fraction: s
                    .real(
                        "synth_moderate_fraction",
                        Some(&fmt_real(defaults.moderate_fraction)),
                    )?
                    .expect("default"),
                q_heavy: s
                    .real("synth_q_heavy", Some(&fmt_real(defaults.q_heavy)))?
                    .expect("default"),
                q_moderate: s
                    .real("synth_q_moderate", Some(&fmt_real(defaults.q_moderate)))?
                    .expect("default"),
                zipf_exponent: s
                    .real(
                        "synth_zipf_exponent",
                        Some(&fmt_real(defaults.zipf_exponent)),
                    )?
                    .expect("default"),
            };
            let size = s.uint("synth_size", Some("250000"))?.expect("default") as usize;
            let synth_seed = SeedSpec::new(s.uint("synth_seed", Some("0"))?.expect("default"), 0);
            let (ds, truth) = synth_dataset(profile, size, synth_seed, &cfg)?;
            meta.push(("truth_mi_bits".into(), fmt_real(truth.true_mi_bits())));
            meta.push((
                "truth_mi_bits_joint".into(),
                fmt_real(truth.true_mi_bits_joint()),
            ));
            meta.push(("truth_marginal_y1".into(), fmt_real(truth.marginal_y1())));
            if let Some(p) = s.string("truth_output", None)? {
                let json = serde_json::to_string(&truth)
                    .map_err(|e| CliError::validation(format!("truth record: {e}")))?;
                write_file(Path::new(&p), &(json + "\n"))?;
            }
            if let Some(p) = s.string("dataset_output", None)? {
                write_file(Path::new(&p), &ds.to_csv())?;
            }
            ds
        }
        _ => {
            return Err(CliError::validation(
                "give exactly one of `dataset` or `synth_profile`",
            ))
        }
    };

    let thresholds = Thresholds {
        moderate: s.real("t_moderate", Some("0.65"))?.expect("default"),
        heavy: s.real("t_heavy", Some("0.85"))?.expect("default"),
    };
    thresholds.validate()?;
    let a_table = ATable {
        heavy_y1: pair(s, "a_heavy_y1", "7,1")?,
        moderate_y1: pair(s, "a_moderate_y1", "4,1")?,
        neutral: pair(s, "a_neutral", "1,1")?,
        moderate_y0: pair(s, "a_moderate_y0", "1,4")?,
        heavy_y0: pair(s, "a_heavy_y0", "1,7")?,
    };
    let n_grid: Vec<usize> = s
        .uints("n_grid")?
        .unwrap_or_else(|| {
            s.record("n_grid", "100,1000,10000,100000");
            vec![100, 1000, 10_000, 100_000]
        })
        .into_iter()
        .map(|n| n as usize)
        .collect();
    let replicates = s.uint("replicates", Some("100"))?.expect("default") as usize;
    let replacement = s.boolean("replacement", false)?;
    let seed = seed(s)?;
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(CliError::validation(
            "`n_grid` must list subsample sizes >= 1",
        ));
    }
    if !replacement {
        if let Some(&too_big) = n_grid.iter().find(|&&n| n > full.len()) {
            return Err(CliError::validation(format!(
                "n_grid entry {too_big} exceeds the dataset size {} without replacement",
                full.len()
            )));
        }
    }
    if replicates == 0 {
        return Err(CliError::validation("`replicates` must be >= 1"));
    }

    let classes = classify_x_with(&full, thresholds, a_table)?;
    let full_estimate = mi_estimate(&full, &classes)?;
    let rows = mi_subsample_curve(&full, &classes, &n_grid, replicates, seed, replacement)?;

    let mut t = Table::new(
        [
            "N",
            "mean_mi_bits",
            "std_error",
            "mean_mi_unclipped_bits",
            "std_error_unclipped",
            "replicates",
        ]
        .map(String::from)
        .to_vec(),
    );
    t.meta(
        "thresholds",
        format!(
            "{},{}",
            fmt_real(thresholds.moderate),
            fmt_real(thresholds.heavy)
        ),
    );
    let table: Vec<String> = YClass::ALL
        .iter()
        .map(|&c| {
            let (a0, a1) = a_table.get(c);
            format!("{}=({},{})", c.as_str(), fmt_real(a0), fmt_real(a1))
        })
        .collect();
    t.meta("a_table", table.join(" "));
    t.meta("replacement", if replacement { "with" } else { "without" });
    t.meta("dataset_pairs", full.len().to_string());
    t.meta("dataset_x_values", full.x_arity().to_string());
    let sizes = classes.class_sizes();
    let sizes: Vec<String> = YClass::ALL
        .iter()
        .map(|c| format!("{}={}", c.as_str(), sizes.get(c).copied().unwrap_or(0)))
        .collect();
    t.meta("class_sizes", sizes.join(" "));
    t.meta("full_data_mi_bits", fmt_real(full_estimate.mi_bits));
    t.meta(
        "full_data_mi_unclipped_bits",
        fmt_real(full_estimate.mi_unclipped_bits),
    );
    for (k, v) in meta {
        t.meta(k, v);
    }
    for (i, row) in rows.iter().enumerate() {
        if let Some(e) = &row.error {
            t.meta(format!("row_error.{i}"), e.clone());
        }
        t.push(vec![
            Cell::Int(row.n as u64),
            Cell::Real(row.mean_mi_bits),
            Cell::Real(row.std_error_bits),
            Cell::Real(row.mean_mi_unclipped_bits),
            Cell::Real(row.std_error_unclipped_bits),
            Cell::Int(row.replicates as u64),
        ]);
    }
    Ok(t)
}
