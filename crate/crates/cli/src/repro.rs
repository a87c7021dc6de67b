//! Study reproduction workflows with embedded checks.
//!
//! `repro toy` is fully self-contained. `repro wwq` and `repro cmc` need the
//! UCI files on disk (`data/winequality-white.csv`, `data/cmc.data` by
//! default). Every run writes its artifacts plus a deterministic manifest;
//! the exit code is 0 only when all embedded checks pass.

use std::path::{Path, PathBuf};

use serde_json::json;

use rfexplain::baselines::{
    curve_to_csv, ice_curves, ice_to_csv, partial_dependence, sensitivity_analysis, GridSpec,
};
use rfexplain::data::{ColumnValues, Dataset, LoadOptions, TargetKind};
use rfexplain::decompose::{
    contributions_to_csv, contributions_to_json, feature_contributions, oob_feature_contributions,
    split_displacement, verify_decomposition,
};
use rfexplain::error::Error;
use rfexplain::forest::{train_forest, Task, TrainConfig};
use rfexplain::gov::{gov_interaction, main_effect_gov_all, FittedKernel, GovReport, KernelConfig};
use rfexplain::sim::{bin_target, simulate_toy, ToyConfig};
use rfexplain::viz::{
    aligned_class_plot, fit_pca, interaction_plot, main_effect_plots, pca_gradient, simplex_plot,
    ColorGradient, GradientMapping, PlotBundle, SimplexSource,
};

use crate::commands::{effective_prior, emit_bundles};
use crate::manifest::RunManifest;
use crate::{CliError, ReproArgs};

struct Checks {
    failures: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, label: &str, detail: String) {
        println!("[{}] {label}: {detail}", if ok { "ok" } else { "FAIL" });
        if !ok {
            self.failures.push(format!("{label}: {detail}"));
        }
    }

    fn finish(self) -> Result<(), CliError> {
        if self.failures.is_empty() {
            println!("all checks passed");
            Ok(())
        } else {
            Err(CliError::Checks(self.failures))
        }
    }
}

pub fn run(args: &ReproArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    match args.study.as_str() {
        "toy" => toy(args),
        "wwq" => wwq(args),
        "cmc" => cmc(args),
        other => Err(Error::Config(format!("unknown study '{other}' (toy | wwq | cmc)")).into()),
    }
}

fn mean_center(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - m).collect()
}

fn rmse(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt()
}

fn write_gov_table(
    dir: &Path,
    reports: &[GovReport],
    extra: &[&GovReport],
) -> Result<Vec<PathBuf>, Error> {
    let txt = dir.join("gov_table.txt");
    let mut out = String::new();
    for report in reports.iter().chain(extra.iter().copied()) {
        let score = report
            .score
            .map(|s| format!("{s:.6}"))
            .unwrap_or_else(|| "undefined".into());
        out.push_str(&format!(
            "{:<24} context={:<12} score={score} k={} rows={}\n",
            report.response,
            report
                .context
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(","),
            report.k,
            report.rows_used.len()
        ));
    }
    std::fs::write(&txt, out).map_err(|e| Error::io(&txt, e))?;
    let json_path = dir.join("gov.json");
    let mut all: Vec<&GovReport> = reports.iter().collect();
    all.extend(extra.iter().copied());
    let text = serde_json::to_string_pretty(&all).map_err(|e| Error::ModelParse(e.to_string()))?;
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(vec![txt, json_path])
}

fn toy(args: &ReproArgs) -> Result<(), CliError> {
    let dir = &args.out_dir;
    let seed = args.seed;
    let mut checks = Checks::new();
    let mut files: Vec<PathBuf> = Vec::new();

    // data
    let sim = simulate_toy(&ToyConfig {
        n: 5000,
        seed,
        ..Default::default()
    })?;
    let ds = &sim.dataset;
    let data_path = dir.join("toy.csv");
    rfexplain::data::write_csv(&data_path, ds, &[("g_true", &sim.hidden)])?;
    files.push(data_path);

    // regression model
    let reg = train_forest(
        ds,
        &TrainConfig {
            n_tree: 500,
            seed,
            ..TrainConfig::new(Task::Regression)
        },
    )?;

    // decomposition, both variants
    let plain = feature_contributions(&reg, ds)?;
    let plain_preds = reg.predict(ds)?;
    let report = verify_decomposition(&plain, &plain_preds)?;
    checks.check(
        report.pass,
        "regression plain reconstruction",
        format!("max residual {:e}", report.max_residual),
    );
    let oob = oob_feature_contributions(&reg, ds)?;
    let oob_preds = reg.predict_oob(ds)?;
    let report = verify_decomposition(&oob, &oob_preds)?;
    checks.check(
        report.pass,
        "regression oob reconstruction",
        format!("max residual {:e}", report.max_residual),
    );
    checks.check(
        oob.n_undefined() == 0,
        "oob coverage",
        format!("{} rows never out-of-bag", oob.n_undefined()),
    );
    let contrib_path = dir.join("contributions_oob.json");
    contributions_to_json(&oob, &contrib_path)?;
    files.push(contrib_path);
    let contrib_csv = dir.join("contributions_oob.csv");
    contributions_to_csv(&oob, &contrib_csv)?;
    files.push(contrib_csv);

    // gov table and bands
    let kernel = KernelConfig::default();
    let reports = main_effect_gov_all(&oob, ds, &kernel)?;
    let pair = gov_interaction(&oob, ds, 2, 3, true, kernel.clone())?;
    files.extend(write_gov_table(dir, &reports, &[&pair])?);
    let score = |i: usize| reports[i].score.unwrap_or(0.0);
    checks.check(
        score(0) >= 0.90,
        "gov x1 main effect",
        format!("{:.4}", score(0)),
    );
    checks.check(
        score(1) >= 0.90,
        "gov x2 main effect",
        format!("{:.4}", score(1)),
    );
    checks.check(
        score(2) <= 0.30,
        "gov x3 main effect",
        format!("{:.4}", score(2)),
    );
    checks.check(
        score(3) <= 0.30,
        "gov x4 main effect",
        format!("{:.4}", score(3)),
    );
    checks.check(
        pair.score.unwrap_or(0.0) >= 0.80,
        "gov x3+x4 pair context",
        format!("{:.4}", pair.score.unwrap_or(0.0)),
    );

    // interaction shape: sign(z) vs sign(x3*x4)
    let (ColumnValues::Numeric(x3), ColumnValues::Numeric(x4)) =
        (&ds.columns[2].values, &ds.columns[3].values)
    else {
        unreachable!("toy features are numeric")
    };
    let mut hits = 0usize;
    let mut total = 0usize;
    for i in 0..ds.n_rows {
        if !oob.is_defined(i) {
            continue;
        }
        let prod = x3[i] * x4[i];
        if prod.abs() > 0.25 {
            total += 1;
            let z = oob.get(i, 3, 0) + oob.get(i, 4, 0);
            if (z > 0.0) == (prod > 0.0) {
                hits += 1;
            }
        }
    }
    let agreement = hits as f64 / total as f64;
    checks.check(
        agreement >= 0.85,
        "interaction saddle sign agreement",
        format!("{hits}/{total} = {agreement:.3}"),
    );

    // plots: main effects with a gradient along x3, plus the interaction
    let gradient = ColorGradient::feature(ds, 2, GradientMapping::Linear)?;
    let mut bundles: Vec<(String, PlotBundle)> =
        main_effect_plots(&oob, ds, &gradient, Some(&kernel))?
            .into_iter()
            .enumerate()
            .map(|(rank, b)| (format!("main_{:02}_{}", rank + 1, b.x_label.clone()), b))
            .collect();
    bundles.push((
        "interact_x3_x4".into(),
        interaction_plot(&oob, ds, 2, 3, true, &gradient, Some(&kernel))?,
    ));

    // baselines on the same model
    let grid_x1 = GridSpec::observed(ds, &[0], 50)?;
    let sa = sensitivity_analysis(&reg, ds, &grid_x1)?;
    let sa_path = dir.join("baseline_sa_x1.csv");
    curve_to_csv(&sa, None, &sa_path)?;
    files.push(sa_path);
    let centroid = rfexplain::baselines::centroid_row(ds);
    let centroid_ice = ice_curves(&reg, &centroid, &grid_x1, false)?;
    checks.check(
        sa.values == centroid_ice.values,
        "sa equals centroid ice",
        format!("{} grid points", grid_x1.n_points()),
    );

    let grid_x2 = GridSpec::observed(ds, &[1], 50)?;
    let pd = partial_dependence(&reg, ds, &grid_x2)?;
    let pd_path = dir.join("baseline_pd_x2.csv");
    curve_to_csv(&pd, None, &pd_path)?;
    files.push(pd_path);
    let ice_x2 = ice_curves(&reg, ds, &grid_x2, false)?;
    checks.check(
        pd.values == ice_x2.mean_curve(),
        "pd equals mean ice",
        format!("{} grid points", grid_x2.n_points()),
    );

    // centered PD tracks the kernel-estimated x2 main effect
    let rows: Vec<usize> = (0..ds.n_rows).filter(|&i| oob.is_defined(i)).collect();
    let responses: Vec<f64> = rows.iter().map(|&i| oob.get(i, 2, 0)).collect();
    let fitted = FittedKernel::fit(ds, &[1], &rows, responses, &kernel)?;
    let pd_vals: Vec<f64> = (0..grid_x2.n_points()).map(|p| pd.point(p)[0]).collect();
    let curve: Vec<f64> = (0..grid_x2.n_points())
        .map(|p| fitted.predict(&[grid_x2.point_coords(p)[0]]))
        .collect();
    let err = rmse(&mean_center(&pd_vals), &mean_center(&curve));
    checks.check(
        err < 0.1,
        "centered pd tracks x2 main effect",
        format!("rmse {err:.4}"),
    );

    let grid_x3 = GridSpec::observed(ds, &[2], 25)?;
    let ice_x3 = ice_curves(&reg, ds, &grid_x3, true)?;
    let ice_path = dir.join("baseline_ice_x3.csv");
    ice_to_csv(&ice_x3, None, &ice_path)?;
    files.push(ice_path);

    // classification companion: terciles, stratified to uniform
    let ds_clf = bin_target(ds, 3)?;
    let clf = train_forest(
        &ds_clf,
        &TrainConfig {
            n_tree: 500,
            seed,
            stratify: Some(vec![1500, 1500, 1500]),
            sample_size: Some(4500),
            ..TrainConfig::new(Task::Classification)
        },
    )?;

    let clf_plain = feature_contributions(&clf, &ds_clf)?;
    let report = verify_decomposition(&clf_plain, &clf.predict(&ds_clf)?)?;
    checks.check(
        report.pass,
        "classification plain reconstruction",
        format!("max residual {:e}", report.max_residual),
    );
    let clf_oob = oob_feature_contributions(&clf, &ds_clf)?;
    let report = verify_decomposition(&clf_oob, &clf.predict_oob(&ds_clf)?)?;
    checks.check(
        report.pass,
        "classification oob reconstruction",
        format!("max residual {:e}", report.max_residual),
    );

    // aligned plots for the two highest-variance features, zero-sum check
    let mut order: Vec<usize> = (0..clf_oob.n_features).collect();
    order.sort_by(|&a, &b| {
        clf_oob
            .feature_variance(b)
            .total_cmp(&clf_oob.feature_variance(a))
            .then(a.cmp(&b))
    });
    let mut max_row_sum = 0.0f64;
    for &f in order.iter().take(2) {
        let bundle = aligned_class_plot(&clf_oob, &ds_clf, f)?;
        let mut sums: std::collections::HashMap<usize, f64> = std::collections::HashMap::new();
        for p in &bundle.points {
            *sums.entry(p.row).or_insert(0.0) += p.y;
        }
        for (_, s) in sums {
            max_row_sum = max_row_sum.max(s.abs());
        }
        bundles.push((format!("aligned_{}", ds_clf.columns[f].name), bundle));
    }
    checks.check(
        max_row_sum <= 1e-9,
        "aligned class zero-sum",
        format!("max row sum {max_row_sum:e}"),
    );

    // simplex plots: predictions plus the top feature displacement
    let labels = clf.class_labels().unwrap().to_vec();
    let marker = effective_prior(&clf);
    checks.check(
        marker.iter().all(|&m| (m - 1.0 / 3.0).abs() <= 1e-12),
        "stratified prior at simplex centroid",
        format!("{marker:?}"),
    );
    let class_grad = ColorGradient::class_label(ds_clf.class_codes().unwrap());
    let oob_pred = clf.predict_oob(&ds_clf)?;
    bundles.push((
        "simplex_pred_class".into(),
        simplex_plot(
            &SimplexSource::Predictions(&oob_pred),
            &class_grad,
            &clf.base_rate,
            &marker,
            &labels,
            "oob predictions (true class)",
        )?,
    ));
    bundles.push((
        "simplex_pred_pca".into(),
        simplex_plot(
            &SimplexSource::Predictions(&oob_pred),
            &pca_gradient(&ds_clf)?,
            &clf.base_rate,
            &marker,
            &labels,
            "oob predictions (pca gradient)",
        )?,
    ));
    for &f in order.iter().take(2) {
        let name = ds_clf.columns[f].name.clone();
        bundles.push((
            format!("simplex_{name}_class"),
            simplex_plot(
                &SimplexSource::Contributions {
                    matrix: &clf_oob,
                    feature: f,
                },
                &class_grad,
                &clf.base_rate,
                &marker,
                &labels,
                format!("displacement: {name} (true class)"),
            )?,
        ));
        bundles.push((
            format!("simplex_{name}_feature"),
            simplex_plot(
                &SimplexSource::Contributions {
                    matrix: &clf_oob,
                    feature: f,
                },
                &ColorGradient::feature(&ds_clf, f, GradientMapping::Linear)?,
                &clf.base_rate,
                &marker,
                &labels,
                format!("displacement: {name} (feature gradient)"),
            )?,
        ));
    }

    let plot_files = emit_bundles(&bundles, dir, &Default::default())?;
    let svg_count = plot_files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "svg"))
        .count();
    checks.check(
        svg_count >= 8,
        "plot suite size",
        format!("{svg_count} svg files"),
    );
    files.extend(plot_files);

    let mut manifest = RunManifest::new("repro toy").with_config(json!({
        "seed": seed, "n": 5000, "n_tree": 500,
    }));
    manifest.seed = Some(seed);
    for f in &files {
        manifest.record_output(f);
    }
    manifest.write(dir.join("manifest.json"))?;
    checks.finish()
}

fn require_data(path: &Option<PathBuf>, default: &str, study: &str) -> Result<PathBuf, CliError> {
    let path = path.clone().unwrap_or_else(|| PathBuf::from(default));
    if !path.exists() {
        return Err(CliError::Core(Error::io(
            &path,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{study} needs the UCI file; pass --data or place it at {default}"),
            ),
        )));
    }
    Ok(path)
}

pub fn load_wwq(path: &Path) -> Result<Dataset, Error> {
    let mut opts = LoadOptions::new("quality", TargetKind::Numeric);
    opts.delimiter = b';';
    load_csv(path, &opts)
}

fn load_csv(path: &Path, opts: &LoadOptions) -> Result<Dataset, Error> {
    rfexplain::data::load_csv(path, opts)
}

fn wwq(args: &ReproArgs) -> Result<(), CliError> {
    let dir = &args.out_dir;
    let seed = args.seed;
    let mut checks = Checks::new();
    let data_path = require_data(&args.data, "data/winequality-white.csv", "wwq")?;
    let ds = load_wwq(&data_path)?;
    checks.check(
        ds.n_features() == 11,
        "wwq schema",
        format!("{} rows, {} chemical features", ds.n_rows, ds.n_features()),
    );

    let model = train_forest(
        &ds,
        &TrainConfig {
            n_tree: 500,
            seed,
            ..TrainConfig::new(Task::Regression)
        },
    )?;

    let oob_preds = model.predict_oob(&ds)?;
    let y = ds.numeric_target().unwrap();
    let ev = oob_preds.explained_variance(y);
    let mae = oob_preds.mean_absolute_error(y);
    checks.check(
        (ev - 0.56).abs() <= 0.05,
        "oob explained variance",
        format!("{ev:.4} (expected 0.56 +/- 0.05)"),
    );
    checks.check(
        (mae - 0.42).abs() <= 0.05,
        "oob mean absolute error",
        format!("{mae:.4} (expected 0.42 +/- 0.05)"),
    );

    let oob = oob_feature_contributions(&model, &ds)?;
    let report = verify_decomposition(&oob, &oob_preds)?;
    checks.check(
        report.pass,
        "oob reconstruction",
        format!("max residual {:e}", report.max_residual),
    );

    let volatile = ds.feature_index("volatile acidity").unwrap_or(1);
    let alcohol = ds.feature_index("alcohol").unwrap_or(10);
    let kernel = KernelConfig::default();
    let pair = gov_interaction(&oob, &ds, volatile, alcohol, false, kernel.clone())?;
    checks.check(
        pair.score.unwrap_or(0.0) >= 0.85,
        "gov volatile acidity | {volatile acidity, alcohol}",
        format!("{:.4}", pair.score.unwrap_or(0.0)),
    );

    // collinear trio carries its variance in two components
    let trio: Vec<usize> = ["residual sugar", "density", "alcohol"]
        .iter()
        .filter_map(|n| ds.feature_index(n))
        .collect();
    if trio.len() == 3 {
        let pca = fit_pca(&ds, &trio)?;
        let frac = pca.explained_fraction(2);
        checks.check(
            frac >= 0.95,
            "pca of sugar/density/alcohol",
            format!("top-2 components carry {frac:.4}"),
        );
    }

    let reports = main_effect_gov_all(&oob, &ds, &kernel)?;
    let mut files = write_gov_table(dir, &reports, &[&pair])?;

    let gradient = ColorGradient::feature(&ds, alcohol, GradientMapping::Linear)?;
    let mut bundles: Vec<(String, PlotBundle)> =
        main_effect_plots(&oob, &ds, &gradient, Some(&kernel))?
            .into_iter()
            .enumerate()
            .map(|(rank, b)| {
                let stem = b.x_label.replace(' ', "_");
                (format!("main_{:02}_{stem}", rank + 1), b)
            })
            .collect();
    bundles.push((
        "interact_volatile_acidity_alcohol".into(),
        interaction_plot(
            &oob,
            &ds,
            volatile,
            alcohol,
            false,
            &gradient,
            Some(&kernel),
        )?,
    ));
    files.extend(emit_bundles(&bundles, dir, &Default::default())?);

    let mut manifest = RunManifest::new("repro wwq").with_config(json!({
        "seed": seed, "n_tree": 500,
    }));
    manifest.seed = Some(seed);
    manifest.record_input(&data_path)?;
    for f in &files {
        manifest.record_output(f);
    }
    manifest.write(dir.join("manifest.json"))?;
    checks.finish()
}

pub const CMC_COLUMNS: [&str; 10] = [
    "wife_age",
    "wife_education",
    "husband_education",
    "n_children",
    "wife_religion",
    "wife_working",
    "husband_occupation",
    "standard_of_living",
    "media_exposure",
    "contraceptive",
];

pub fn load_cmc(path: &Path) -> Result<Dataset, Error> {
    let mut opts = LoadOptions::new("contraceptive", TargetKind::Classes);
    opts.headers = Some(CMC_COLUMNS.iter().map(|s| s.to_string()).collect());
    // the binary flags are categorical; ordered scales stay numeric
    opts.categorical = vec![
        "wife_religion".into(),
        "wife_working".into(),
        "media_exposure".into(),
    ];
    load_csv(path, &opts)
}

fn cmc(args: &ReproArgs) -> Result<(), CliError> {
    let dir = &args.out_dir;
    let seed = args.seed;
    let mut checks = Checks::new();
    let data_path = require_data(&args.data, "data/cmc.data", "cmc")?;
    let ds = load_cmc(&data_path)?;

    checks.check(
        ds.n_rows == 1473 && ds.n_features() == 9,
        "cmc schema",
        format!("{} rows, {} features", ds.n_rows, ds.n_features()),
    );
    let labels = match &ds.target {
        rfexplain::data::Target::Classes { labels, .. } => labels.clone(),
        rfexplain::data::Target::Numeric(_) => unreachable!("classes requested"),
    };
    let codes = ds.class_codes().unwrap();
    let count_of = |label: &str| -> usize {
        labels
            .iter()
            .position(|l| l == label)
            .map(|k| codes.iter().filter(|&&c| c as usize == k).count())
            .unwrap_or(0)
    };
    let (no_use, long_term, short_term) = (count_of("1"), count_of("2"), count_of("3"));
    checks.check(
        (no_use, long_term, short_term) == (629, 333, 511),
        "cmc class sizes",
        format!("no-use {no_use}, long-term {long_term}, short-term {short_term}"),
    );
    let majority_baseline = 1.0 - no_use as f64 / ds.n_rows as f64;
    checks.check(
        (majority_baseline - 0.573).abs() <= 5e-4,
        "majority-class baseline",
        format!("{majority_baseline:.4}"),
    );

    let model = train_forest(
        &ds,
        &TrainConfig {
            n_tree: 500,
            seed,
            sample_size: Some(100),
            mtry: Some(2),
            ..TrainConfig::new(Task::Classification)
        },
    )?;

    let oob_preds = model.predict_oob(&ds)?;
    let error_rate = oob_preds.class_error_rate(codes);
    checks.check(
        (error_rate - 0.44).abs() <= 0.03,
        "oob error rate",
        format!(
            "{error_rate:.4} (expected 0.44 +/- 0.03, majority baseline {majority_baseline:.3})"
        ),
    );

    let oob = oob_feature_contributions(&model, &ds)?;
    let report = verify_decomposition(&oob, &oob_preds)?;
    checks.check(
        report.pass,
        "oob reconstruction",
        format!("max residual {:e}", report.max_residual),
    );

    // binary features: in-bag weighted displacement balances to zero and the
    // smaller subgroup moves further
    for name in ["wife_religion", "wife_working", "media_exposure"] {
        let f = ds.feature_index(name).unwrap();
        let disp = split_displacement(&model, f);
        if disp.n_splits == 0 {
            checks.check(false, name, "never split on".into());
            continue;
        }
        let max_balance = disp
            .balance()
            .iter()
            .fold(0.0f64, |acc, b| acc.max(b.abs()));
        // scale-free: per unit of accumulated in-bag weight
        let scale = disp.left_weight + disp.right_weight;
        let relative = max_balance / scale;
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (small, large) = if disp.left_weight < disp.right_weight {
            (norm(&disp.mean_left()), norm(&disp.mean_right()))
        } else {
            (norm(&disp.mean_right()), norm(&disp.mean_left()))
        };
        checks.check(
            relative <= 1e-9 && small > large,
            &format!("binary displacement: {name}"),
            format!(
                "balance {relative:e}, small-group move {small:.4} vs large-group {large:.4} over {} splits",
                disp.n_splits
            ),
        );
    }

    // n_children contribution band for the no-use class
    let n_children = ds.feature_index("n_children").unwrap();
    let no_use_class = labels.iter().position(|l| l == "1").unwrap();
    let mut band: f64 = 0.0;
    for i in 0..ds.n_rows {
        if oob.is_defined(i) && ds.columns[n_children].numeric_coded(i) <= 1.0 {
            band = band.max(oob.get(i, n_children + 1, no_use_class).abs());
        }
    }
    checks.check(
        band >= 0.15,
        "n_children no-use band",
        format!("max |contribution| {band:.3} for rows with <= 1 child"),
    );

    // plot suite: prediction simplex pair + per-feature bi-simplexes +
    // aligned plots
    let marker = effective_prior(&model);
    let class_grad = ColorGradient::class_label(codes);
    let mut bundles: Vec<(String, PlotBundle)> = vec![
        (
            "simplex_pred_class".into(),
            simplex_plot(
                &SimplexSource::Predictions(&oob_preds),
                &class_grad,
                &model.base_rate,
                &marker,
                &labels,
                "oob predictions (true class)",
            )?,
        ),
        (
            "simplex_pred_pca".into(),
            simplex_plot(
                &SimplexSource::Predictions(&oob_preds),
                &pca_gradient(&ds)?,
                &model.base_rate,
                &marker,
                &labels,
                "oob predictions (pca gradient)",
            )?,
        ),
    ];
    for f in 0..ds.n_features() {
        let name = ds.columns[f].name.clone();
        bundles.push((
            format!("simplex_{name}_class"),
            simplex_plot(
                &SimplexSource::Contributions {
                    matrix: &oob,
                    feature: f,
                },
                &class_grad,
                &model.base_rate,
                &marker,
                &labels,
                format!("displacement: {name} (true class)"),
            )?,
        ));
        bundles.push((
            format!("simplex_{name}_feature"),
            simplex_plot(
                &SimplexSource::Contributions {
                    matrix: &oob,
                    feature: f,
                },
                &ColorGradient::feature(&ds, f, GradientMapping::Linear)?,
                &model.base_rate,
                &marker,
                &labels,
                format!("displacement: {name} (feature gradient)"),
            )?,
        ));
        bundles.push((format!("aligned_{name}"), aligned_class_plot(&oob, &ds, f)?));
    }

    let files = emit_bundles(&bundles, dir, &Default::default())?;

    let mut manifest = RunManifest::new("repro cmc").with_config(json!({
        "seed": seed, "n_tree": 500, "sample_size": 100, "mtry": 2,
    }));
    manifest.seed = Some(seed);
    manifest.record_input(&data_path)?;
    for f in &files {
        manifest.record_output(f);
    }
    manifest.write(dir.join("manifest.json"))?;
    checks.finish()
}
