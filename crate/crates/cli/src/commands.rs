//! Single-step commands.

use std::path::{Path, PathBuf};

use serde_json::json;

use rfexplain::baselines::{
    curve_to_csv, ice_curves, ice_to_csv, partial_dependence, sensitivity_analysis, GridSpec,
};
use rfexplain::data::{load_csv, Dataset, LoadOptions, TargetKind};
use rfexplain::decompose::{
    contributions_to_csv, contributions_to_json, feature_contributions, oob_feature_contributions,
    verify_decomposition, ContributionMatrix,
};
use rfexplain::error::Error;
use rfexplain::forest::{train_forest, ForestModel, TargetSchema, Task, TrainConfig};
use rfexplain::gov::{
    gov_interaction, gov_score, main_effect_gov_all, GovReport, GovRequest, KernelConfig,
};
use rfexplain::model_io::{load_model, save_model};
use rfexplain::sim::{simulate_toy, ToyConfig, ToyGenerator};
use rfexplain::viz::{
    aligned_class_plot, bundle_to_csv, interaction_plot, main_effect_plot, main_effect_plots,
    pca_gradient, render_svg, simplex_plot, ColorGradient, GradientMapping, Overlay, PlotBundle,
    PlotManifestEntry, RenderOptions, SimplexSource,
};

use crate::manifest::{manifest_path_for, RunManifest};
use crate::{
    BaselineArgs, BaselineCommon, BaselineKindCmd, CliError, DataArgs, DecomposeArgs, GovArgs,
    PlotArgs, PlotCommon, PlotKindCmd, SimulateArgs, TrainArgs,
};

type CliResult = Result<(), CliError>;

impl DataArgs {
    pub fn load(&self, kind: TargetKind) -> Result<Dataset, Error> {
        let mut opts = LoadOptions::new(&self.target, kind);
        opts.categorical = self.categorical.clone();
        opts.ignore = self.ignore.clone();
        let delim = self.delimiter.as_bytes();
        if delim.len() != 1 {
            return Err(Error::Config(format!(
                "delimiter must be one byte, got '{}'",
                self.delimiter
            )));
        }
        opts.delimiter = delim[0];
        if self.no_header {
            if self.columns.is_empty() {
                return Err(Error::Config("--no-header requires --columns names".into()));
            }
            opts.headers = Some(self.columns.clone());
        }
        load_csv(&self.data, &opts)
    }

    pub fn load_for_model(&self, model: &ForestModel) -> Result<Dataset, Error> {
        let kind = match &model.target_schema {
            TargetSchema::Numeric => TargetKind::Numeric,
            TargetSchema::Classes { .. } => TargetKind::Classes,
        };
        self.load(kind)
    }
}

pub fn feature_index(dataset: &Dataset, name: &str) -> Result<usize, Error> {
    dataset
        .feature_index(name)
        .ok_or_else(|| Error::Config(format!("no feature named '{name}'")))
}

pub fn simulate(args: &SimulateArgs) -> CliResult {
    let generator = match args.generator.as_str() {
        "toy4" => ToyGenerator::Toy4,
        "sinehill" => ToyGenerator::SineHill,
        other => {
            return Err(
                Error::Config(format!("unknown generator '{other}' (toy4 | sinehill)")).into(),
            )
        }
    };
    let config = ToyConfig {
        n: args.n,
        seed: args.seed,
        rho: args.rho,
        generator,
    };
    let sim = simulate_toy(&config)?;
    rfexplain::data::write_csv(&args.out, &sim.dataset, &[("g_true", &sim.hidden)])?;
    println!(
        "wrote {} rows x {} features to {} (noise scale {:.6})",
        sim.dataset.n_rows,
        sim.dataset.n_features(),
        args.out.display(),
        sim.noise_scale
    );
    let mut manifest = RunManifest::new("simulate").with_config(json!({
        "n": args.n, "seed": args.seed, "rho": args.rho, "generator": args.generator,
    }));
    manifest.seed = Some(args.seed);
    manifest.record_output(&args.out);
    manifest.write(manifest_path_for(&args.out))?;
    Ok(())
}

pub fn parse_task(task: &str) -> Result<Task, Error> {
    match task {
        "regression" => Ok(Task::Regression),
        "classification" => Ok(Task::Classification),
        other => Err(Error::Config(format!(
            "unknown task '{other}' (regression | classification)"
        ))),
    }
}

fn parse_stratify(spec: &str, dataset: &Dataset) -> Result<Vec<usize>, Error> {
    let labels = match &dataset.target {
        rfexplain::data::Target::Classes { labels, .. } => labels.clone(),
        rfexplain::data::Target::Numeric(_) => {
            return Err(Error::Config(
                "stratified sampling is only defined for classification".into(),
            ))
        }
    };
    let mut counts = vec![0usize; labels.len()];
    for part in spec.split(',') {
        let (label, count) = part
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("stratify entry '{part}' is not label:count")))?;
        let idx = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Config(format!("unknown class label '{label}'")))?;
        counts[idx] = count
            .parse()
            .map_err(|_| Error::Config(format!("bad count in '{part}'")))?;
    }
    Ok(counts)
}

pub fn train(args: &TrainArgs) -> CliResult {
    let task = parse_task(&args.task)?;
    let kind = match task {
        Task::Regression => TargetKind::Numeric,
        Task::Classification => TargetKind::Classes,
    };
    let dataset = args.data.load(kind)?;
    let stratify = args
        .stratify
        .as_deref()
        .map(|s| parse_stratify(s, &dataset))
        .transpose()?;
    let config = TrainConfig {
        task,
        n_tree: args.ntree,
        mtry: args.mtry,
        sample_size: args.sampsize,
        replace: args.replace,
        stratify,
        min_node_size: args.min_node,
        seed: args.seed,
        max_categorical_levels: args.max_cat_levels,
    };
    let model = train_forest(&dataset, &config)?;
    save_model(&model, &args.out)?;
    let nodes: usize = model.trees.iter().map(|t| t.nodes.len()).sum();
    println!(
        "trained {} trees ({} nodes) on {} rows; model written to {}",
        model.config.n_tree,
        nodes,
        dataset.n_rows,
        args.out.display()
    );
    let mut manifest = RunManifest::new("train").with_config(&model.config);
    manifest.seed = Some(args.seed);
    manifest.record_input(&args.data.data)?;
    manifest.record_output(&args.out);
    manifest.write(manifest_path_for(&args.out))?;
    Ok(())
}

pub fn decompose(args: &DecomposeArgs) -> CliResult {
    let model = load_model(&args.model)?;
    let dataset = args.data.load_for_model(&model)?;
    let (contributions, predictions) = if args.oob {
        (
            oob_feature_contributions(&model, &dataset)?,
            model.predict_oob(&dataset)?,
        )
    } else {
        (
            feature_contributions(&model, &dataset)?,
            model.predict(&dataset)?,
        )
    };
    let report = verify_decomposition(&contributions, &predictions)?;
    println!(
        "max reconstruction residual: {:e} over {} rows ({})",
        report.max_residual,
        report.rows_checked,
        if report.pass { "pass" } else { "FAIL" }
    );
    if contributions.n_undefined() > 0 {
        println!(
            "{} rows undefined (never out-of-bag)",
            contributions.n_undefined()
        );
    }
    contributions_to_json(&contributions, &args.out)?;
    if let Some(csv) = &args.csv {
        contributions_to_csv(&contributions, csv)?;
    }
    let mut manifest = RunManifest::new("decompose").with_config(json!({
        "oob": args.oob,
        "max_residual": format!("{:e}", report.max_residual),
    }));
    manifest.record_input(&args.model)?;
    manifest.record_input(&args.data.data)?;
    manifest.record_output(&args.out);
    if let Some(csv) = &args.csv {
        manifest.record_output(csv);
    }
    manifest.write(manifest_path_for(&args.out))?;
    if !report.pass {
        return Err(CliError::Checks(vec![format!(
            "decomposition residual {:e} above 1e-9",
            report.max_residual
        )]));
    }
    Ok(())
}

fn gov_table_line(report: &GovReport) -> String {
    let score = match report.score {
        Some(s) => format!("{s:.6}"),
        None => "undefined".into(),
    };
    let mut line = format!(
        "{:<24} score={score:<10} k={:<4} rows={}",
        report.response,
        report.k,
        report.rows_used.len()
    );
    if report.per_class.len() > 1 {
        let per: Vec<String> = report
            .per_class
            .iter()
            .map(|d| {
                format!(
                    "c{}={}",
                    d.class.unwrap_or(0),
                    d.score.map(|s| format!("{s:.4}")).unwrap_or("na".into())
                )
            })
            .collect();
        line.push_str(&format!(" [{}]", per.join(" ")));
    }
    if let Some(d) = &report.degenerate {
        line.push_str(&format!(" ({d})"));
    }
    line
}

pub fn gov(args: &GovArgs) -> CliResult {
    let model = load_model(&args.model)?;
    let dataset = args.data.load_for_model(&model)?;
    let contributions = contributions_for(&model, &dataset, args.plain)?;
    let kernel = KernelConfig { k: args.k };
    let reports: Vec<GovReport> = match &args.feature {
        Some(name) => {
            let feature = feature_index(&dataset, name)?;
            let context: Vec<usize> = if args.context.is_empty() {
                vec![feature]
            } else {
                args.context
                    .iter()
                    .map(|n| feature_index(&dataset, n))
                    .collect::<Result<_, _>>()?
            };
            let report = if args.summed {
                if context.len() != 2 {
                    return Err(
                        Error::Config("--summed needs a two-feature --context".into()).into(),
                    );
                }
                gov_interaction(
                    &contributions,
                    &dataset,
                    context[0],
                    context[1],
                    true,
                    kernel,
                )?
            } else {
                gov_score(
                    &contributions,
                    &dataset,
                    &GovRequest {
                        feature,
                        context,
                        class: None,
                        kernel,
                    },
                )?
            };
            vec![report]
        }
        None => main_effect_gov_all(&contributions, &dataset, &kernel)?,
    };
    for report in &reports {
        println!("{}", gov_table_line(report));
    }
    if let Some(path) = &args.json {
        let text =
            serde_json::to_string_pretty(&reports).map_err(|e| Error::ModelParse(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
        let mut manifest = RunManifest::new("gov").with_config(json!({
            "plain": args.plain, "k": args.k,
        }));
        manifest.record_input(&args.model)?;
        manifest.record_input(&args.data.data)?;
        manifest.record_output(path);
        manifest.write(manifest_path_for(path))?;
    }
    Ok(())
}

pub fn contributions_for(
    model: &ForestModel,
    dataset: &Dataset,
    plain: bool,
) -> Result<ContributionMatrix, Error> {
    if plain {
        feature_contributions(model, dataset)
    } else {
        oob_feature_contributions(model, dataset)
    }
}

pub fn parse_gradient(
    spec: Option<&str>,
    dataset: &Dataset,
    default_feature: usize,
) -> Result<ColorGradient, Error> {
    match spec {
        None => ColorGradient::feature(dataset, default_feature, GradientMapping::Linear),
        Some("pca") => pca_gradient(dataset),
        Some("class") => {
            let codes = dataset.class_codes().ok_or_else(|| {
                Error::Config("class coloring needs a classification target".into())
            })?;
            Ok(ColorGradient::class_label(codes))
        }
        Some(other) => match other.strip_prefix("feature:") {
            Some(name) => {
                let f = feature_index(dataset, name)?;
                ColorGradient::feature(dataset, f, GradientMapping::Linear)
            }
            None => Err(Error::Config(format!(
                "bad --color-by '{other}' (feature:NAME | pca | class)"
            ))),
        },
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Render a bundle set into a directory with CSV sidecars and a plot
/// manifest; returns the file list.
pub fn emit_bundles(
    bundles: &[(String, PlotBundle)],
    out_dir: &Path,
    opts: &RenderOptions,
) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (stem, bundle) in bundles {
        let svg = out_dir.join(format!("{stem}.svg"));
        let csv = out_dir.join(format!("{stem}.csv"));
        render_svg(bundle, &svg, opts)?;
        bundle_to_csv(bundle, &csv)?;
        entries.push(PlotManifestEntry {
            kind: bundle.kind,
            title: bundle.title.clone(),
            svg: svg.file_name().unwrap().to_string_lossy().into_owned(),
            csv: csv.file_name().unwrap().to_string_lossy().into_owned(),
            gov: bundle.annotations.gov,
            clip_count: bundle.annotations.clip_count,
            note: bundle.annotations.note.clone(),
        });
        files.push(svg);
        files.push(csv);
    }
    let manifest = out_dir.join("plots_manifest.json");
    let text =
        serde_json::to_string_pretty(&entries).map_err(|e| Error::ModelParse(e.to_string()))?;
    std::fs::write(&manifest, text).map_err(|e| Error::io(&manifest, e))?;
    files.push(manifest);
    Ok(files)
}

pub fn plot(args: &PlotArgs) -> CliResult {
    match &args.kind {
        PlotKindCmd::Main(common) => {
            let (model, dataset, cm) = plot_inputs(common)?;
            let kernel = KernelConfig { k: common.k };
            let with_gov = (!common.no_gov).then_some(&kernel);
            let default_color = match common.feature.as_deref() {
                Some(name) => feature_index(&dataset, name)?,
                None => top_variance_feature(&cm),
            };
            let gradient = parse_gradient(common.color_by.as_deref(), &dataset, default_color)?;
            let bundles: Vec<(String, PlotBundle)> = match common.feature.as_deref() {
                Some(name) => {
                    let f = feature_index(&dataset, name)?;
                    vec![(
                        format!("main_{}", sanitize(name)),
                        main_effect_plot(&cm, &dataset, f, &gradient, with_gov)?,
                    )]
                }
                None => main_effect_plots(&cm, &dataset, &gradient, with_gov)?
                    .into_iter()
                    .enumerate()
                    .map(|(rank, b)| (format!("main_{:02}_{}", rank + 1, sanitize(&b.x_label)), b))
                    .collect(),
            };
            finish_plots(common, &model, &bundles)
        }
        PlotKindCmd::Interact(iargs) => {
            let common = &iargs.common;
            let (model, dataset, cm) = plot_inputs(common)?;
            if iargs.features.len() != 2 {
                return Err(Error::Config("--features needs exactly two names".into()).into());
            }
            let a = feature_index(&dataset, &iargs.features[0])?;
            let b = feature_index(&dataset, &iargs.features[1])?;
            let kernel = KernelConfig { k: common.k };
            let with_gov = (!common.no_gov).then_some(&kernel);
            let gradient = parse_gradient(common.color_by.as_deref(), &dataset, b)?;
            let bundle = interaction_plot(&cm, &dataset, a, b, iargs.summed, &gradient, with_gov)?;
            let stem = format!(
                "interact_{}_{}",
                sanitize(&iargs.features[0]),
                sanitize(&iargs.features[1])
            );
            finish_plots(common, &model, &[(stem, bundle)])
        }
        PlotKindCmd::Simplex(sargs) => {
            let common = &sargs.common;
            let (model, dataset, cm) = plot_inputs(common)?;
            let labels = model
                .class_labels()
                .ok_or_else(|| Error::Config("simplex plots need a classification model".into()))?
                .to_vec();
            let gradient = match common.color_by.as_deref() {
                None => ColorGradient::class_label(dataset.class_codes().unwrap()),
                other => parse_gradient(other, &dataset, 0)?,
            };
            let mut bundles = Vec::new();
            let marker = effective_prior(&model);
            if sargs.predictions {
                let preds = if common.plain {
                    model.predict(&dataset)?
                } else {
                    model.predict_oob(&dataset)?
                };
                bundles.push((
                    "simplex_predictions".to_string(),
                    simplex_plot(
                        &SimplexSource::Predictions(&preds),
                        &gradient,
                        &model.base_rate,
                        &marker,
                        &labels,
                        "predicted probabilities",
                    )?,
                ));
            } else {
                let feature = match common.feature.as_deref() {
                    Some(name) => feature_index(&dataset, name)?,
                    None => {
                        return Err(Error::Config(
                            "simplex needs --feature NAME or --predictions".into(),
                        )
                        .into())
                    }
                };
                bundles.push((
                    format!("simplex_{}", sanitize(&dataset.columns[feature].name)),
                    simplex_plot(
                        &SimplexSource::Contributions {
                            matrix: &cm,
                            feature,
                        },
                        &gradient,
                        &model.base_rate,
                        &marker,
                        &labels,
                        format!(
                            "contribution displacement: {}",
                            dataset.columns[feature].name
                        ),
                    )?,
                ));
            }
            finish_plots(common, &model, &bundles)
        }
        PlotKindCmd::Aligned(aargs) => {
            let common = &aargs.common;
            let (model, dataset, cm) = plot_inputs(common)?;
            let bundles: Vec<(String, PlotBundle)> = match common.feature.as_deref() {
                Some(name) => {
                    let f = feature_index(&dataset, name)?;
                    vec![(
                        format!("aligned_{}", sanitize(name)),
                        aligned_class_plot(&cm, &dataset, f)?,
                    )]
                }
                None => (0..dataset.n_features())
                    .map(|f| {
                        aligned_class_plot(&cm, &dataset, f)
                            .map(|b| (format!("aligned_{}", sanitize(&dataset.columns[f].name)), b))
                    })
                    .collect::<Result<_, _>>()?,
            };
            finish_plots(common, &model, &bundles)
        }
    }
}

/// The blue-cross position: the stratification rate when the model was
/// stratified, otherwise the training base rate.
pub fn effective_prior(model: &ForestModel) -> Vec<f64> {
    match &model.config.stratify {
        Some(strata) => {
            let total: usize = strata.iter().sum();
            strata.iter().map(|&c| c as f64 / total as f64).collect()
        }
        None => model.base_rate.clone(),
    }
}

pub fn top_variance_feature(cm: &ContributionMatrix) -> usize {
    (0..cm.n_features)
        .max_by(|&a, &b| {
            cm.feature_variance(a)
                .total_cmp(&cm.feature_variance(b))
                .then(b.cmp(&a))
        })
        .unwrap_or(0)
}

fn plot_inputs(
    common: &PlotCommon,
) -> Result<(ForestModel, Dataset, ContributionMatrix), CliError> {
    let model = load_model(&common.model)?;
    let dataset = common.data.load_for_model(&model)?;
    let cm = match &common.contributions {
        Some(path) => {
            let cm = rfexplain::decompose::contributions_from_json(path)?;
            if cm.n_rows != dataset.n_rows || cm.n_features != dataset.n_features() {
                return Err(Error::SchemaMismatch(format!(
                    "contribution bundle is {}x{}, dataset is {}x{}",
                    cm.n_rows,
                    cm.n_features,
                    dataset.n_rows,
                    dataset.n_features()
                ))
                .into());
            }
            cm
        }
        None => contributions_for(&model, &dataset, common.plain)?,
    };
    Ok((model, dataset, cm))
}

fn finish_plots(
    common: &PlotCommon,
    _model: &ForestModel,
    bundles: &[(String, PlotBundle)],
) -> CliResult {
    let opts = RenderOptions {
        width: common.width,
        height: common.height,
        azimuth_deg: common.azimuth,
        elevation_deg: common.elevation,
    };
    let files = emit_bundles(bundles, &common.out_dir, &opts)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    let mut manifest = RunManifest::new("plot").with_config(json!({
        "plain": common.plain,
        "color_by": common.color_by,
        "gov": !common.no_gov,
    }));
    manifest.record_input(&common.model)?;
    manifest.record_input(&common.data.data)?;
    for f in &files {
        manifest.record_output(f);
    }
    manifest.write(common.out_dir.join("manifest.json"))?;
    Ok(())
}

pub fn baseline(args: &BaselineArgs) -> CliResult {
    match &args.kind {
        BaselineKindCmd::Sa(common) => baseline_curve(common, true),
        BaselineKindCmd::Pd(common) => baseline_curve(common, false),
        BaselineKindCmd::Ice(iargs) => {
            let common = &iargs.common;
            let model = load_model(&common.model)?;
            let dataset = common.data.load_for_model(&model)?;
            if common.features.len() != 1 {
                return Err(Error::Config("ice varies exactly one feature".into()).into());
            }
            let feature = feature_index(&dataset, &common.features[0])?;
            let grid = GridSpec::observed(&dataset, &[feature], common.grid_cap)?;
            let table = ice_curves(&model, &dataset, &grid, iargs.centered)?;
            ice_to_csv(&table, model.class_labels(), &common.out)?;
            println!(
                "wrote {} curves x {} grid points to {}",
                table.n_rows,
                grid.n_points(),
                common.out.display()
            );
            if common.svg {
                let svg_path = common.out.with_extension("svg");
                render_svg(&ice_bundle(&table), &svg_path, &RenderOptions::default())?;
                println!("wrote {}", svg_path.display());
            }
            baseline_manifest(common, "baseline ice")?;
            Ok(())
        }
    }
}

fn baseline_curve(common: &BaselineCommon, sensitivity: bool) -> CliResult {
    let model = load_model(&common.model)?;
    let dataset = common.data.load_for_model(&model)?;
    let features: Vec<usize> = common
        .features
        .iter()
        .map(|n| feature_index(&dataset, n))
        .collect::<Result<_, _>>()?;
    let grid = GridSpec::observed(&dataset, &features, common.grid_cap)?;
    let table = if sensitivity {
        sensitivity_analysis(&model, &dataset, &grid)?
    } else {
        partial_dependence(&model, &dataset, &grid)?
    };
    curve_to_csv(&table, model.class_labels(), &common.out)?;
    println!(
        "wrote {} grid points to {}",
        grid.n_points(),
        common.out.display()
    );
    if common.svg {
        if features.len() != 1 {
            return Err(Error::Config("--svg supports one varied feature".into()).into());
        }
        let svg_path = common.out.with_extension("svg");
        render_svg(
            &curve_bundle(&table, &dataset, sensitivity),
            &svg_path,
            &RenderOptions::default(),
        )?;
        println!("wrote {}", svg_path.display());
    }
    baseline_manifest(
        common,
        if sensitivity {
            "baseline sa"
        } else {
            "baseline pd"
        },
    )?;
    Ok(())
}

fn curve_bundle(
    table: &rfexplain::baselines::CurveTable,
    dataset: &Dataset,
    sensitivity: bool,
) -> PlotBundle {
    let name = &table.feature_names[0];
    let overlay = if table.n_outputs == 1 {
        Overlay::Curve(
            (0..table.grid.n_points())
                .map(|p| (table.grid.point_coords(p)[0], table.point(p)[0]))
                .collect(),
        )
    } else {
        Overlay::Curves(
            (0..table.n_outputs)
                .map(|k| {
                    (
                        k,
                        (0..table.grid.n_points())
                            .map(|p| (table.grid.point_coords(p)[0], table.point(p)[k]))
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let method = if sensitivity {
        "sensitivity analysis"
    } else {
        "partial dependence"
    };
    PlotBundle {
        kind: rfexplain::viz::PlotKind::MainEffect,
        title: format!("{method}: {name}"),
        x_label: name.clone(),
        y_label: "prediction".into(),
        z_label: None,
        class_names: match &dataset.target {
            rfexplain::data::Target::Classes { labels, .. } => Some(labels.clone()),
            rfexplain::data::Target::Numeric(_) => None,
        },
        points: Vec::new(),
        overlay: Some(overlay),
        annotations: rfexplain::viz::Annotations::default(),
    }
}

/// ICE rendering: up to 80 evenly spaced row curves in gray behind the
/// mean, first output dimension.
fn ice_bundle(table: &rfexplain::baselines::IceTable) -> PlotBundle {
    let g = table.grid.n_points();
    let xs: Vec<f64> = (0..g).map(|p| table.grid.point_coords(p)[0]).collect();
    let shown = table.n_rows.min(80);
    let family: Vec<Vec<(f64, f64)>> = (0..shown)
        .map(|s| {
            let row = s * table.n_rows / shown;
            (0..g).map(|p| (xs[p], table.get(row, p, 0))).collect()
        })
        .collect();
    let mean_vals = table.mean_curve();
    let mean: Vec<(f64, f64)> = (0..g)
        .map(|p| (xs[p], mean_vals[p * table.n_outputs]))
        .collect();
    PlotBundle {
        kind: rfexplain::viz::PlotKind::MainEffect,
        title: format!(
            "ice curves: {}{}",
            table.feature_name,
            if table.centered { " (centered)" } else { "" }
        ),
        x_label: table.feature_name.clone(),
        y_label: "prediction".into(),
        z_label: None,
        class_names: None,
        points: Vec::new(),
        overlay: Some(Overlay::CurveFamily { family, mean }),
        annotations: rfexplain::viz::Annotations::default(),
    }
}

fn baseline_manifest(common: &BaselineCommon, command: &str) -> Result<(), Error> {
    let mut manifest = RunManifest::new(command).with_config(json!({
        "features": common.features,
        "grid_cap": common.grid_cap,
    }));
    manifest.record_input(&common.model)?;
    manifest.record_input(&common.data.data)?;
    manifest.record_output(&common.out);
    manifest.write(manifest_path_for(&common.out))?;
    Ok(())
}
