use std::fs;
use std::path::Path;
use std::time::Instant;

use gradflow::density::{codensity, compute_density, smooth_with};
use gradflow::evaluation::{
    adjusted_rand_index, default_blobs, generate_blobs, generate_mixture_cube, percent_accuracy_matched,
    BlobSpec, ClusterReport, MixtureCubeSpec,
};
use gradflow::flow::{build_flow_directed, extract_clusters, iterate_to_steady_state, DEFAULT_MAX_COMPOSITIONS};
use gradflow::kmeans::kmeans;
use gradflow::spectra_io::{
    format_csv_matrix, format_density_dump, format_flow_dump, read_label_mask, read_labels,
    write_class_map, write_csv_matrix, write_envi_bsq, write_label_mask, write_labels,
    write_report_tables, write_text, ClassMapImage, DataType, LabelMask, SpectraMatrix,
};
use gradflow::{Error, Result};
use serde_json::{json, Map, Value};

use crate::args::{ClusterArgs, EvalArgs, InputArgs, KmeansArgs, OutputArgs, SynthArgs, SynthKind};
use crate::input;

struct Timings(Map<String, Value>);

impl Timings {
    fn new() -> Self {
        Timings(Map::new())
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        let secs = start.elapsed().as_secs_f64();
        log::info!("{stage}: {secs:.3} s");
        self.0.insert(stage.to_string(), json!(secs));
        Ok(out)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut body = serde_json::to_string_pretty(v).expect("json values serialize");
    body.push('\n');
    write_text(path, &body)
}

fn input_json(args: &InputArgs, data: &SpectraMatrix) -> Value {
    json!({
        "path": args.input.display().to_string(),
        "format": format!("{:?}", args.format).to_lowercase(),
        "points": data.len(),
        "bands": data.bands(),
        "rows": data.geometry().map(|g| g.rows),
        "cols": data.geometry().map(|g| g.cols),
    })
}

fn set_threads(out: &OutputArgs) -> Result<usize> {
    if let Some(t) = out.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot configure {t} threads: {e}")))?;
    }
    Ok(rayon::current_num_threads())
}

/// labels.csv, classmap.ppm when the geometry is known, and the report
/// tables when a mask is given. Returns the report summary for run.json.
fn write_outputs(labels: &[usize], data: &SpectraMatrix, out: &OutputArgs) -> Result<Value> {
    create_dir(&out.out)?;
    write_labels(labels, &out.out.join("labels.csv"))?;
    match data.geometry() {
        Some(g) => {
            let img = ClassMapImage::new(labels.to_vec(), Some(g.rows), Some(g.cols))?;
            write_class_map(&img, &out.out.join("classmap.ppm"))?;
        }
        None => log::info!("no image geometry; classmap.ppm skipped (give --rows and --cols)"),
    }
    let Some(mask_path) = &out.mask else {
        eprintln!("note: no --mask given; report tables and accuracy.txt not written");
        return Ok(Value::Null);
    };
    let mask = read_label_mask(mask_path, labels.len())?;
    report(labels, &mask, &out.out, out.mixed_threshold, out.matched)
}

fn report(labels: &[usize], mask: &LabelMask, dir: &Path, threshold: f64, matched: bool) -> Result<Value> {
    if !(0.0..=100.0).contains(&threshold) {
        return Err(Error::Parameter(format!(
            "mixed threshold must be a percentage in 0..=100, got {threshold}"
        )));
    }
    let mut report = ClusterReport::new(labels, mask)?;
    report.mixed = gradflow::evaluation::mixed_clusters(&report.confusion, threshold);
    report.mixed_threshold_pct = threshold;
    write_report_tables(&report, dir)?;

    let (truth, found): (Vec<usize>, Vec<usize>) = mask
        .labels()
        .iter()
        .zip(labels)
        .filter(|(&t, _)| t > 0)
        .map(|(&t, &l)| (t, l))
        .unzip();
    let ari = adjusted_rand_index(&found, &truth)?;
    println!("percent accuracy: {:.1}", report.percent_accuracy);
    println!("mean preservation: {:.1}", report.preservation.mean);
    println!("adjusted rand index (labeled pixels): {ari:.4}");
    let mut summary = json!({
        "percent_accuracy": report.percent_accuracy,
        "preservation_mean": report.preservation.mean,
        "ari_labeled": ari,
        "mixed_clusters": report.mixed.len(),
    });
    if matched {
        let m = percent_accuracy_matched(&report.confusion);
        println!("percent accuracy (one-to-one): {m:.1}");
        summary["percent_accuracy_matched"] = json!(m);
    }
    Ok(summary)
}

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let threads = set_threads(&args.output)?;
    let mut t = Timings::new();
    let data = t.time("read", || input::load(&args.input))?;
    let (graph, cached) = t.time("graph", || {
        input::neighbor_graph(&data, args.neighbors, args.cache_dir.as_deref())
    })?;
    let raw = t.time("density", || Ok(compute_density(&graph)))?;
    let field = t.time("smoothing", || {
        smooth_with(&raw, &graph, args.smoothing_steps, args.include_self)
    })?;
    let step = t.time("flow", || build_flow_directed(&field, &graph, args.flow_direction.into()))?;
    let steady = t.time("compose", || {
        iterate_to_steady_state(step.clone(), DEFAULT_MAX_COMPOSITIONS)
    })?;
    let clustering = t.time("labels", || extract_clusters(&steady))?;
    log::info!(
        "sigma {:.6}, {} clusters, {} compositions",
        field.sigma,
        clustering.cluster_count(),
        steady.composition_steps
    );
    println!("clusters: {}", clustering.cluster_count());

    let summary = t.time("write", || {
        let s = write_outputs(&clustering.labels, &data, &args.output)?;
        if !args.no_diagnostics {
            let dir = &args.output.out;
            write_text(&dir.join("density.csv"), &format_density_dump(&field, &codensity(&graph)))?;
            write_text(&dir.join("flow.csv"), &format_flow_dump(&step, &clustering, &field.ss))?;
        }
        Ok(s)
    })?;

    let run = json!({
        "command": "cluster",
        "config": {
            "input": input_json(&args.input, &data),
            "neighbors": args.neighbors,
            "smoothing_steps": args.smoothing_steps,
            "flow_direction": format!("{:?}", args.flow_direction).to_lowercase(),
            "include_self": args.include_self,
            "mask": args.output.mask.as_ref().map(|p| p.display().to_string()),
            "mixed_threshold_pct": args.output.mixed_threshold,
            "threads": threads,
        },
        "graph_cached": cached,
        "sigma": field.sigma,
        "cluster_count": clustering.cluster_count(),
        "cluster_sizes": clustering.sizes(),
        "composition_steps": steady.composition_steps,
        "timings_s": Value::Object(t.0),
        "report": summary,
    });
    write_json(&args.output.out.join("run.json"), &run)
}

pub fn kmeans_cmd(args: &KmeansArgs) -> Result<()> {
    let threads = set_threads(&args.output)?;
    let mut t = Timings::new();
    let data = t.time("read", || input::load(&args.input))?;
    let res = t.time("kmeans", || kmeans(&data, args.clusters, args.seed, args.max_iter))?;
    log::info!(
        "inertia {:.6e} after {} iterations, {} clusters, {} dropped",
        res.inertia,
        res.iterations,
        res.cluster_count(),
        res.dropped
    );
    println!("clusters: {}", res.cluster_count());
    let summary = t.time("write", || {
        let s = write_outputs(&res.labels, &data, &args.output)?;
        let centroids = SpectraMatrix::new(res.centroids.clone(), res.cluster_count(), res.bands)?;
        write_text(&args.output.out.join("centroids.csv"), &format_csv_matrix(&centroids))?;
        Ok(s)
    })?;
    let run = json!({
        "command": "kmeans",
        "config": {
            "input": input_json(&args.input, &data),
            "clusters": args.clusters,
            "seed": args.seed,
            "max_iter": args.max_iter,
            "mask": args.output.mask.as_ref().map(|p| p.display().to_string()),
            "mixed_threshold_pct": args.output.mixed_threshold,
            "threads": threads,
        },
        "cluster_count": res.cluster_count(),
        "dropped_clusters": res.dropped,
        "iterations": res.iterations,
        "inertia": res.inertia,
        "inertia_history": res.inertia_history,
        "timings_s": Value::Object(t.0),
        "report": summary,
    });
    write_json(&args.output.out.join("run.json"), &run)
}

/// `x,y,...:stdev:count`
pub fn parse_blob(spec: &str) -> Result<BlobSpec> {
    let bad = |why: &str| Error::Parameter(format!("blob {spec:?}: {why} (expected x,y,...:stdev:count)"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [center, stdev, count] = parts[..] else {
        return Err(bad("need three ':'-separated fields"));
    };
    let center = center
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| bad("center is not a list of numbers"))?;
    let stdev: f64 = stdev.trim().parse().map_err(|_| bad("stdev is not a number"))?;
    let count: usize = count.trim().parse().map_err(|_| bad("count is not a nonnegative integer"))?;
    Ok(BlobSpec { center, stdev, count })
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    create_dir(&args.out)?;
    let (data, mask) = match args.kind {
        SynthKind::Blobs => {
            let specs = if args.blobs.is_empty() {
                default_blobs()
            } else {
                args.blobs.iter().map(|s| parse_blob(s)).collect::<Result<_>>()?
            };
            generate_blobs(&specs, args.seed)?
        }
        SynthKind::Mixture => {
            let spec = MixtureCubeSpec {
                rows: args.rows,
                cols: args.cols,
                bands: args.bands,
                materials: args.materials,
                noise: args.noise,
            };
            generate_mixture_cube(&spec, args.seed)?
        }
    };
    write_csv_matrix(&data, &args.out.join("data.csv"))?;
    write_label_mask(&mask, &args.out.join("mask.csv"))?;
    if args.envi {
        if data.geometry().is_none() {
            return Err(Error::Usage("--envi needs an image; use --kind mixture".into()));
        }
        write_envi_bsq(&data, &args.out.join("data.hdr"), DataType::Float32)?;
    }
    println!(
        "wrote {} points x {} bands, {} classes to {}",
        data.len(),
        data.bands(),
        mask.class_count(),
        args.out.display()
    );
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let labels = read_labels(&args.labels)?;
    if labels.contains(&0) {
        return Err(Error::Format(format!(
            "{}: cluster ids start at 1",
            args.labels.display()
        )));
    }
    let mask = read_label_mask(&args.mask, labels.len())?;
    create_dir(&args.out)?;
    report(&labels, &mask, &args.out, args.mixed_threshold, args.matched)?;
    Ok(())
}
